#include <catch2/catch_amalgamated.hpp>

#include "copula/discrete_copula.hpp"
#include "copula/interpolate.hpp"
#include "copula/birkhoff.hpp"
#include "copula/io.hpp"
#include "copula/rng.hpp"

#include "oracles.hpp"

using namespace copula;

namespace {

// the 8x8 permutation and copula table reproduced from a worked example
const Permutation kFig2{8, {4, 1, 6, 3, 5, 2, 8, 7}};
const std::int32_t kFig2Table[8][8] = {
    {0, 0, 0, 1, 1, 1, 1, 1}, {1, 1, 1, 2, 2, 2, 2, 2}, {1, 1, 1, 2, 2, 3, 3, 3},
    {1, 1, 2, 3, 3, 4, 4, 4}, {1, 1, 2, 3, 4, 5, 5, 5}, {1, 2, 3, 4, 5, 6, 6, 6},
    {1, 2, 3, 4, 5, 6, 6, 7}, {1, 2, 3, 4, 5, 6, 7, 8}};

}  // namespace

TEST_CASE("integration of the worked 8x8 example") {
  DiscreteCopula c = copula_from_permutation(kFig2);
  CHECK(c.C(4, 5) == 3);
  for (std::int64_t a = 1; a <= 8; ++a)
    for (std::int64_t b = 1; b <= 8; ++b) CHECK(c.C(a, b) == kFig2Table[a - 1][b - 1]);
  CHECK(is_discrete_copula(c.C).ok);
  CHECK(permutation_from_copula(c).sigma == kFig2.sigma);
}

TEST_CASE("identity permutation integrates to min(a,b)") {
  DiscreteCopula c = copula_from_permutation(identity_permutation(3));
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b <= 3; ++b) CHECK(c.C(a, b) == std::min(a, b));
}

TEST_CASE("n=2 transposition") {
  DiscreteCopula c = copula_from_permutation(Permutation{2, {2, 1}});
  const std::int32_t want[3][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 2}};
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) CHECK(c.C(a, b) == want[a][b]);
}

TEST_CASE("roundtrip is the identity on S_n") {
  SECTION("exhaustive for n <= 6") {
    for (std::int64_t n = 1; n <= 6; ++n) {
      oracles::for_each_permutation(n, [&](const Permutation& p) {
        DiscreteCopula c = copula_from_permutation(p);
        REQUIRE(is_discrete_copula(c.C).ok);
        REQUIRE(permutation_from_copula(c).sigma == p.sigma);
      });
    }
  }
  SECTION("sampled for n = 7, 8") {
    for (std::int64_t n : {7, 8}) {
      Rng rng(substream_seed(2024, static_cast<std::uint64_t>(n)));
      for (int k = 0; k < 10000; ++k) {
        Permutation p = sample_permutation_uniform(n, rng);
        DiscreteCopula c = copula_from_permutation(p);
        REQUIRE(permutation_from_copula(c).sigma == p.sigma);
      }
    }
  }
}

TEST_CASE("is_discrete_copula rejects non-copulas with a diagnosis") {
  SECTION("integer multiple of the product copula") {
    // n C_0 has entries ab: boundary row C_{a,n} = a fails
    Matrix<std::int32_t> M(3, 3, 0);
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) M(a, b) = static_cast<std::int32_t>(a * b);
    auto chk = is_discrete_copula(M);
    CHECK_FALSE(chk.ok);
    CHECK(chk.reason.find("boundary") != std::string::npos);
  }
  SECTION("min(a,b) table is a copula") {
    Matrix<std::int32_t> M(6, 6, 0);
    for (int a = 0; a <= 5; ++a)
      for (int b = 0; b <= 5; ++b) M(a, b) = std::min(a, b);
    CHECK(is_discrete_copula(M).ok);
  }
  SECTION("constant-after-1 table violates the corner boundary") {
    Matrix<std::int32_t> M(3, 3, 0);
    M(1, 1) = M(1, 2) = M(2, 1) = M(2, 2) = 1;
    auto chk = is_discrete_copula(M);
    CHECK_FALSE(chk.ok);
    CHECK_THROWS_AS(permutation_from_copula(DiscreteCopula{2, M}), std::invalid_argument);
  }
  SECTION("2-increasing failure reports the quadruple") {
    // boundary rows are fine but two mass units sit in column 1
    Matrix<std::int32_t> M(4, 4, 0);
    const std::int32_t rows[4][4] = {{0, 0, 0, 0}, {0, 1, 1, 1}, {0, 2, 2, 2}, {0, 1, 2, 3}};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) M(a, b) = rows[a][b];
    auto chk = is_discrete_copula(M);
    REQUIRE_FALSE(chk.ok);
    CHECK(chk.reason.find("2-increasing") != std::string::npos);
    CHECK(chk.a2 == 3);
    CHECK(chk.b2 == 1);
  }
}

TEST_CASE("permutation_from_copula on min(a,b) gives the identity") {
  Matrix<std::int32_t> M(6, 6, 0);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) M(a, b) = std::min(a, b);
  CHECK(permutation_from_copula(DiscreteCopula{5, M}).sigma == identity_permutation(5).sigma);
}

TEST_CASE("product copula entries") {
  CHECK(product_copula_entry(2, 1, 1) == BigRational(1, 2));
  CHECK(product_copula_entry(8, 4, 5) == BigRational(5, 2));
  CHECK(product_copula_entry(7, 0, 3) == 0);
  auto m = product_copula(4);
  CHECK(m(2, 2) == BigRational(1, 1));
  CHECK(m(4, 3) == BigRational(3, 1));
}

TEST_CASE("residual field") {
  SECTION("identity n=4 center") {
    ResidualField r = residual(copula_from_permutation(identity_permutation(4)));
    CHECK(r.exact(2, 2) == BigRational(1, 1));  // 2 - 4/4·... min - ab/n = 2 - 1
    CHECK(r.value(2, 2) == 1.0);
  }
  SECTION("boundaries vanish and increments telescope") {
    Rng rng(99);
    Permutation p = sample_permutation_uniform(12, rng);
    ResidualField r = residual(copula_from_permutation(p));
    for (std::int64_t a = 0; a <= 12; ++a) {
      CHECK(r.numer(a, 0) == 0);
      CHECK(r.numer(0, a) == 0);
      CHECK(r.numer(a, 12) == 0);
      CHECK(r.numer(12, a) == 0);
    }
    for (std::int64_t b = 0; b <= 12; ++b) {
      std::int64_t sum = 0;
      for (std::int64_t a = 1; a <= 12; ++a) sum += r.numer(a, b) - r.numer(a - 1, b);
      CHECK(sum == 0);
    }
  }
  SECTION("worked example residual") {
    ResidualField r = residual(copula_from_permutation(kFig2));
    CHECK(r.exact(4, 5) == BigRational(1, 2));  // 3 - 20/8
  }
}

TEST_CASE("bilinear interpolation") {
  SECTION("nodes reproduce corners exactly") {
    DiscreteCopula c = copula_from_permutation(kFig2);
    InterpolatedField x = x_field(c);
    for (std::int64_t a = 0; a <= 8; ++a)
      for (std::int64_t b = 0; b <= 8; ++b) {
        CHECK(x(static_cast<double>(a) / 8, static_cast<double>(b) / 8) == x.corner(a, b));
        CHECK(x.eval_exact(BigRational(a, 8), BigRational(b, 8)) ==
              BigRational(c.C(a, b), 8));
      }
  }
  SECTION("cell center is the mean of the four corners") {
    DiscreteCopula c = copula_from_permutation(kFig2);
    InterpolatedField y = y_field(c);
    double mean = (y.corner(2, 3) + y.corner(3, 3) + y.corner(2, 4) + y.corner(3, 4)) / 4.0;
    CHECK_THAT(y(2.5 / 8, 3.5 / 8), Catch::Matchers::WithinAbs(mean, 1e-15));
  }
  SECTION("y of the identity at n=2, point (1/4,1/4)") {
    DiscreteCopula c = copula_from_permutation(identity_permutation(2));
    InterpolatedField y = y_field(c);
    CHECK(y.eval_exact(BigRational(1, 4), BigRational(1, 4)) == BigRational(1, 16));
    CHECK_THAT(y(0.25, 0.25), Catch::Matchers::WithinAbs(1.0 / 16, 1e-15));
  }
  SECTION("x fields are 1-Lipschitz in each variable") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      Permutation p = sample_permutation_uniform(16, rng);
      InterpolatedField x = x_field(copula_from_permutation(p));
      for (int k = 0; k < 200; ++k) {
        double u0 = rng.uniform01(), u1 = rng.uniform01(), v = rng.uniform01();
        CHECK(std::abs(x(u0, v) - x(u1, v)) <= std::abs(u0 - u1) + 1e-12);
        CHECK(std::abs(x(v, u0) - x(v, u1)) <= std::abs(u0 - u1) + 1e-12);
      }
    }
  }
  SECTION("continuity across cell boundaries") {
    DiscreteCopula c = copula_from_permutation(kFig2);
    InterpolatedField y = y_field(c);
    for (int k = 1; k < 8; ++k) {
      double u = static_cast<double>(k) / 8;
      CHECK_THAT(y(u - 1e-9, 0.37), Catch::Matchers::WithinAbs(y(u + 1e-9, 0.37), 1e-7));
    }
  }
}

TEST_CASE("birkhoff copulas") {
  SECTION("permutation matrices integrate like discrete copulas") {
    Rng rng(7);
    Permutation p = sample_permutation_uniform(6, rng);
    Matrix<double> M(6, 6, 0.0);
    for (std::int64_t i = 0; i < 6; ++i) M(i, p.sigma[static_cast<std::size_t>(i)] - 1) = 1.0;
    BirkhoffCopula bc = birkhoff_copula_from_matrix(M);
    DiscreteCopula dc = copula_from_permutation(p);
    for (std::int64_t a = 0; a <= 6; ++a)
      for (std::int64_t b = 0; b <= 6; ++b)
        CHECK_THAT(bc.C(a, b), Catch::Matchers::WithinAbs(dc.C(a, b), 1e-12));
  }
  SECTION("2x2 mixture integrates the corner cell") {
    double t = 0.25;
    Matrix<double> M(2, 2, 0.0);
    M(0, 0) = t;
    M(0, 1) = 1 - t;
    M(1, 0) = 1 - t;
    M(1, 1) = t;
    BirkhoffCopula bc = birkhoff_copula_from_matrix(M);
    CHECK_THAT(bc.C(1, 1), Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK(is_birkhoff_copula(bc.C).ok);
  }
  SECTION("bad row sums are rejected with the offending index") {
    Matrix<double> M(2, 2, 0.5);
    M(1, 0) = 1.0;  // row 1 sums to 1.5
    CHECK_THROWS_WITH(birkhoff_copula_from_matrix(M),
                      Catch::Matchers::ContainsSubstring("row sum"));
  }
}

TEST_CASE("serialization") {
  SECTION("copula CSV roundtrip") {
    DiscreteCopula c = copula_from_permutation(kFig2);
    std::string csv = copula_to_csv(c);
    std::istringstream in(csv);
    DiscreteCopula back = copula_from_csv(in);
    CHECK(back.n == c.n);
    CHECK(back.C == c.C);
  }
  SECTION("permutation JSON roundtrip") {
    json j = permutation_to_json(kFig2);
    CHECK(j["n"] == 8);
    Permutation back = permutation_from_json(j);
    CHECK(back.sigma == kFig2.sigma);
  }
}
