#include <catch2/catch_amalgamated.hpp>

#include "copula/sheet.hpp"
#include "copula/stats.hpp"

#include "oracles.hpp"

using namespace copula;

TEST_CASE("projection onto V_g") {
  SheetGrid g = SheetGrid::uniform(2, 2);
  SECTION("checkerboard is fixed") {
    Matrix<double> z(2, 2, 0.0);
    z(0, 0) = 1;
    z(0, 1) = -1;
    z(1, 0) = -1;
    z(1, 1) = 1;
    Matrix<double> pz = project_to_Vg(z, g);
    for (std::size_t k = 0; k < 4; ++k)
      CHECK_THAT(pz.data()[k], Catch::Matchers::WithinAbs(z.data()[k], 1e-14));
  }
  SECTION("constants are killed") {
    Matrix<double> z(2, 2, 1.0);
    Matrix<double> pz = project_to_Vg(z, g);
    for (std::size_t k = 0; k < 4; ++k) CHECK_THAT(pz.data()[k], Catch::Matchers::WithinAbs(0.0, 1e-14));
  }
  SECTION("idempotent, self-adjoint, norm-nonincreasing on a non-uniform grid") {
    Rng rng(17);
    SheetGrid h = SheetGrid::make({0.0, 0.21, 0.48, 0.9, 1.0}, {0.0, 0.33, 0.7, 1.0});
    for (int trial = 0; trial < 25; ++trial) {
      Matrix<double> z(4, 3, 0.0), w(4, 3, 0.0);
      for (auto& v : z.data()) v = rng.normal();
      for (auto& v : w.data()) v = rng.normal();
      Matrix<double> pz = project_to_Vg(z, h);
      Matrix<double> ppz = project_to_Vg(pz, h);
      Matrix<double> pw = project_to_Vg(w, h);
      double nz = 0, npz = 0, lhs = 0, rhs = 0;
      for (std::size_t k = 0; k < z.size(); ++k) {
        CHECK_THAT(ppz.data()[k], Catch::Matchers::WithinAbs(pz.data()[k], 1e-12));
        nz += z.data()[k] * z.data()[k];
        npz += pz.data()[k] * pz.data()[k];
        lhs += pz.data()[k] * w.data()[k];
        rhs += z.data()[k] * pw.data()[k];
      }
      CHECK(npz <= nz + 1e-12);
      CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-10));
      for (std::int64_t j = 0; j < h.J(); ++j) {
        double s = 0;
        for (std::int64_t i = 0; i < h.I(); ++i) s += h.sqrt_du[static_cast<std::size_t>(i)] * pz(i, j);
        CHECK_THAT(s, Catch::Matchers::WithinAbs(0.0, 1e-10));
      }
      for (std::int64_t i = 0; i < h.I(); ++i) {
        double s = 0;
        for (std::int64_t j = 0; j < h.J(); ++j) s += h.sqrt_dv[static_cast<std::size_t>(j)] * pz(i, j);
        CHECK_THAT(s, Catch::Matchers::WithinAbs(0.0, 1e-10));
      }
    }
  }
}

TEST_CASE("sheet samples vanish on the boundary") {
  SheetGrid g = SheetGrid::uniform(8, 8);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    SheetSample s = sample_sheet_grid(g, rng);
    for (std::size_t i = 0; i <= 8; ++i) {
      CHECK(s.f(i, 0) == 0.0);
      CHECK(s.f(0, i) == 0.0);
      CHECK(s.f(i, 8) == 0.0);
      CHECK(s.f(8, i) == 0.0);
    }
    // the pinning only removes float dust: recompute the raw prefix sums
    Matrix<double> raw(9, 9, 0.0);
    for (std::size_t i = 1; i <= 8; ++i) {
      double rowsum = 0;
      for (std::size_t j = 1; j <= 8; ++j) {
        rowsum += g.sqrt_du[i - 1] * g.sqrt_dv[j - 1] * s.tz(i - 1, j - 1);
        raw(i, j) = raw(i - 1, j) + rowsum;
      }
    }
    for (std::size_t i = 0; i <= 8; ++i) {
      CHECK_THAT(raw(i, 8), Catch::Matchers::WithinAbs(0.0, 1e-9));
      CHECK_THAT(raw(8, i), Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
  }
}

TEST_CASE("degenerate grids are rejected") {
  CHECK_THROWS_AS(SheetGrid::make({0.0, 0.5, 0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SheetGrid::make({0.0, 0.7}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("covariance oracle") {
  CHECK_THAT(sheet_covariance_oracle(0.5, 0.5, 0.5, 0.5), Catch::Matchers::WithinAbs(1.0 / 16, 1e-15));
  CHECK(sheet_covariance_oracle(0.3, 0.4, 1.0, 0.7) == 0.0);
  CHECK(sheet_covariance_oracle(0.0, 0.4, 0.2, 0.7) == 0.0);
  CHECK_THAT(sheet_covariance_oracle(0.25, 0.25, 0.75, 0.75),
             Catch::Matchers::WithinAbs(1.0 / 256, 1e-15));
  SECTION("matches the 16-term bridge expansion everywhere") {
    for (double u1 : {0.1, 0.25, 0.5, 0.9})
      for (double v1 : {0.2, 0.5, 0.75})
        for (double u2 : {0.15, 0.5, 0.8})
          for (double v2 : {0.3, 0.5, 0.95})
            CHECK_THAT(sheet_covariance_oracle(u1, v1, u2, v2),
                       Catch::Matchers::WithinAbs(oracles::bridged_cov_expansion(u1, v1, u2, v2), 1e-12));
  }
}

TEST_CASE("sampled moments match the oracle") {
  SECTION("variance 1/16 at the center of a 2x2 grid") {
    SheetGrid g = SheetGrid::uniform(2, 2);
    std::int64_t N = 100000;
    std::vector<double> center(static_cast<std::size_t>(N));
    Rng rng(41);
    for (auto& x : center) x = sample_sheet_grid(g, rng).f(1, 1);
    double var = variance(center);
    double se = (1.0 / 16) * std::sqrt(2.0 / static_cast<double>(N));
    CHECK(std::abs(var - 1.0 / 16) < 3 * se);
  }
  SECTION("entrywise covariance on the uniform 4x4 interior grid") {
    SheetGrid g = SheetGrid::uniform(4, 4);
    std::int64_t N = 50000;
    Matrix<double> obs(static_cast<std::size_t>(N), 9, 0.0);
    Rng rng(42);
    for (std::int64_t s = 0; s < N; ++s) {
      SheetSample sample = sample_sheet_grid(g, rng);
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
          obs(static_cast<std::size_t>(s), static_cast<std::size_t>((i - 1) * 3 + (j - 1))) =
              sample.f(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    Matrix<double> cov = covariance_matrix(obs);
    for (int x = 0; x < 9; ++x)
      for (int y = 0; y < 9; ++y) {
        double u1 = (x / 3 + 1) / 4.0, v1 = (x % 3 + 1) / 4.0;
        double u2 = (y / 3 + 1) / 4.0, v2 = (y % 3 + 1) / 4.0;
        CHECK(std::abs(cov(x, y) - sheet_covariance_oracle(u1, v1, u2, v2)) < 0.01);
      }
  }
}

TEST_CASE("bridge transform") {
  SheetGrid g = SheetGrid::uniform(5, 5);
  SECTION("zero input gives zero output") {
    Matrix<double> zero(6, 6, 0.0);
    Matrix<double> f = bridge_from_sheet(zero, g);
    for (auto v : f.data()) CHECK(v == 0.0);
  }
  SECTION("fstar = uv is annihilated") {
    Matrix<double> fstar(6, 6, 0.0);
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5; ++j)
        fstar(i, j) = g.u[static_cast<std::size_t>(i)] * g.v[static_cast<std::size_t>(j)];
    Matrix<double> f = bridge_from_sheet(fstar, g);
    for (auto v : f.data()) CHECK_THAT(v, Catch::Matchers::WithinAbs(0.0, 1e-15));
  }
  SECTION("boundary is annihilated for arbitrary input") {
    Rng rng(5);
    Matrix<double> fstar(6, 6, 0.0);
    for (int i = 1; i <= 5; ++i)
      for (int j = 1; j <= 5; ++j) fstar(i, j) = rng.normal();
    Matrix<double> f = bridge_from_sheet(fstar, g);
    for (int k = 0; k <= 5; ++k) {
      CHECK_THAT(f(k, 5), Catch::Matchers::WithinAbs(0.0, 1e-12));
      CHECK_THAT(f(5, k), Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("the two sampling routes agree in law") {
  SheetGrid g = SheetGrid::uniform(16, 16);
  std::int64_t N = 20000;
  std::vector<double> a(static_cast<std::size_t>(N)), b(static_cast<std::size_t>(N));
  Rng r1(1001), r2(2002);
  for (auto& x : a) x = sample_sheet_grid(g, r1).f(8, 8);
  for (auto& x : b) x = sample_sheet_via_bridge(g, r2)(8, 8);
  CHECK(ks_two_sample(a, b) < 0.02);
  SECTION("route B boundary is exactly zero after bridging") {
    Matrix<double> f = sample_sheet_via_bridge(g, r2);
    for (int k = 0; k <= 16; ++k) {
      CHECK_THAT(f(k, 16), Catch::Matchers::WithinAbs(0.0, 1e-12));
      CHECK_THAT(f(16, k), Catch::Matchers::WithinAbs(0.0, 1e-12));
      CHECK(f(k, 0) == 0.0);
      CHECK(f(0, k) == 0.0);
    }
  }
}

TEST_CASE("holder predicate") {
  Rng rng(77);
  SECTION("the zero field passes") {
    auto zero = [](double, double) { return 0.0; };
    CHECK(holder_check_function(zero, HolderParams{0.5, 0.2, 0.01}, rng).ok);
  }
  SECTION("a linear field fails against a tiny constant") {
    auto lin = [](double u, double) { return u; };
    auto res = holder_check_function(lin, HolderParams{0.5, 0.2, 0.01}, rng);
    CHECK_FALSE(res.ok);
    // e.g. |du| = 0.4 gives 0.4 > 0.01 * 0.8^{0.3} ~ 0.0094
    CHECK(res.diff >= res.bound);
  }
  SECTION("bridged sheets on a 64x64 grid pass at small radius") {
    SheetGrid g = SheetGrid::uniform(64, 64);
    HolderParams hp{0.001, 0.2, 0.25};
    int passed = 0;
    for (int s = 0; s < 100; ++s) {
      Rng srng = substream(909, static_cast<std::uint64_t>(s));
      SheetSample sample = sample_sheet_grid(g, srng);
      BilinearGrid field = sheet_field(sample, g);
      Rng prng = substream(910, static_cast<std::uint64_t>(s));
      passed += holder_check_function(field, hp, prng, 33, 10000).ok ? 1 : 0;
    }
    CHECK(passed >= 95);
  }
  SECTION("bad parameters are rejected") {
    auto zero = [](double, double) { return 0.0; };
    CHECK_THROWS_AS(holder_check_function(zero, HolderParams{0.0, 0.2, 1.0}, rng),
                    std::invalid_argument);
  }
}
