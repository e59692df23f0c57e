#include <catch2/catch_amalgamated.hpp>

#include "copula/blocking.hpp"
#include "copula/blocking_prob.hpp"

#include "oracles.hpp"

using namespace copula;

TEST_CASE("pointwise exact blocking probabilities") {
  SECTION("frozen small cases") {
    CHECK(blocking_prob_exact({2, 1, 1, 1}) == BigRational(1, 2));
    CHECK(blocking_prob_exact({8, 4, 5, 3}) == BigRational(3, 7));
    CHECK(blocking_prob_exact({9, 4, 9, 4}) == BigRational(1));  // b = n forces c = a
  }
  SECTION("(8,4,5,3) against full enumeration of S_8") {
    CHECK(oracles::blocking_prob_bruteforce(8, 4, 5, 3) == BigRational(3, 7));
  }
  SECTION("infeasible quadruples are rejected") {
    CHECK_THROWS_AS(blocking_prob_exact({8, 4, 5, 0}), std::invalid_argument);  // c22 = -1
    CHECK_THROWS_AS(blocking_prob_exact({8, 4, 5, 5}), std::invalid_argument);  // c > min(a,b)
    CHECK(blocking_valid({3, 1, 1, 0}));  // lower bound is max(0, a+b-n), not n-a-b
    CHECK(blocking_prob_exact({3, 1, 1, 0}) == BigRational(2, 3));
  }
  SECTION("expected count") {
    CHECK(expected_count(8, 4, 5) == BigRational(5, 2));
    CHECK(expected_count(9, 0, 5) == 0);
    CHECK(expected_count(9, 9, 5) == 5);
  }
}

TEST_CASE("enumeration oracle for all n <= 6") {
  for (std::int64_t n = 1; n <= 6; ++n) {
    for (std::int64_t a = 0; a <= n; ++a)
      for (std::int64_t b = 0; b <= n; ++b) {
        BigRational total = 0, mean = 0;
        for (std::int64_t c = std::max<std::int64_t>(0, a + b - n); c <= std::min(a, b); ++c) {
          BigRational p = blocking_prob_exact({n, a, b, c});
          REQUIRE(p == oracles::blocking_prob_bruteforce(n, a, b, c));
          total += p;
          mean += c * p;
        }
        REQUIRE(total == 1);
        REQUIRE(mean == expected_count(n, a, b));
      }
  }
}

TEST_CASE("grid blocking probabilities") {
  SECTION("n=2 identity-only configuration") {
    GridBlocking gb{GridSpec{2, {0, 1, 2}, {0, 1, 2}}, Matrix<std::int64_t>(2, 2, 0)};
    gb.cdot(0, 0) = 1;
    gb.cdot(1, 1) = 1;
    CHECK(grid_blocking_prob_exact(gb) == BigRational(1, 2));
  }
  SECTION("2x2 grids match the pointwise formula") {
    GridBlocking gb{GridSpec{8, {0, 4, 8}, {0, 5, 8}}, Matrix<std::int64_t>(2, 2, 0)};
    gb.cdot(0, 0) = 3;
    gb.cdot(0, 1) = 1;
    gb.cdot(1, 0) = 2;
    gb.cdot(1, 1) = 2;
    CHECK(grid_blocking_prob_exact(gb) == BigRational(3, 7));
  }
  SECTION("degenerate single box") {
    GridBlocking gb{GridSpec{3, {0, 3}, {0, 3}}, Matrix<std::int64_t>(1, 1, 3)};
    CHECK(grid_blocking_prob_exact(gb) == 1);
  }
  SECTION("margin mismatches are rejected") {
    GridBlocking gb{GridSpec{4, {0, 2, 4}, {0, 2, 4}}, Matrix<std::int64_t>(2, 2, 1)};
    gb.cdot(0, 0) = 2;  // row 1 now sums to 3 != 2
    CHECK_THROWS_WITH(grid_blocking_prob_exact(gb), Catch::Matchers::ContainsSubstring("row sum"));
  }
  SECTION("grid enumeration oracle, I,J <= 3, n <= 6") {
    for (std::int64_t n : {4, 5, 6}) {
      std::vector<std::vector<std::int64_t>> cut_sets;
      cut_sets.push_back({0, n / 2, n});
      cut_sets.push_back({0, 1, n - 1, n});
      for (const auto& ac : cut_sets)
        for (const auto& bc : cut_sets) {
          auto dist = oracles::grid_count_distribution(n, ac, bc);
          BigInt nf = factorial(n);
          BigRational total = 0;
          for (const auto& [flat, count] : dist) {
            GridBlocking gb{GridSpec{n, ac, bc},
                            Matrix<std::int64_t>(ac.size() - 1, bc.size() - 1, 0)};
            for (std::size_t k = 0; k < flat.size(); ++k) gb.cdot.data()[k] = flat[k];
            BigRational p = grid_blocking_prob_exact(gb);
            REQUIRE(p == BigRational(BigInt(count), nf));
            total += p;
          }
          REQUIRE(total == 1);
        }
    }
  }
}

TEST_CASE("rectangle translation") {
  SECTION("reduction identity") {
    for (std::int64_t c = 1; c <= 4; ++c)
      CHECK(rect_prob(8, 2, 6, 1, 6, c) == blocking_prob_exact({8, 4, 5, c}));
  }
  SECTION("single interior cell of S_5 by enumeration") {
    CHECK(rect_prob(5, 1, 2, 1, 2, 1) == BigRational(1, 5));
    std::int64_t hits = 0;
    oracles::for_each_permutation(5, [&](const Permutation& p) { hits += (p.sigma[1] == 2); });
    CHECK(BigRational(BigInt(hits), factorial(5)) == BigRational(1, 5));
  }
  SECTION("infeasible counts give zero") {
    CHECK(rect_prob(8, 2, 6, 1, 6, 5) == 0);
  }
  SECTION("translation property by enumeration at n = 5") {
    std::int64_t n = 5;
    for (std::int64_t a1 = 1; a1 < n - 1; ++a1)
      for (std::int64_t a2 = a1 + 1; a2 < n; ++a2)
        for (std::int64_t b1 = 1; b1 < n - 1; ++b1)
          for (std::int64_t b2 = b1 + 1; b2 < n; ++b2)
            for (std::int64_t c = 0; c <= std::min(a2 - a1, b2 - b1); ++c) {
              std::int64_t hits = 0;
              oracles::for_each_permutation(n, [&](const Permutation& p) {
                std::int64_t cnt = 0;
                for (std::int64_t i = a1 + 1; i <= a2; ++i) {
                  auto col = p.sigma[static_cast<std::size_t>(i - 1)];
                  cnt += (col > b1 && col <= b2);
                }
                hits += (cnt == c);
              });
              REQUIRE(rect_prob(n, a1, a2, b1, b2, c) == BigRational(BigInt(hits), factorial(n)));
            }
  }
}

TEST_CASE("stirling tail") {
  SECTION("frozen values") {
    auto s1 = stirling_log_factorial(1);
    CHECK_THAT(s1.tail, Catch::Matchers::WithinAbs(0.0810615, 1e-6));
    CHECK(s1.tail < 1.0 / 12);
    auto s10 = stirling_log_factorial(10);
    CHECK(s10.tail > 0);
    CHECK(s10.tail < 1.0 / 120);
    auto s2 = stirling_log_factorial(2);
    CHECK_THAT(s2.log_factorial, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  }
  SECTION("k = 0 is flagged") { CHECK_THROWS_AS(stirling_log_factorial(0), std::invalid_argument); }
  SECTION("0 < st(k) < 1/(12k) over the full sweep") {
    auto& table = LogFactorialTable::instance();
    table.ensure(100000);
    for (std::size_t k = 1; k <= 100000; ++k) {
      double st = table.stirling_tail(k);
      REQUIRE(st > 0.0);
      REQUIRE(st < 1.0 / (12.0 * static_cast<double>(k)));
    }
  }
}

TEST_CASE("factorial-free approximation") {
  SECTION("loose sanity at sparsity 1") {
    auto ff = factorial_free_approx(Blocking{8, 4, 5, 3});
    CHECK(ff.sparsity == 1);
    CHECK(ff.low_sparsity);
    double exact = 3.0 / 7.0;
    CHECK(std::abs(exact / ff.value - 1.0) < 4.0 / 12.0);
  }
  SECTION("tight at sparsity 100") {
    auto ff = factorial_free_approx(Blocking{400, 200, 200, 100});
    CHECK(ff.sparsity == 100);
    CHECK_FALSE(ff.low_sparsity);
    double exact = to_double(blocking_prob_exact({400, 200, 200, 100}));
    CHECK(std::abs(exact / ff.value - 1.0) < 0.02);
  }
  SECTION("symmetric in a and b") {
    auto f1 = factorial_free_approx(Blocking{30, 12, 17, 8});
    auto f2 = factorial_free_approx(Blocking{30, 17, 12, 8});
    CHECK_THAT(f1.log_value, Catch::Matchers::WithinAbs(f2.log_value, 1e-12));
  }
  SECTION("sparsity zero is rejected") {
    CHECK_THROWS_AS(factorial_free_approx(Blocking{9, 4, 9, 4}), std::invalid_argument);
  }
  SECTION("ratio improves along the balanced family") {
    double prev = 1e9;
    for (std::int64_t k : {25, 50, 100, 200}) {
      std::int64_t n = 4 * k;
      auto ff = factorial_free_approx(Blocking{n, n / 2, n / 2, n / 4});
      double exact = to_double(blocking_prob_exact({n, n / 2, n / 2, n / 4}));
      double err = std::abs(exact / ff.value - 1.0);
      CHECK(err < prev);
      prev = err;
    }
  }
  SECTION("grid form agrees with the pointwise form on 2x2") {
    Blocking bl{100, 40, 55, 24};
    auto p1 = factorial_free_approx(bl);
    auto p2 = factorial_free_approx(to_grid_blocking(bl));
    CHECK_THAT(p1.log_value, Catch::Matchers::WithinAbs(p2.log_value, 1e-10));
  }
}

TEST_CASE("sparsity") {
  CHECK(sparsity(Blocking{8, 4, 5, 3}) == 1);
  CHECK(sparsity(Blocking{9, 4, 9, 4}) == 0);
  CHECK(sparsity(Blocking{400, 200, 200, 100}) == 100);
}

TEST_CASE("log-space path matches exact rationals") {
  for (auto [n, a, b, c] : {std::array<std::int64_t, 4>{8, 4, 5, 3},
                            std::array<std::int64_t, 4>{400, 200, 200, 100},
                            std::array<std::int64_t, 4>{1000, 500, 500, 260}}) {
    double lg = log_blocking_prob({n, a, b, c});
    double exact = to_double(blocking_prob_exact({n, a, b, c}));
    CHECK_THAT(std::exp(lg), Catch::Matchers::WithinRel(exact, 1e-9));
  }
}
