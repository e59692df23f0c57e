#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "copula/blocking.hpp"
#include "copula/exact.hpp"
#include "copula/log_factorial.hpp"

namespace copula {

/// E[X_{n,a,b}] = ab/n, exact.
inline BigRational expected_count(std::int64_t n, std::int64_t a, std::int64_t b) {
  if (n <= 0 || a < 0 || a > n || b < 0 || b > n)
    throw std::invalid_argument("expected_count: need 0 <= a,b <= n, n > 0");
  return BigRational(BigInt(a) * b, BigInt(n));
}

/// P(n,a,b,c) = binom(b,c) binom(n-b,a-c) / binom(n,a), exact.
/// Equals the fraction of permutations whose upper-left a x b corner holds
/// exactly c ones.  Intended for desk-scale n (big integers); use
/// log_blocking_prob beyond.
inline BigRational blocking_prob_exact(const Blocking& bl) {
  validate_blocking(bl);
  return BigRational(binomial(bl.b, bl.c) * binomial(bl.n - bl.b, bl.a - bl.c),
                     binomial(bl.n, bl.a));
}

/// P(g,c) = (prod_i adot_i!)(prod_j bdot_j!) / (n! prod_{i,j} cdot_{i,j}!),
/// exact; reduces to blocking_prob_exact when I = J = 2.
inline BigRational grid_blocking_prob_exact(const GridBlocking& gb) {
  validate_grid_blocking(gb);
  BigInt num = 1, den = factorial(gb.grid.n);
  for (std::int64_t i = 1; i <= gb.grid.I(); ++i) num *= factorial(gb.grid.adot(i));
  for (std::int64_t j = 1; j <= gb.grid.J(); ++j) num *= factorial(gb.grid.bdot(j));
  for (auto v : gb.cdot.data()) den *= factorial(v);
  return BigRational(num, den);
}

/// Probability that the rectangle (a1,a2] x (b1,b2] holds exactly c ones.
/// Rows and columns cyclically permute, so this is the corner case at the
/// rectangle's dimensions; infeasible c gives 0.
inline BigRational rect_prob(std::int64_t n, std::int64_t a1, std::int64_t a2, std::int64_t b1,
                             std::int64_t b2, std::int64_t c) {
  if (!(0 < a1 && a1 < a2 && a2 < n && 0 < b1 && b1 < b2 && b2 < n))
    throw std::invalid_argument("rect_prob: need 0 < a1 < a2 < n and 0 < b1 < b2 < n");
  Blocking bl{n, a2 - a1, b2 - b1, c};
  if (!blocking_valid(bl)) return BigRational(0);
  return blocking_prob_exact(bl);
}

/// log P via the cached log-factorial table; -inf for zero-probability c.
inline double log_blocking_prob(const Blocking& bl) {
  validate_blocking(bl);
  auto& t = LogFactorialTable::instance();
  t.ensure(static_cast<std::size_t>(bl.n));
  auto lf = [&](std::int64_t k) { return t(static_cast<std::size_t>(k)); };
  auto cd = box_counts(bl);
  return lf(bl.a) + lf(bl.n - bl.a) + lf(bl.b) + lf(bl.n - bl.b) - lf(bl.n) - lf(cd[0]) -
         lf(cd[1]) - lf(cd[2]) - lf(cd[3]);
}

inline double log_grid_blocking_prob(const GridBlocking& gb) {
  validate_grid_blocking(gb);
  auto& t = LogFactorialTable::instance();
  t.ensure(static_cast<std::size_t>(gb.grid.n));
  auto lf = [&](std::int64_t k) { return t(static_cast<std::size_t>(k)); };
  double s = -lf(gb.grid.n);
  for (std::int64_t i = 1; i <= gb.grid.I(); ++i) s += lf(gb.grid.adot(i));
  for (std::int64_t j = 1; j <= gb.grid.J(); ++j) s += lf(gb.grid.bdot(j));
  for (auto v : gb.cdot.data()) s -= lf(v);
  return s;
}

/// xl(1+t) = (1+t) log(1+t), stable for small t.
inline double xl1p(double t) { return (1.0 + t) * std::log1p(t); }

struct FactorialFree {
  double log_value = 0.0;
  double value = 0.0;
  std::int64_t sparsity = 0;
  bool low_sparsity = false;  // Stirling regime is asymptotic; flag lambda < 8
};

/// Factorial-free approximation P~ evaluated in log form:
///   log P~ = -(1/2) log(2 pi D n / C) - n sum_{ij} ahat_i bhat_j
///            xl(1 + lhat_{ij} / (sqrt(n) ahat_i bhat_j)).
/// Requires every box count positive (otherwise D = 0).
inline FactorialFree factorial_free_approx(const Blocking& bl) {
  validate_blocking(bl);
  std::int64_t lambda = sparsity(bl);
  if (lambda == 0)
    throw std::invalid_argument("factorial_free_approx: a box count is zero (D = 0, P~ undefined)");
  double n = static_cast<double>(bl.n);
  double ah[2] = {static_cast<double>(bl.a) / n, static_cast<double>(bl.n - bl.a) / n};
  double bh[2] = {static_cast<double>(bl.b) / n, static_cast<double>(bl.n - bl.b) / n};
  auto cd = box_counts(bl);
  double CC = ah[0] * ah[1] * bh[0] * bh[1];
  double DD = 1.0;
  for (auto v : cd) DD *= static_cast<double>(v) / n;
  double lhat = (static_cast<double>(bl.c) - static_cast<double>(bl.a) * static_cast<double>(bl.b) / n) / std::sqrt(n);
  double sum = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double lij = ((i + j) % 2 == 0 ? lhat : -lhat);
      double w = ah[i] * bh[j];
      sum += w * xl1p(lij / (std::sqrt(n) * w));
    }
  FactorialFree r;
  r.log_value = -0.5 * std::log(2.0 * std::numbers::pi * DD * n / CC) - n * sum;
  r.value = std::exp(r.log_value);
  r.sparsity = lambda;
  r.low_sparsity = lambda < 8;
  return r;
}

/// Grid form (Lemma-morelogQ shape):
///   log P~ = (1/2) log(Ca Cb / D) - ((I-1)(J-1)/2) log(2 pi n)
///            - n sum_{ij} ahat_i bhat_j xl(1 + tl_{ij} / sqrt(n ahat_i bhat_j)).
inline FactorialFree factorial_free_approx(const GridBlocking& gb) {
  validate_grid_blocking(gb);
  std::int64_t lambda = sparsity(gb);
  if (lambda == 0)
    throw std::invalid_argument("factorial_free_approx: a box count is zero (D = 0, P~ undefined)");
  auto I = gb.grid.I(), J = gb.grid.J();
  double n = static_cast<double>(gb.grid.n);
  double logCa = 0, logCb = 0, logD = 0;
  for (std::int64_t i = 1; i <= I; ++i) logCa += std::log(gb.grid.ahat(i));
  for (std::int64_t j = 1; j <= J; ++j) logCb += std::log(gb.grid.bhat(j));
  double sum = 0.0;
  for (std::int64_t i = 1; i <= I; ++i)
    for (std::int64_t j = 1; j <= J; ++j) {
      double w = gb.grid.ahat(i) * gb.grid.bhat(j);
      double chat = static_cast<double>(gb.cdot(i - 1, j - 1)) / n;
      logD += std::log(chat);
      double tl = (chat - w) * std::sqrt(n / w);
      sum += w * xl1p(tl / std::sqrt(n * w));
    }
  FactorialFree r;
  r.log_value = 0.5 * (logCa + logCb - logD) -
                0.5 * static_cast<double>((I - 1) * (J - 1)) * std::log(2.0 * std::numbers::pi * n) -
                n * sum;
  r.value = std::exp(r.log_value);
  r.sparsity = lambda;
  r.low_sparsity = lambda < 8;
  return r;
}

}  // namespace copula
