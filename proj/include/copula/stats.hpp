#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "copula/common.hpp"

namespace copula {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_cdf(double x, double sigma) { return normal_cdf(x / sigma); }

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and a
/// continuous reference CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
  }
  return d;
}

/// KS with a discreteness correction for lattice-valued samples: the
/// reference CDF is read at lattice midpoints, so a perfectly discretized
/// reference scores 0 instead of ~density * spacing / 2.
inline double ks_statistic_lattice(std::vector<double> samples, const std::function<double(double)>& cdf,
                                   double spacing) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  if (!(spacing > 0)) throw std::invalid_argument("ks_statistic: spacing must be positive");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double h = spacing / 2.0;
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    // cumulative count through this lattice value vs reference at the upper
    // midpoint; count before it vs reference at the lower midpoint
    d = std::max(d, std::abs(static_cast<double>(j) / n - cdf(samples[i] + h)));
    d = std::max(d, std::abs(static_cast<double>(i) / n - cdf(samples[i] - h)));
    i = j;
  }
  return d;
}

/// Two-sample KS distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Survival function of chi^2 with `dof` degrees of freedom.
inline double chi_square_pvalue(double chi2, double dof) {
  if (chi2 <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
}

/// Pearson chi^2 against expected counts; bins with expected mass below
/// `min_expected` are pooled into a single remainder bin.
struct Chi2Result {
  double chi2 = 0.0;
  double dof = 0.0;
  double pvalue = 1.0;
};

inline Chi2Result chi_square_test(const std::vector<double>& observed,
                                  const std::vector<double>& expected, double min_expected = 5.0) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_test: size mismatch");
  double chi2 = 0.0;
  std::int64_t bins = 0;
  double pool_obs = 0.0, pool_exp = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (expected[k] >= min_expected) {
      double d = observed[k] - expected[k];
      chi2 += d * d / expected[k];
      ++bins;
    } else {
      pool_obs += observed[k];
      pool_exp += expected[k];
    }
  }
  if (pool_exp > 0) {
    double d = pool_obs - pool_exp;
    chi2 += d * d / std::max(pool_exp, 1e-12);
    ++bins;
  }
  Chi2Result r;
  r.chi2 = chi2;
  r.dof = static_cast<double>(std::max<std::int64_t>(bins - 1, 1));
  r.pvalue = chi_square_pvalue(chi2, r.dof);
  return r;
}

inline double mean(const std::vector<double>& v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  double m = mean(v);
  KahanSum s;
  for (double x : v) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Sample covariance matrix (empirical means subtracted) of row-major
/// observations: rows(samples) x dim.
inline Matrix<double> covariance_matrix(const Matrix<double>& obs) {
  std::size_t N = obs.rows(), d = obs.cols();
  if (N < 2) throw std::invalid_argument("covariance_matrix: need at least two rows");
  std::vector<double> mu(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    KahanSum s;
    for (std::size_t i = 0; i < N; ++i) s.add(obs(i, k));
    mu[k] = s.value() / static_cast<double>(N);
  }
  Matrix<double> cov(d, d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      KahanSum s;
      for (std::size_t i = 0; i < N; ++i) s.add((obs(i, a) - mu[a]) * (obs(i, b) - mu[b]));
      cov(a, b) = cov(b, a) = s.value() / static_cast<double>(N);
    }
  return cov;
}

}  // namespace copula
