#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "copula/blocking.hpp"
#include "copula/blocking_prob.hpp"
#include "copula/common.hpp"
#include "copula/exact.hpp"

namespace copula {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

/// ga_C(t) = exp(-t^2 / 2C) / sqrt(2 pi C).
inline double gaussian_density(double C, double t) {
  if (!(C > 0)) throw std::invalid_argument("gaussian_density: variance must be positive");
  return std::exp(-t * t / (2.0 * C)) / std::sqrt(2.0 * std::numbers::pi * C);
}

struct RegularityParams {
  double alpha = 0.0;
  double eta = 0.0;
};

// Delta_1: 0 < 6 eta < 8 alpha - 7 < 1.  Doubles are dyadic rationals, so
// membership is decided exactly.
inline bool in_delta1(const RegularityParams& p) {
  BigRational a(p.alpha), e(p.eta);
  BigRational t = 8 * a - 7;
  return BigRational(0) < 6 * e && 6 * e < t && t < 1;
}

// Delta_2: 0 < 12 eta < 12 alpha - 11 < 1.
inline bool in_delta2(const RegularityParams& p) {
  BigRational a(p.alpha), e(p.eta);
  BigRational t = 12 * a - 11;
  return BigRational(0) < 12 * e && 12 * e < t && t < 1;
}

namespace detail {

// value > n^e, decided in 50-digit arithmetic; near-integer powers snap so
// exact boundaries (e.g. 100^0.5) cannot flip on rounding noise.
inline bool exceeds_power(std::int64_t value, std::int64_t n, double e) {
  BigFloat t = pow(BigFloat(n), BigFloat(e));
  BigFloat r = round(t);
  if (abs(t - r) < BigFloat("1e-30")) t = r;
  return BigFloat(value) > t;
}

}  // namespace detail

/// Pointwise grid regularity: n^alpha < a, b < n - n^alpha (strict).
inline bool is_alpha_regular(std::int64_t n, std::int64_t a, std::int64_t b, double alpha) {
  return detail::exceeds_power(a, n, alpha) && detail::exceeds_power(n - a, n, alpha) &&
         detail::exceeds_power(b, n, alpha) && detail::exceeds_power(n - b, n, alpha);
}

/// Grid regularity: every gap adot_i, bdot_j > n^alpha.
inline bool is_alpha_regular(const GridSpec& g, double alpha) {
  for (std::int64_t i = 1; i <= g.I(); ++i)
    if (!detail::exceeds_power(g.adot(i), g.n, alpha)) return false;
  for (std::int64_t j = 1; j <= g.J(); ++j)
    if (!detail::exceeds_power(g.bdot(j), g.n, alpha)) return false;
  return true;
}

/// Pointwise normalized blocking: lhat = (c - ab/n)/sqrt(n) on the lattice
/// L_g = (Z - ab/n)/sqrt(n).
struct PointwiseNormalized {
  std::int64_t n = 0, a = 0, b = 0;
  double lhat = 0.0;
};

inline PointwiseNormalized normalize(const Blocking& bl) {
  validate_blocking(bl);
  long double num = static_cast<long double>(bl.c) * bl.n - static_cast<long double>(bl.a) * bl.b;
  long double lhat = num / (static_cast<long double>(bl.n) * sqrtl(static_cast<long double>(bl.n)));
  return {bl.n, bl.a, bl.b, static_cast<double>(lhat)};
}

/// The count c with lhat = (c - ab/n)/sqrt(n), or nullopt if lhat is not on
/// the lattice (tolerance 1e-10 after unscaling to integers).
inline std::optional<std::int64_t> count_from_lhat(const PointwiseNormalized& nb) {
  long double x = static_cast<long double>(nb.lhat) * sqrtl(static_cast<long double>(nb.n)) +
                  static_cast<long double>(nb.a) * nb.b / nb.n;
  long double r = roundl(x);
  if (fabsl(x - r) > 1e-10L) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

/// (alpha,eta)-standard, pointwise: params in Delta_1, alpha-regular grid,
/// lhat on the lattice and |lhat| < n^eta (strict).
inline bool is_standard(const PointwiseNormalized& nb, const RegularityParams& p) {
  if (!in_delta1(p)) throw std::invalid_argument("is_standard: (alpha,eta) outside Delta_1");
  if (!is_alpha_regular(nb.n, nb.a, nb.b, p.alpha)) return false;
  if (!count_from_lhat(nb)) return false;
  double window = std::pow(static_cast<double>(nb.n), p.eta);
  return std::abs(nb.lhat) < window;
}

/// Grid normalized blocking: tl_{ij} with
/// chat_{ij} = ahat_i bhat_j + sqrt(ahat_i bhat_j / n) tl_{ij}.
struct GridNormalized {
  GridSpec grid;
  Matrix<double> tl;
};

inline GridNormalized normalize(const GridBlocking& gb) {
  validate_grid_blocking(gb);
  auto I = gb.grid.I(), J = gb.grid.J();
  GridNormalized r{gb.grid, Matrix<double>(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0.0)};
  for (std::int64_t i = 1; i <= I; ++i)
    for (std::int64_t j = 1; j <= J; ++j) {
      long double num = static_cast<long double>(gb.cdot(i - 1, j - 1)) * gb.grid.n -
                        static_cast<long double>(gb.grid.adot(i)) * gb.grid.bdot(j);
      long double w = static_cast<long double>(gb.grid.adot(i)) * gb.grid.bdot(j);
      // tl = (cdot n - adot bdot) / (sqrt(n) sqrt(adot bdot))
      r.tl(i - 1, j - 1) = static_cast<double>(num / (sqrtl(static_cast<long double>(gb.grid.n)) * sqrtl(w)));
    }
  return r;
}

/// Box counts for a grid-lattice point, or nullopt when some entry is off
/// the per-entry lattice.  Counts may be negative: the lattice is infinite,
/// feasibility is a separate question.
inline std::optional<Matrix<std::int64_t>> counts_from_normalized(const GridNormalized& nb) {
  auto I = nb.grid.I(), J = nb.grid.J();
  Matrix<std::int64_t> c(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0);
  for (std::int64_t i = 1; i <= I; ++i)
    for (std::int64_t j = 1; j <= J; ++j) {
      long double w = static_cast<long double>(nb.grid.adot(i)) * nb.grid.bdot(j);
      long double x = w / nb.grid.n + sqrtl(w) * static_cast<long double>(nb.tl(i - 1, j - 1)) /
                                          sqrtl(static_cast<long double>(nb.grid.n));
      long double r = roundl(x);
      if (fabsl(x - r) > 1e-6L) return std::nullopt;
      c(i - 1, j - 1) = static_cast<std::int64_t>(r);
    }
  return c;
}

/// V_g membership: sum_i sqrt(ahat_i) tl_{ij} = 0 and sum_j sqrt(bhat_j)
/// tl_{ij} = 0, within tol.
inline bool in_Vg(const GridNormalized& nb, double tol = 1e-10) {
  auto I = nb.grid.I(), J = nb.grid.J();
  for (std::int64_t j = 0; j < J; ++j) {
    double s = 0;
    for (std::int64_t i = 0; i < I; ++i) s += std::sqrt(nb.grid.ahat(i + 1)) * nb.tl(i, j);
    if (std::abs(s) > tol) return false;
  }
  for (std::int64_t i = 0; i < I; ++i) {
    double s = 0;
    for (std::int64_t j = 0; j < J; ++j) s += std::sqrt(nb.grid.bhat(j + 1)) * nb.tl(i, j);
    if (std::abs(s) > tol) return false;
  }
  return true;
}

/// (alpha,eta)-standard, grid form: params in Delta_2, alpha-regular grid,
/// lattice membership, every |tl_{ij}| < n^eta.
inline bool is_standard(const GridNormalized& nb, const RegularityParams& p) {
  if (!in_delta2(p)) throw std::invalid_argument("is_standard: (alpha,eta) outside Delta_2");
  if (!is_alpha_regular(nb.grid, p.alpha)) return false;
  auto counts = counts_from_normalized(nb);
  if (!counts) return false;
  double window = std::pow(static_cast<double>(nb.grid.n), p.eta);
  for (auto v : nb.tl.data())
    if (!(std::abs(v) < window)) return false;
  return true;
}

struct ApproxRatio {
  double exact_log_p = 0.0;
  double approx_log_p = 0.0;
  double exact_p = 0.0;
  double approx_p = 0.0;
  double ratio = 0.0;
  bool standard = false;
  std::string reason;
};

/// Pointwise Gaussian approximation: P ~ ga_C(lhat)/sqrt(n) with
/// C = ahat1 ahat2 bhat1 bhat2.  All three values are returned so audits can
/// log divergences instead of silently passing.
inline ApproxRatio gaussian_approx_ratio(const Blocking& bl, const RegularityParams& p) {
  validate_blocking(bl);
  PointwiseNormalized nb = normalize(bl);
  double n = static_cast<double>(bl.n);
  double CC = (static_cast<double>(bl.a) / n) * (1.0 - static_cast<double>(bl.a) / n) *
              (static_cast<double>(bl.b) / n) * (1.0 - static_cast<double>(bl.b) / n);
  ApproxRatio r;
  r.exact_log_p = log_blocking_prob(bl);
  r.approx_log_p = -0.5 * std::log(2.0 * std::numbers::pi * CC * n) - nb.lhat * nb.lhat / (2.0 * CC);
  r.exact_p = std::exp(r.exact_log_p);
  r.approx_p = std::exp(r.approx_log_p);
  r.ratio = std::exp(r.exact_log_p - r.approx_log_p);
  r.standard = is_standard(nb, p);
  if (!r.standard) r.reason = "blocking is not (alpha,eta)-standard";
  return r;
}

/// Grid version: P ~ (2 pi n)^{-(I-1)(J-1)/2} (Ca^{J-1} Cb^{I-1})^{-1/2}
/// exp(-|tl|^2/2).
inline ApproxRatio gaussian_approx_ratio(const GridBlocking& gb, const RegularityParams& p) {
  GridNormalized nb = normalize(gb);
  auto I = gb.grid.I(), J = gb.grid.J();
  double n = static_cast<double>(gb.grid.n);
  double logCa = 0, logCb = 0, tl2 = 0;
  for (std::int64_t i = 1; i <= I; ++i) logCa += std::log(gb.grid.ahat(i));
  for (std::int64_t j = 1; j <= J; ++j) logCb += std::log(gb.grid.bhat(j));
  for (auto v : nb.tl.data()) tl2 += v * v;
  ApproxRatio r;
  r.exact_log_p = log_grid_blocking_prob(gb);
  r.approx_log_p = -0.5 * static_cast<double>((I - 1) * (J - 1)) * std::log(2.0 * std::numbers::pi * n) -
                   0.5 * (static_cast<double>(J - 1) * logCa + static_cast<double>(I - 1) * logCb) -
                   0.5 * tl2;
  r.exact_p = std::exp(r.exact_log_p);
  r.approx_p = std::exp(r.approx_log_p);
  r.ratio = std::exp(r.exact_log_p - r.approx_log_p);
  r.standard = is_standard(nb, p);
  if (!r.standard) r.reason = "grid blocking is not (alpha,eta)-standard";
  return r;
}

/// Checked variant: rejects non-standard blockings.
template <typename B>
inline ApproxRatio gaussian_approx_ratio_checked(const B& bl, const RegularityParams& p) {
  ApproxRatio r = gaussian_approx_ratio(bl, p);
  if (!r.standard) throw std::invalid_argument("gaussian_approx_ratio: " + r.reason);
  return r;
}

/// Upper bound exp(-H^2/2)/H for Pr[|Y_{n,a,b}| > H sqrt(C n)], valid on
/// H in (1, h_max) with h_max = 2 n^eta.
inline double tail_bound(double H, double h_max) {
  if (!(H > 1.0) || !(H < h_max))
    throw std::invalid_argument("tail_bound: H must lie in (1, 2 n^eta)");
  return std::exp(-H * H / 2.0) / H;
}

/// The gamma-grid: m = floor(n^(1-gamma)) cuts with near-equal gaps
/// a_i = floor(i n / m + 1/2).  gamma in (5/6, 1) is the asymptotic regime;
/// smaller gamma is allowed for desk-scale work and flagged.
struct GammaGrid {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::int64_t m = 0;
  std::vector<std::int64_t> nodes;  // a_0 .. a_m
  bool paper_regime = false;        // gamma in (5/6, 1)

  GridSpec to_grid() const { return GridSpec{n, nodes, nodes}; }
};

inline GammaGrid build_gamma_grid(std::int64_t n, double gamma) {
  if (n < 2 || !(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("build_gamma_grid: need n >= 2 and gamma in (0,1)");
  long double t = expl((1.0L - static_cast<long double>(gamma)) * logl(static_cast<long double>(n)));
  long double r = roundl(t);
  if (fabsl(t - r) < 1e-9L) t = r;
  auto m = static_cast<std::int64_t>(floorl(t));
  if (m < 2) throw std::invalid_argument("build_gamma_grid: m = floor(n^(1-gamma)) < 2, grid degenerates");
  GammaGrid g;
  g.n = n;
  g.gamma = gamma;
  g.m = m;
  g.paper_regime = gamma > 5.0 / 6.0;
  g.nodes.resize(static_cast<std::size_t>(m) + 1);
  for (std::int64_t i = 0; i <= m; ++i) {
    __int128 num = static_cast<__int128>(2) * i * n + m;
    g.nodes[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(num / (2 * m));
  }
  // Gaps differ from n/m by less than 1 by construction; fail loudly if not.
  for (std::int64_t i = 1; i <= m; ++i) {
    long double gap = static_cast<long double>(g.nodes[static_cast<std::size_t>(i)] -
                                               g.nodes[static_cast<std::size_t>(i - 1)]);
    if (fabsl(gap - static_cast<long double>(n) / m) >= 1.0L)
      throw std::logic_error("build_gamma_grid: gap invariant violated");
  }
  return g;
}

struct GammaGridLogProb {
  double approx_log_p = 0.0;  // C_n - |tl|^2 / 2
  double exact_log_p = 0.0;
  double c_n = 0.0;
};

/// C_n as a function of (m, gamma, log n); usable at scales where the grid
/// itself is far beyond desk range.
inline double gamma_grid_constant(std::int64_t m, double gamma, double log_n) {
  double md = static_cast<double>(m);
  return -0.5 * (md - 1) * (md - 1) * std::log(2.0 * std::numbers::pi) +
         ((md * md - 1) / 2.0 - md * (md - 1) * gamma) * log_n;
}

/// C_n = -((m-1)^2/2) log(2 pi) + ((m^2-1)/2 - m(m-1) gamma) log n, the
/// grid-wide normalizing constant; approx = C_n - |tl|^2/2 compared against
/// the exact log probability.
inline GammaGridLogProb log_prob_gamma_grid(const GammaGrid& gg, const Matrix<double>& tl, double eta) {
  double window = std::pow(static_cast<double>(gg.n), eta);
  for (auto v : tl.data())
    if (!(std::abs(v) < window))
      throw std::invalid_argument("log_prob_gamma_grid: tl outside the |tl_ij| < n^eta window");
  GridNormalized nb{gg.to_grid(), tl};
  auto counts = counts_from_normalized(nb);
  if (!counts) throw std::invalid_argument("log_prob_gamma_grid: tl is not a lattice point");
  GridBlocking gb{gg.to_grid(), *counts};
  double cn = gamma_grid_constant(gg.m, gg.gamma, std::log(static_cast<double>(gg.n)));
  double tl2 = 0;
  for (auto v : tl.data()) tl2 += v * v;
  return {cn - tl2 / 2.0, log_grid_blocking_prob(gb), cn};
}

struct LatticePoint {
  Matrix<std::int64_t> cdot;  // integer box counts (possibly negative)
  Matrix<double> tl;
};

/// Constructive rounding of z in V_g to a nearby lattice point (usually not
/// the nearest one): round the leading (I-1)x(J-1) block entrywise, then
/// solve the V_g equations for the last column, last row and corner.  Done
/// in count space, so the result is exactly on the lattice.
inline LatticePoint nearest_lattice_point(const Matrix<double>& z, const GridSpec& g) {
  auto I = g.I(), J = g.J();
  if (z.rows() != static_cast<std::size_t>(I) || z.cols() != static_cast<std::size_t>(J))
    throw std::invalid_argument("nearest_lattice_point: z shape does not match grid");
  LatticePoint r;
  r.cdot.assign(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0);
  double n = static_cast<double>(g.n);
  for (std::int64_t i = 0; i < I - 1; ++i)
    for (std::int64_t j = 0; j < J - 1; ++j) {
      double w = g.ahat(i + 1) * g.bhat(j + 1);
      double x = w * n + std::sqrt(n * w) * z(i, j);
      r.cdot(i, j) = static_cast<std::int64_t>(std::llround(x));
    }
  for (std::int64_t i = 0; i < I - 1; ++i) {
    std::int64_t s = 0;
    for (std::int64_t j = 0; j < J - 1; ++j) s += r.cdot(i, j);
    r.cdot(i, J - 1) = g.adot(i + 1) - s;
  }
  for (std::int64_t j = 0; j < J; ++j) {
    std::int64_t s = 0;
    for (std::int64_t i = 0; i < I - 1; ++i) s += r.cdot(i, j);
    r.cdot(I - 1, j) = g.bdot(j + 1) - s;
  }
  r.tl.assign(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0.0);
  for (std::int64_t i = 0; i < I; ++i)
    for (std::int64_t j = 0; j < J; ++j) {
      long double w = static_cast<long double>(g.adot(i + 1)) * g.bdot(j + 1);
      long double num = static_cast<long double>(r.cdot(i, j)) * g.n - w;
      r.tl(i, j) = static_cast<double>(num / (sqrtl(static_cast<long double>(g.n)) * sqrtl(w)));
    }
  return r;
}

}  // namespace copula
