#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "copula/blocking.hpp"
#include "copula/blocking_prob.hpp"
#include "copula/gaussian_limit.hpp"
#include "copula/permutation.hpp"
#include "copula/rng.hpp"
#include "copula/sheet.hpp"
#include "copula/stats.hpp"

namespace copula {

/// Voronoi decomposition of V_g by the lattice window L_{g,eta}, with the
/// Gaussian cell measures mu(R_l) and the exact probabilities P(g,l).
///
/// m = 2: V_g is one-dimensional, cells are midpoint intervals in the tau
/// coordinate and mu is exact via the normal CDF; the escape (out-of-window)
/// conditional is tabulated exactly as well.
/// m = 3: the window is enumerated; mu comes from one Monte Carlo
/// classification pass (nearest lattice point by local search around the
/// constructive rounding).  Larger m has no desk-scale window enumeration.
struct VoronoiAssignment {
  GammaGrid gamma_grid;
  GridSpec grid;
  SheetGrid sheet;
  double eta = 0.0;
  std::int64_t m = 0;

  std::vector<Matrix<std::int64_t>> window_counts;
  std::vector<double> p;   // exact P(g,l) per window point
  std::vector<double> mu;  // mu(R_l) per window point
  double p_escape = 0.0;
  double mu_escape = 0.0;

  // maximal-coupling excess distribution (window points, then escape)
  std::vector<double> excess_cdf;
  double excess_total = 0.0;

  // m == 2 machinery: the tau coordinate on V_g
  Matrix<double> basis;  // unit basis vector e of V_g (2x2)
  std::int64_t c_lo = 0, c_hi = 0;          // full feasible c range
  std::int64_t win_lo = 0, win_hi = 0;      // window c range
  double tau0 = 0.0, dtau = 0.0;            // tau = tau0 + (c - c_lo) * dtau
  std::vector<double> full_p;               // P over the full c range
  std::vector<double> escape_cdf;           // CDF over out-of-window c

  // m == 3 classification index: leading-block key -> window index
  std::map<std::vector<std::int64_t>, std::size_t> window_index;

  std::size_t window_size() const { return window_counts.size(); }
};

namespace detail {

inline std::vector<std::int64_t> leading_key(const Matrix<std::int64_t>& counts, std::int64_t m) {
  std::vector<std::int64_t> key;
  key.reserve(static_cast<std::size_t>((m - 1) * (m - 1)));
  for (std::int64_t i = 0; i < m - 1; ++i)
    for (std::int64_t j = 0; j < m - 1; ++j) key.push_back(counts(i, j));
  return key;
}

inline double tl_norm2_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a.data()[k] - b.data()[k];
    s += d * d;
  }
  return s;
}

// Lattice point from leading-block counts: remaining entries solved from the
// margins exactly as in nearest_lattice_point.
inline LatticePoint lattice_from_leading(const std::vector<std::int64_t>& key, const GridSpec& g) {
  auto I = g.I(), J = g.J();
  LatticePoint r;
  r.cdot.assign(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0);
  for (std::int64_t i = 0; i < I - 1; ++i)
    for (std::int64_t j = 0; j < J - 1; ++j)
      r.cdot(i, j) = key[static_cast<std::size_t>(i * (J - 1) + j)];
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

// Nearest lattice point to z by +-1 local search of the leading block around
// the constructive rounding.  Exact Voronoi classification in dimension
// (m-1)^2 would be a closest-vector search; for the near-cubic gamma-grid
// lattices the one-step neighborhood decides it.
inline LatticePoint nearest_by_search(const Matrix<double>& z, const GridSpec& g) {
  auto I = g.I(), J = g.J();
  LatticePoint seed = nearest_lattice_point(z, g);
  std::int64_t free_dims = (I - 1) * (J - 1);
  if (free_dims > 9)
    throw std::invalid_argument("voronoi classification unsupported beyond m = 4 free blocks");
  std::vector<std::int64_t> key = leading_key(seed.cdot, I);
  LatticePoint best = seed;
  double best_d = tl_norm2_diff(z, seed.tl);
  std::vector<std::int64_t> offset(static_cast<std::size_t>(free_dims), -1);
  for (;;) {
    std::vector<std::int64_t> cand = key;
    bool all_zero = true;
    for (std::int64_t k = 0; k < free_dims; ++k) {
      cand[static_cast<std::size_t>(k)] += offset[static_cast<std::size_t>(k)];
      if (offset[static_cast<std::size_t>(k)] != 0) all_zero = false;
    }
    if (!all_zero) {
      LatticePoint lp = lattice_from_leading(cand, g);
      double d = tl_norm2_diff(z, lp.tl);
      if (d < best_d) {
        best_d = d;
        best = std::move(lp);
      }
    }
    std::int64_t k = 0;
    while (k < free_dims && offset[static_cast<std::size_t>(k)] == 1) offset[static_cast<std::size_t>(k++)] = -1;
    if (k == free_dims) break;
    ++offset[static_cast<std::size_t>(k)];
  }
  return best;
}

}  // namespace detail

inline VoronoiAssignment build_voronoi_assignment(std::int64_t n, double gamma, double eta,
                                                  std::uint64_t mu_mc_samples = 100000,
                                                  std::uint64_t mu_seed = 0x5eed0123456789abULL) {
  VoronoiAssignment va;
  va.gamma_grid = build_gamma_grid(n, gamma);
  va.grid = va.gamma_grid.to_grid();
  va.sheet = SheetGrid::from_gamma(va.gamma_grid);
  va.eta = eta;
  va.m = va.gamma_grid.m;
  LogFactorialTable::instance().ensure(static_cast<std::size_t>(n));
  double window = std::pow(static_cast<double>(n), eta);

  if (va.m == 2) {
    std::int64_t a = va.grid.a[1], b = va.grid.b[1];
    va.c_lo = std::max<std::int64_t>(0, a + b - n);
    va.c_hi = std::min(a, b);
    // unit basis of the one-dimensional V_g
    va.basis.assign(2, 2, 0.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        va.basis(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0) *
                         std::sqrt(va.grid.ahat(2 - i) * va.grid.bhat(2 - j));
    double CC = va.grid.ahat(1) * va.grid.ahat(2) * va.grid.bhat(1) * va.grid.bhat(2);
    auto tau_of_c = [&](std::int64_t c) {
      long double num = static_cast<long double>(c) * n - static_cast<long double>(a) * b;
      long double lhat = num / (static_cast<long double>(n) * sqrtl(static_cast<long double>(n)));
      return static_cast<double>(lhat / sqrtl(static_cast<long double>(CC)));
    };
    va.tau0 = tau_of_c(va.c_lo);
    va.dtau = tau_of_c(va.c_lo + 1) - va.tau0;
    va.full_p.resize(static_cast<std::size_t>(va.c_hi - va.c_lo + 1));
    for (std::int64_t c = va.c_lo; c <= va.c_hi; ++c)
      va.full_p[static_cast<std::size_t>(c - va.c_lo)] = std::exp(log_blocking_prob({n, a, b, c}));
    // window: every |tl_ij| < n^eta, i.e. |tau| * max_ij |e_ij| < n^eta
    double emax = 0;
    for (auto v : va.basis.data()) emax = std::max(emax, std::abs(v));
    double tau_win = window / emax;
    va.win_lo = va.c_hi + 1;
    va.win_hi = va.c_lo - 1;
    for (std::int64_t c = va.c_lo; c <= va.c_hi; ++c) {
      if (std::abs(tau_of_c(c)) < tau_win) {
        va.win_lo = std::min(va.win_lo, c);
        va.win_hi = std::max(va.win_hi, c);
      }
    }
    if (va.win_lo > va.win_hi) throw std::invalid_argument("voronoi window is empty; increase eta");
    for (std::int64_t c = va.win_lo; c <= va.win_hi; ++c) {
      double tau = tau_of_c(c);
      Blocking bl{n, a, b, c};
      auto cd = box_counts(bl);
      Matrix<std::int64_t> counts(2, 2, 0);
      counts(0, 0) = cd[0];
      counts(0, 1) = cd[1];
      counts(1, 0) = cd[2];
      counts(1, 1) = cd[3];
      va.window_counts.push_back(counts);
      va.p.push_back(va.full_p[static_cast<std::size_t>(c - va.c_lo)]);
      va.mu.push_back(normal_cdf(tau + va.dtau / 2.0) - normal_cdf(tau - va.dtau / 2.0));
    }
    double p_in = 0, mu_in = 0;
    for (double x : va.p) p_in += x;
    for (double x : va.mu) mu_in += x;
    va.p_escape = std::max(0.0, 1.0 - p_in);
    va.mu_escape = std::max(0.0, 1.0 - mu_in);
    // exact out-of-window conditional for escape draws
    double tail = 0;
    for (std::int64_t c = va.c_lo; c <= va.c_hi; ++c)
      if (c < va.win_lo || c > va.win_hi) tail += va.full_p[static_cast<std::size_t>(c - va.c_lo)];
    va.escape_cdf.reserve(static_cast<std::size_t>(va.c_hi - va.c_lo + 1));
    double acc = 0;
    for (std::int64_t c = va.c_lo; c <= va.c_hi; ++c) {
      if (c < va.win_lo || c > va.win_hi)
        acc += va.full_p[static_cast<std::size_t>(c - va.c_lo)] / std::max(tail, 1e-300);
      va.escape_cdf.push_back(acc);
    }
  } else {
    if (va.m > 3)
      throw std::invalid_argument("build_voronoi_assignment: window enumeration supported for m <= 3");
    // enumerate the window by the leading (m-1)^2 block
    auto g = va.grid;
    auto I = g.I(), J = g.J();
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;  // count range per free entry
    for (std::int64_t i = 0; i < I - 1; ++i)
      for (std::int64_t j = 0; j < J - 1; ++j) {
        double w = g.ahat(i + 1) * g.bhat(j + 1);
        double center = w * static_cast<double>(n);
        double halfwidth = window * std::sqrt(static_cast<double>(n) * w);
        ranges.emplace_back(static_cast<std::int64_t>(std::ceil(center - halfwidth)),
                            static_cast<std::int64_t>(std::floor(center + halfwidth)));
      }
    double expected = 1;
    for (auto& r : ranges) expected *= static_cast<double>(r.second - r.first + 1);
    if (expected > 2e6)
      throw std::invalid_argument("voronoi window too large to enumerate; reduce eta or n");
    std::vector<std::int64_t> key(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) key[k] = ranges[k].first;
    for (;;) {
      LatticePoint lp = detail::lattice_from_leading(key, g);
      bool inside = true;
      for (auto v : lp.tl.data())
        if (!(std::abs(v) < window)) inside = false;
      bool feasible = true;
      for (auto v : lp.cdot.data())
        if (v < 0) feasible = false;
      if (inside && feasible) {
        va.window_index[key] = va.window_counts.size();
        va.window_counts.push_back(lp.cdot);
        va.p.push_back(std::exp(log_grid_blocking_prob(GridBlocking{g, lp.cdot})));
      }
      std::size_t k = 0;
      while (k < key.size() && key[k] == ranges[k].second) key[k] = ranges[k].first, ++k;
      if (k == key.size()) break;
      ++key[k];
    }
    double p_in = 0;
    for (double x : va.p) p_in += x;
    va.p_escape = std::max(0.0, 1.0 - p_in);
    // one MC classification pass for all cell measures
    va.mu.assign(va.window_counts.size(), 0.0);
    SheetGrid sg = SheetGrid::from_gamma(va.gamma_grid);
    Rng rng(mu_seed);
    std::uint64_t esc = 0;
    for (std::uint64_t s = 0; s < mu_mc_samples; ++s) {
      Matrix<double> z(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0.0);
      for (auto& x : z.data()) x = rng.normal();
      project_to_Vg_inplace(z, sg);
      LatticePoint nearest = detail::nearest_by_search(z, g);
      auto it = va.window_index.find(detail::leading_key(nearest.cdot, I));
      if (it == va.window_index.end())
        ++esc;
      else
        va.mu[it->second] += 1.0;
    }
    for (auto& x : va.mu) x /= static_cast<double>(mu_mc_samples);
    va.mu_escape = static_cast<double>(esc) / static_cast<double>(mu_mc_samples);
  }

  va.excess_cdf.resize(va.window_size() + 1);
  double acc = 0;
  for (std::size_t k = 0; k < va.window_size(); ++k) {
    acc += std::max(0.0, va.p[k] - va.mu[k]);
    va.excess_cdf[k] = acc;
  }
  acc += std::max(0.0, va.p_escape - va.mu_escape);
  va.excess_cdf[va.window_size()] = acc;
  va.excess_total = acc;
  return va;
}

/// mu(R_l): exact via the normal CDF for m = 2, Monte Carlo with reported
/// sampling error otherwise.
inline double cell_measure_mu(const VoronoiAssignment& va, std::size_t window_index) {
  return va.mu.at(window_index);
}

struct CoupleDraw {
  Matrix<double> tz;              // projected Gaussian point in V_g
  Matrix<std::int64_t> counts_h;  // lattice point of tilde-h (box counts)
  Matrix<double> tl_h;
  bool matched = false;  // tz in the Voronoi cell of tilde-h
  bool escaped = false;  // tilde-h drawn from the out-of-window conditional
};

namespace detail {

inline Matrix<double> tl_from_counts(const Matrix<std::int64_t>& counts, const GridSpec& g) {
  Matrix<double> tl(counts.rows(), counts.cols(), 0.0);
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t j = 0; j < counts.cols(); ++j) {
      long double w = static_cast<long double>(g.adot(static_cast<std::int64_t>(i) + 1)) *
                      g.bdot(static_cast<std::int64_t>(j) + 1);
      long double num = static_cast<long double>(counts(i, j)) * g.n - w;
      tl(i, j) = static_cast<double>(num / (sqrtl(static_cast<long double>(g.n)) * sqrtl(w)));
    }
  return tl;
}

}  // namespace detail

/// Joint draw of (tilde-z, tilde-h).  tilde-z is standard normal on V_g;
/// tilde-h keeps the cell of tilde-z with probability min(1, P/mu) and
/// otherwise falls back to the normalized excess (P - mu)+, which realizes
/// the maximal coupling: Pr[matched] = sum_l min(mu(R_l), P(l)) while the
/// tilde-h marginal stays exactly P.
inline CoupleDraw couple(const VoronoiAssignment& va, Rng& rng) {
  auto I = static_cast<std::size_t>(va.m);
  CoupleDraw d;
  d.tz.assign(I, I, 0.0);
  for (auto& x : d.tz.data()) x = rng.normal();
  project_to_Vg_inplace(d.tz, va.sheet);

  // classify tz
  bool in_window = false;
  std::size_t cell = 0;
  if (va.m == 2) {
    double tau = 0;
    for (std::size_t k = 0; k < 4; ++k) tau += d.tz.data()[k] * va.basis.data()[k];
    auto c = static_cast<std::int64_t>(std::llround((tau - va.tau0) / va.dtau)) + va.c_lo;
    if (c >= va.win_lo && c <= va.win_hi) {
      in_window = true;
      cell = static_cast<std::size_t>(c - va.win_lo);
    }
  } else {
    LatticePoint nearest = detail::nearest_by_search(d.tz, va.grid);
    auto it = va.window_index.find(detail::leading_key(nearest.cdot, va.m));
    if (it != va.window_index.end()) {
      in_window = true;
      cell = it->second;
    }
  }

  double u = rng.uniform01();
  double nu = in_window ? va.mu[cell] : va.mu_escape;
  double pp = in_window ? va.p[cell] : va.p_escape;
  bool keep = nu <= 0.0 ? true : u < std::min(1.0, pp / nu);
  std::size_t h_cat;
  if (keep) {
    h_cat = in_window ? cell : va.window_size();
    d.matched = in_window;
  } else {
    double x = rng.uniform01() * va.excess_total;
    h_cat = static_cast<std::size_t>(
        std::lower_bound(va.excess_cdf.begin(), va.excess_cdf.end(), x) - va.excess_cdf.begin());
    if (h_cat > va.window_size()) h_cat = va.window_size();
    d.matched = in_window && h_cat == cell;
  }

  if (h_cat < va.window_size()) {
    d.counts_h = va.window_counts[h_cat];
  } else {
    d.escaped = true;
    if (va.m == 2) {
      double x = rng.uniform01();
      auto k = static_cast<std::size_t>(
          std::lower_bound(va.escape_cdf.begin(), va.escape_cdf.end(), x) - va.escape_cdf.begin());
      if (k >= va.escape_cdf.size()) k = va.escape_cdf.size() - 1;
      std::int64_t c = va.c_lo + static_cast<std::int64_t>(k);
      while (c >= va.win_lo && c <= va.win_hi && c < va.c_hi) ++c;  // skip flat in-window run
      while (c >= va.win_lo && c <= va.win_hi && c > va.c_lo) --c;
      Blocking bl{va.grid.n, va.grid.a[1], va.grid.b[1], c};
      auto cd = box_counts(bl);
      d.counts_h.assign(2, 2, 0);
      d.counts_h(0, 0) = cd[0];
      d.counts_h(0, 1) = cd[1];
      d.counts_h(1, 0) = cd[2];
      d.counts_h(1, 1) = cd[3];
    } else {
      // exact conditional by rejection: box counts of uniform permutations,
      // accepted when outside the window (amortized O(n) per couple)
      double window = std::pow(static_cast<double>(va.grid.n), va.eta);
      for (std::uint64_t tries = 0;; ++tries) {
        if (tries > 1000000) throw std::runtime_error("couple: escape rejection did not terminate");
        Permutation perm = sample_permutation_uniform(va.grid.n, rng);
        auto counts = box_counts(perm, va.grid);
        Matrix<double> tl = detail::tl_from_counts(counts, va.grid);
        bool inside = true;
        for (auto v : tl.data())
          if (!(std::abs(v) < window)) inside = false;
        if (!inside) {
          d.counts_h = counts;
          break;
        }
      }
    }
  }
  d.tl_h = detail::tl_from_counts(d.counts_h, va.grid);
  return d;
}

/// Uniform draw from the permutations whose box counts equal cdot: within
/// each row band the wide-column labels are a shuffled multiset, and within
/// each wide column the assigned rows are shuffled onto the columns.
inline Permutation conditioned_copula_sample(const GridSpec& g, const Matrix<std::int64_t>& cdot,
                                             Rng& rng) {
  validate_grid_blocking(GridBlocking{g, cdot});
  auto I = g.I(), J = g.J();
  Permutation p{g.n, std::vector<std::int32_t>(static_cast<std::size_t>(g.n), 0)};
  std::vector<std::vector<std::int32_t>> rows_in_column(static_cast<std::size_t>(J));
  for (std::int64_t j = 0; j < J; ++j)
    rows_in_column[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(g.bdot(j + 1)));
  std::vector<std::int32_t> labels;
  for (std::int64_t i = 0; i < I; ++i) {
    labels.clear();
    for (std::int64_t j = 0; j < J; ++j)
      labels.insert(labels.end(), static_cast<std::size_t>(cdot(i, j)), static_cast<std::int32_t>(j));
    for (std::size_t k = labels.size(); k > 1; --k)
      std::swap(labels[k - 1], labels[rng.below(k)]);
    std::int64_t row0 = g.a[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < labels.size(); ++k)
      rows_in_column[static_cast<std::size_t>(labels[k])].push_back(
          static_cast<std::int32_t>(row0 + static_cast<std::int64_t>(k) + 1));
  }
  for (std::int64_t j = 0; j < J; ++j) {
    auto& rows = rows_in_column[static_cast<std::size_t>(j)];
    for (std::size_t k = rows.size(); k > 1; --k)
      std::swap(rows[k - 1], rows[rng.below(k)]);
    std::int64_t col0 = g.b[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < rows.size(); ++k)
      p.sigma[static_cast<std::size_t>(rows[k] - 1)] =
          static_cast<std::int32_t>(col0 + static_cast<std::int64_t>(k) + 1);
  }
  return p;
}

struct CoupledSample {
  CoupleDraw draw;
  Permutation perm;           // uniform given the box counts of tilde-h
  Matrix<double> f;           // sheet values from tilde-z at the grid nodes
  Matrix<double> sqrt_n_y;    // sqrt(n) y_n at the grid nodes, from the copula
  double sup_distance = 0.0;  // max over grid nodes |sqrt(n) y_n - f|
  double dist_zh = 0.0;       // |tilde-z - tilde-h|
};

/// Full pipeline: couple, conditioned copula, sheet values from tilde-z, and
/// the sup distance over grid nodes.  When matched, the distance is bounded
/// by 2 |tilde-h - tilde-z|.
inline CoupledSample coupled_run(const VoronoiAssignment& va, Rng& rng) {
  CoupledSample s;
  s.draw = couple(va, rng);
  s.perm = conditioned_copula_sample(va.grid, s.draw.counts_h, rng);
  s.f = sheet_values_from_tz(s.draw.tz, va.sheet);
  auto counts = box_counts(s.perm, va.grid);
  auto I = va.grid.I(), J = va.grid.J();
  Matrix<std::int64_t> cumulative = cumulative_from_counts(GridBlocking{va.grid, counts});
  s.sqrt_n_y.assign(static_cast<std::size_t>(I + 1), static_cast<std::size_t>(J + 1), 0.0);
  double n = static_cast<double>(va.grid.n);
  for (std::int64_t i = 0; i <= I; ++i)
    for (std::int64_t j = 0; j <= J; ++j) {
      double ab = static_cast<double>(va.grid.a[static_cast<std::size_t>(i)]) *
                  static_cast<double>(va.grid.b[static_cast<std::size_t>(j)]);
      s.sqrt_n_y(i, j) = (static_cast<double>(cumulative(i, j)) - ab / n) / std::sqrt(n);
    }
  for (std::size_t k = 0; k < s.f.size(); ++k)
    s.sup_distance = std::max(s.sup_distance, std::abs(s.sqrt_n_y.data()[k] - s.f.data()[k]));
  s.dist_zh = std::sqrt(detail::tl_norm2_diff(s.draw.tl_h, s.draw.tz));
  return s;
}

inline CoupledSample coupled_run(std::int64_t n, double gamma, double eta, Rng& rng) {
  VoronoiAssignment va = build_voronoi_assignment(n, gamma, eta);
  return coupled_run(va, rng);
}

}  // namespace copula
