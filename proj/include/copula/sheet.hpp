#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "copula/common.hpp"
#include "copula/gaussian_limit.hpp"
#include "copula/interpolate.hpp"
#include "copula/rng.hpp"

namespace copula {

/// Partition of [0,1]^2 carrying a bridged-sheet sample.  sqrt_du is a unit
/// vector (the du sum to 1), which is what makes the V_g projection a pair
/// of rank-one updates.
struct SheetGrid {
  std::vector<double> u, v;  // 0 = u_0 < ... < u_I = 1
  std::vector<double> du, dv, sqrt_du, sqrt_dv;

  std::int64_t I() const { return static_cast<std::int64_t>(du.size()); }
  std::int64_t J() const { return static_cast<std::int64_t>(dv.size()); }

  static SheetGrid make(std::vector<double> us, std::vector<double> vs) {
    auto check = [](const std::vector<double>& k) {
      if (k.size() < 2 || k.front() != 0.0 || k.back() != 1.0)
        throw std::invalid_argument("sheet grid: knots must run from 0 to 1");
      for (std::size_t i = 1; i < k.size(); ++i)
        if (!(k[i] > k[i - 1])) throw std::invalid_argument("sheet grid: repeated or decreasing knot");
    };
    check(us);
    check(vs);
    SheetGrid g;
    g.u = std::move(us);
    g.v = std::move(vs);
    auto fill = [](const std::vector<double>& k, std::vector<double>& d, std::vector<double>& sq) {
      d.resize(k.size() - 1);
      sq.resize(k.size() - 1);
      for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        d[i] = k[i + 1] - k[i];
        sq[i] = std::sqrt(d[i]);
      }
    };
    fill(g.u, g.du, g.sqrt_du);
    fill(g.v, g.dv, g.sqrt_dv);
    return g;
  }

  static SheetGrid uniform(std::int64_t I, std::int64_t J) {
    if (I < 1 || J < 1) throw std::invalid_argument("sheet grid: need I, J >= 1");
    std::vector<double> us(static_cast<std::size_t>(I) + 1), vs(static_cast<std::size_t>(J) + 1);
    for (std::int64_t i = 0; i <= I; ++i) us[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(I);
    for (std::int64_t j = 0; j <= J; ++j) vs[static_cast<std::size_t>(j)] = static_cast<double>(j) / static_cast<double>(J);
    us.back() = 1.0;
    vs.back() = 1.0;
    return make(std::move(us), std::move(vs));
  }

  static SheetGrid from_gamma(const GammaGrid& gg) {
    std::vector<double> us(gg.nodes.size());
    for (std::size_t i = 0; i < gg.nodes.size(); ++i)
      us[i] = static_cast<double>(gg.nodes[i]) / static_cast<double>(gg.n);
    auto vs = us;
    return make(std::move(us), std::move(vs));
  }
};

/// Orthogonal projection onto V_g = {z : sum_i sqrt(du_i) z_{ij} = 0,
/// sum_j sqrt(dv_j) z_{ij} = 0}.  The two constraint families are killed by
/// the commuting rank-one updates z -> (I - pp^T) z (I - qq^T) with
/// p = sqrt_du, q = sqrt_dv (both unit vectors), so the projection costs
/// O(IJ) instead of a cached (IJ)^2 projector.
inline void project_to_Vg_inplace(Matrix<double>& z, const SheetGrid& g) {
  auto I = static_cast<std::size_t>(g.I()), J = static_cast<std::size_t>(g.J());
  if (z.rows() != I || z.cols() != J) throw std::invalid_argument("project_to_Vg: shape mismatch");
  for (std::size_t j = 0; j < J; ++j) {
    double dot = 0;
    for (std::size_t i = 0; i < I; ++i) dot += g.sqrt_du[i] * z(i, j);
    for (std::size_t i = 0; i < I; ++i) z(i, j) -= g.sqrt_du[i] * dot;
  }
  for (std::size_t i = 0; i < I; ++i) {
    double dot = 0;
    for (std::size_t j = 0; j < J; ++j) dot += g.sqrt_dv[j] * z(i, j);
    for (std::size_t j = 0; j < J; ++j) z(i, j) -= g.sqrt_dv[j] * dot;
  }
}

inline Matrix<double> project_to_Vg(Matrix<double> z, const SheetGrid& g) {
  project_to_Vg_inplace(z, g);
  return z;
}

/// Node values from projected increments:
/// f(u_i, v_j) = sum_{i'<=i, j'<=j} sqrt(du_{i'} dv_{j'}) tz_{i'j'}.
/// Boundary nodes are exactly 0: the top/right edges vanish by the V_g
/// constraints and are pinned after the float prefix sums.
inline Matrix<double> sheet_values_from_tz(const Matrix<double>& tz, const SheetGrid& g) {
  auto I = static_cast<std::size_t>(g.I()), J = static_cast<std::size_t>(g.J());
  Matrix<double> f(I + 1, J + 1, 0.0);
  for (std::size_t i = 1; i <= I; ++i) {
    double rowsum = 0;
    for (std::size_t j = 1; j <= J; ++j) {
      rowsum += g.sqrt_du[i - 1] * g.sqrt_dv[j - 1] * tz(i - 1, j - 1);
      f(i, j) = f(i - 1, j) + rowsum;
    }
  }
  for (std::size_t i = 0; i <= I; ++i) f(i, J) = 0.0;
  for (std::size_t j = 0; j <= J; ++j) f(I, j) = 0.0;
  return f;
}

struct SheetSample {
  Matrix<double> z;   // raw iid N(0,1), I x J
  Matrix<double> tz;  // projection onto V_g
  Matrix<double> f;   // node values, (I+1) x (J+1), zero on the boundary
};

/// Joint-normal sampler for bridged-sheet values on a grid (route A).
inline SheetSample sample_sheet_grid(const SheetGrid& g, Rng& rng) {
  auto I = static_cast<std::size_t>(g.I()), J = static_cast<std::size_t>(g.J());
  SheetSample s;
  s.z.assign(I, J, 0.0);
  for (auto& v : s.z.data()) v = rng.normal();
  s.tz = s.z;
  project_to_Vg_inplace(s.tz, g);
  s.f = sheet_values_from_tz(s.tz, g);
  return s;
}

/// f(u,v) = f*(u,v) - u f*(1,v) - v f*(u,1) + uv f*(1,1): selects the
/// bridged sheet from plain-sheet values given on the full node grid.
inline Matrix<double> bridge_from_sheet(const Matrix<double>& fstar, const SheetGrid& g) {
  auto I = static_cast<std::size_t>(g.I()), J = static_cast<std::size_t>(g.J());
  if (fstar.rows() != I + 1 || fstar.cols() != J + 1)
    throw std::invalid_argument("bridge_from_sheet: shape mismatch");
  Matrix<double> f(I + 1, J + 1, 0.0);
  for (std::size_t i = 0; i <= I; ++i)
    for (std::size_t j = 0; j <= J; ++j) {
      double u = g.u[i], v = g.v[j];
      f(i, j) = fstar(i, j) - u * fstar(I, j) - v * fstar(i, J) + u * v * fstar(I, J);
    }
  return f;
}

/// Route B: cumulative sums of iid normals scaled by cell areas give the
/// plain sheet at the nodes; bridging then matches route A in law.
inline Matrix<double> sample_sheet_via_bridge(const SheetGrid& g, Rng& rng) {
  auto I = static_cast<std::size_t>(g.I()), J = static_cast<std::size_t>(g.J());
  Matrix<double> fstar(I + 1, J + 1, 0.0);
  for (std::size_t i = 1; i <= I; ++i) {
    double rowsum = 0;
    for (std::size_t j = 1; j <= J; ++j) {
      rowsum += g.sqrt_du[i - 1] * g.sqrt_dv[j - 1] * rng.normal();
      fstar(i, j) = fstar(i - 1, j) + rowsum;
    }
  }
  return bridge_from_sheet(fstar, g);
}

/// Cov(f(u1,v1), f(u2,v2)) = (min(u1,u2) - u1 u2)(min(v1,v2) - v1 v2).
inline double sheet_covariance_oracle(double u1, double v1, double u2, double v2) {
  return (std::min(u1, u2) - u1 * u2) * (std::min(v1, v2) - v1 * v2);
}

inline BilinearGrid sheet_field(const SheetSample& s, const SheetGrid& g) {
  return BilinearGrid{g.u, g.v, s.f};
}

struct HolderParams {
  double r = 0.0;      // probe radius: pairs with |du|,|dv| < r
  double delta = 0.0;  // exponent defect: threshold C (|du|+|dv|)^(1/2-delta)
  double c = 0.0;
};

struct HolderResult {
  bool ok = true;
  double u0 = 0, v0 = 0, u1 = 0, v1 = 0;  // worst probed pair
  double diff = 0, bound = 0;
};

/// Empirical Holder predicate for a continuous field: probes a lattice of
/// node pairs plus random pairs at separations below r.  A surrogate for the
/// almost-sure statement; the continuum cannot be checked exhaustively.
template <typename Field>
HolderResult holder_check_function(const Field& field, const HolderParams& hp, Rng& rng,
                                   std::int64_t lattice_size = 33, std::int64_t random_pairs = 10000) {
  if (!(hp.r > 0) || !(hp.delta > 0) || !(hp.c > 0))
    throw std::invalid_argument("holder_check_function: parameters must be positive");
  HolderResult res;
  double exponent = 0.5 - hp.delta;
  auto probe = [&](double u0, double v0, double u1, double v1) {
    double diff = std::abs(field(u0, v0) - field(u1, v1));
    double bound = hp.c * std::pow(std::abs(u0 - u1) + std::abs(v0 - v1), exponent);
    if (res.ok && diff >= bound) res = {false, u0, v0, u1, v1, diff, bound};
  };
  double step = 1.0 / static_cast<double>(lattice_size - 1);
  for (std::int64_t i = 0; i < lattice_size && res.ok; ++i)
    for (std::int64_t j = 0; j < lattice_size && res.ok; ++j) {
      double u0 = static_cast<double>(i) * step, v0 = static_cast<double>(j) * step;
      for (std::int64_t di = 0; di * step < hp.r && i + di < lattice_size; ++di)
        for (std::int64_t dj = 0; dj * step < hp.r && j + dj < lattice_size; ++dj) {
          if (di == 0 && dj == 0) continue;
          probe(u0, v0, u0 + static_cast<double>(di) * step, v0 + static_cast<double>(dj) * step);
        }
    }
  for (std::int64_t k = 0; k < random_pairs && res.ok; ++k) {
    double u0 = rng.uniform01(), v0 = rng.uniform01();
    double u1 = std::clamp(u0 + rng.uniform(-hp.r, hp.r), 0.0, 1.0);
    double v1 = std::clamp(v0 + rng.uniform(-hp.r, hp.r), 0.0, 1.0);
    if (u0 == u1 && v0 == v1) continue;
    probe(u0, v0, u1, v1);
  }
  return res;
}

}  // namespace copula
