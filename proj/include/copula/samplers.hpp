#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "copula/birkhoff.hpp"
#include "copula/common.hpp"
#include "copula/permutation.hpp"
#include "copula/rng.hpp"

namespace copula {

/// One 2x2 rectangle move on a doubly stochastic matrix: pick rows i1<i2 and
/// columns j1<j2, add delta to the (i1,j1),(i2,j2) corners and subtract it
/// from the other two, with delta uniform on the exact feasibility interval
/// [-min(M_{i1,j1}, M_{i2,j2}), +min(M_{i1,j2}, M_{i2,j1})].  The interval
/// length is invariant under the move, so the proposal is symmetric and the
/// chain samples Lebesgue measure on the Birkhoff polytope with no
/// accept/reject step.  A zero-width interval degenerates to a no-op.
inline void metropolis_move(Matrix<double>& M, Rng& rng) {
  auto n = static_cast<std::int64_t>(M.rows());
  if (n < 2) return;
  auto i1 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
  auto i2 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
  if (i2 >= i1) ++i2; else std::swap(i1, i2);
  auto j1 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
  auto j2 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
  if (j2 >= j1) ++j2; else std::swap(j1, j2);
  double lo = -std::min(M(i1, j1), M(i2, j2));
  double hi = std::min(M(i1, j2), M(i2, j1));
  if (!(hi > lo)) return;
  double d = rng.uniform(lo, hi);
  M(i1, j1) += d;
  M(i2, j2) += d;
  M(i1, j2) -= d;
  M(i2, j1) -= d;
  // clip float dust so entries stay inside the polytope
  M(i1, j1) = std::max(M(i1, j1), 0.0);
  M(i2, j2) = std::max(M(i2, j2), 0.0);
  M(i1, j2) = std::max(M(i1, j2), 0.0);
  M(i2, j1) = std::max(M(i2, j1), 0.0);
}

/// Feasibility interval length at the current state for a given rectangle;
/// used by the proposal-symmetry checks.
inline double move_interval_length(const Matrix<double>& M, std::int64_t i1, std::int64_t i2,
                                   std::int64_t j1, std::int64_t j2) {
  return std::min(M(i1, j1), M(i2, j2)) + std::min(M(i1, j2), M(i2, j1));
}

struct McmcConfig {
  std::int64_t n = 2;
  std::int64_t burnin = -1;           // default n^3 moves
  std::int64_t thin = -1;             // default n^2 moves between samples
  std::string move_policy = "full-interval";
  std::uint64_t seed = 1;
};

/// Random-walk sampler for the uniform (Lebesgue) measure on the Birkhoff
/// polytope.  Starts at the barycenter (all entries 1/n).
class BirkhoffSampler {
 public:
  explicit BirkhoffSampler(const McmcConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed), M_(static_cast<std::size_t>(cfg.n), static_cast<std::size_t>(cfg.n),
                                      1.0 / static_cast<double>(cfg.n)) {
    if (cfg_.n < 2) throw std::invalid_argument("BirkhoffSampler: need n >= 2");
    if (cfg_.move_policy != "full-interval")
      throw std::invalid_argument("BirkhoffSampler: unknown move policy " + cfg_.move_policy);
    if (cfg_.burnin < 0) cfg_.burnin = cfg_.n * cfg_.n * cfg_.n;
    if (cfg_.thin < 1) cfg_.thin = cfg_.n * cfg_.n;
    for (std::int64_t s = 0; s < cfg_.burnin; ++s) metropolis_move(M_, rng_);
  }

  const Matrix<double>& state() const { return M_; }

  const Matrix<double>& next_matrix() {
    for (std::int64_t s = 0; s < cfg_.thin; ++s) metropolis_move(M_, rng_);
    return M_;
  }

  BirkhoffCopula next() { return birkhoff_copula_from_matrix(next_matrix(), 1e-9); }

 private:
  McmcConfig cfg_;
  Rng rng_;
  Matrix<double> M_;
};

/// Chain state after burn-in and one thinning stride, integrated to a
/// Birkhoff copula.
inline BirkhoffCopula sample_birkhoff_uniform(const McmcConfig& cfg) {
  BirkhoffSampler sampler(cfg);
  return sampler.next();
}

}  // namespace copula
