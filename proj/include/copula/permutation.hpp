#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "copula/rng.hpp"

namespace copula {

/// A permutation of {1..n}: sigma[i-1] is the column of the single 1 in row
/// i of the permutation matrix.  Matrices are never materialized; everything
/// downstream works from the value sequence.
struct Permutation {
  std::int64_t n = 0;
  std::vector<std::int32_t> sigma;
};

inline bool is_permutation(const Permutation& p) {
  if (p.n <= 0 || static_cast<std::int64_t>(p.sigma.size()) != p.n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(p.n) + 1, false);
  for (auto v : p.sigma) {
    if (v < 1 || v > p.n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

inline void validate_permutation(const Permutation& p) {
  if (!is_permutation(p)) throw std::invalid_argument("not a permutation of 1..n");
}

inline Permutation identity_permutation(std::int64_t n) {
  Permutation p{n, {}};
  p.sigma.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) p.sigma[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i + 1);
  return p;
}

/// Unbiased Fisher-Yates shuffle of 1..n.
inline Permutation sample_permutation_uniform(std::int64_t n, Rng& rng) {
  Permutation p = identity_permutation(n);
  for (std::int64_t i = n - 1; i > 0; --i) {
    std::uint64_t j = rng.below(static_cast<std::uint64_t>(i) + 1);
    std::swap(p.sigma[static_cast<std::size_t>(i)], p.sigma[static_cast<std::size_t>(j)]);
  }
  return p;
}

/// C_{a,b}: ones of the permutation matrix in the upper-left a x b corner.
inline std::int64_t count_upper_left(const Permutation& p, std::int64_t a, std::int64_t b) {
  std::int64_t c = 0;
  for (std::int64_t i = 0; i < a; ++i) c += (p.sigma[static_cast<std::size_t>(i)] <= b);
  return c;
}

/// Fenwick tree over columns; supports offline C_{a,b} queries in O(log n)
/// after inserting rows 1..a in order.
class PrefixCounter {
 public:
  explicit PrefixCounter(std::int64_t n) : n_(n), tree_(static_cast<std::size_t>(n) + 1, 0) {}

  void insert(std::int64_t column) {
    for (std::int64_t i = column; i <= n_; i += i & (-i)) ++tree_[static_cast<std::size_t>(i)];
  }

  std::int64_t prefix(std::int64_t column) const {
    std::int64_t s = 0;
    for (std::int64_t i = column; i > 0; i -= i & (-i)) s += tree_[static_cast<std::size_t>(i)];
    return s;
  }

 private:
  std::int64_t n_;
  std::vector<std::int32_t> tree_;
};

}  // namespace copula
