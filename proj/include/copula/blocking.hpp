#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "copula/common.hpp"
#include "copula/permutation.hpp"

namespace copula {

/// A blocking (n,a,b,c): the n x n square cut into four boxes at (a,b) with
/// c ones in the upper-left box.  Valid iff every derived box count is
/// nonnegative, i.e. max(0, a+b-n) <= c <= min(a,b).
struct Blocking {
  std::int64_t n = 0, a = 0, b = 0, c = 0;
};

/// Box counts (c11, c12, c21, c22) = (c, a-c, b-c, n-a-b+c).
inline std::array<std::int64_t, 4> box_counts(const Blocking& bl) {
  return {bl.c, bl.a - bl.c, bl.b - bl.c, bl.n - bl.a - bl.b + bl.c};
}

inline bool blocking_valid(const Blocking& bl) {
  if (bl.n <= 0 || bl.a < 0 || bl.a > bl.n || bl.b < 0 || bl.b > bl.n) return false;
  for (auto v : box_counts(bl))
    if (v < 0) return false;
  return true;
}

inline void validate_blocking(const Blocking& bl) {
  if (!blocking_valid(bl))
    throw std::invalid_argument("invalid blocking (n,a,b,c)=(" + std::to_string(bl.n) + "," +
                                std::to_string(bl.a) + "," + std::to_string(bl.b) + "," +
                                std::to_string(bl.c) + "): a box count is negative");
}

inline std::int64_t sparsity(const Blocking& bl) {
  auto cd = box_counts(bl);
  std::int64_t m = cd[0];
  for (auto v : cd) m = std::min(m, v);
  return m;
}

/// An I x J grid: cut positions 0 = a_0 < ... < a_I = n on the rows and
/// 0 = b_0 < ... < b_J = n on the columns.
struct GridSpec {
  std::int64_t n = 0;
  std::vector<std::int64_t> a, b;

  std::int64_t I() const { return static_cast<std::int64_t>(a.size()) - 1; }
  std::int64_t J() const { return static_cast<std::int64_t>(b.size()) - 1; }
  std::int64_t adot(std::int64_t i) const { return a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i - 1)]; }
  std::int64_t bdot(std::int64_t j) const { return b[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j - 1)]; }
  double ahat(std::int64_t i) const { return static_cast<double>(adot(i)) / static_cast<double>(n); }
  double bhat(std::int64_t j) const { return static_cast<double>(bdot(j)) / static_cast<double>(n); }
};

inline void validate_grid(const GridSpec& g) {
  auto mono = [&](const std::vector<std::int64_t>& v) {
    if (v.size() < 2 || v.front() != 0 || v.back() != g.n) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1]) return false;
    return true;
  };
  if (g.n <= 0 || !mono(g.a) || !mono(g.b))
    throw std::invalid_argument("invalid grid: cuts must be strictly increasing from 0 to n");
}

inline GridSpec two_by_two_grid(std::int64_t n, std::int64_t a, std::int64_t b) {
  return GridSpec{n, {0, a, n}, {0, b, n}};
}

/// Box counts of a grid blocking: cdot(i,j) ones in box (i,j), with row sums
/// adot_i and column sums bdot_j.
struct GridBlocking {
  GridSpec grid;
  Matrix<std::int64_t> cdot;  // I x J, 0-indexed boxes
};

inline void validate_grid_blocking(const GridBlocking& gb) {
  validate_grid(gb.grid);
  auto I = gb.grid.I(), J = gb.grid.J();
  if (gb.cdot.rows() != static_cast<std::size_t>(I) || gb.cdot.cols() != static_cast<std::size_t>(J))
    throw std::invalid_argument("grid blocking: count matrix shape does not match grid");
  for (std::int64_t i = 0; i < I; ++i)
    for (std::int64_t j = 0; j < J; ++j)
      if (gb.cdot(i, j) < 0) throw std::invalid_argument("grid blocking: negative box count");
  for (std::int64_t i = 0; i < I; ++i) {
    std::int64_t s = 0;
    for (std::int64_t j = 0; j < J; ++j) s += gb.cdot(i, j);
    if (s != gb.grid.adot(i + 1))
      throw std::invalid_argument("grid blocking: row sum mismatch in band " + std::to_string(i + 1));
  }
  for (std::int64_t j = 0; j < J; ++j) {
    std::int64_t s = 0;
    for (std::int64_t i = 0; i < I; ++i) s += gb.cdot(i, j);
    if (s != gb.grid.bdot(j + 1))
      throw std::invalid_argument("grid blocking: column sum mismatch in band " + std::to_string(j + 1));
  }
}

inline std::int64_t sparsity(const GridBlocking& gb) {
  std::int64_t m = gb.cdot(0, 0);
  for (auto v : gb.cdot.data()) m = std::min(m, v);
  return m;
}

/// Cumulative values c_{i,j} = sum_{i'<=i, j'<=j} cdot, as the (I+1)x(J+1)
/// table with zero first row/column; c_{i,J} = a_i and c_{I,j} = b_j.
inline Matrix<std::int64_t> cumulative_from_counts(const GridBlocking& gb) {
  auto I = gb.grid.I(), J = gb.grid.J();
  Matrix<std::int64_t> c(static_cast<std::size_t>(I + 1), static_cast<std::size_t>(J + 1), 0);
  for (std::int64_t i = 1; i <= I; ++i)
    for (std::int64_t j = 1; j <= J; ++j)
      c(i, j) = gb.cdot(i - 1, j - 1) + c(i - 1, j) + c(i, j - 1) - c(i - 1, j - 1);
  return c;
}

inline Matrix<std::int64_t> counts_from_cumulative(const Matrix<std::int64_t>& c) {
  Matrix<std::int64_t> d(c.rows() - 1, c.cols() - 1, 0);
  for (std::size_t i = 1; i < c.rows(); ++i)
    for (std::size_t j = 1; j < c.cols(); ++j)
      d(i - 1, j - 1) = c(i, j) - c(i - 1, j) - c(i, j - 1) + c(i - 1, j - 1);
  return d;
}

/// Count the ones of a permutation matrix per grid box, O(n + IJ).
inline Matrix<std::int64_t> box_counts(const Permutation& p, const GridSpec& g) {
  auto I = g.I(), J = g.J();
  Matrix<std::int64_t> counts(static_cast<std::size_t>(I), static_cast<std::size_t>(J), 0);
  std::vector<std::int32_t> colband(static_cast<std::size_t>(g.n) + 1, 0);
  for (std::int64_t j = 1; j <= J; ++j)
    for (std::int64_t b = g.b[static_cast<std::size_t>(j - 1)] + 1; b <= g.b[static_cast<std::size_t>(j)]; ++b)
      colband[static_cast<std::size_t>(b)] = static_cast<std::int32_t>(j - 1);
  std::int64_t band = 0;
  for (std::int64_t row = 1; row <= g.n; ++row) {
    while (row > g.a[static_cast<std::size_t>(band + 1)]) ++band;
    ++counts(band, colband[static_cast<std::size_t>(p.sigma[static_cast<std::size_t>(row - 1)])]);
  }
  return counts;
}

inline GridBlocking to_grid_blocking(const Blocking& bl) {
  validate_blocking(bl);
  if (bl.a == 0 || bl.a == bl.n || bl.b == 0 || bl.b == bl.n)
    throw std::invalid_argument("pointwise blocking with a or b on the boundary has no 2x2 grid form");
  GridBlocking gb{two_by_two_grid(bl.n, bl.a, bl.b), Matrix<std::int64_t>(2, 2, 0)};
  auto cd = box_counts(bl);
  gb.cdot(0, 0) = cd[0];
  gb.cdot(0, 1) = cd[1];
  gb.cdot(1, 0) = cd[2];
  gb.cdot(1, 1) = cd[3];
  return gb;
}

}  // namespace copula
