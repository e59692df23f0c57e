#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "copula/common.hpp"

namespace copula {

/// Real-entried copula: the integration image of a doubly stochastic matrix.
struct BirkhoffCopula {
  std::int64_t n = 0;
  Matrix<double> C;
};

struct StochasticityCheck {
  bool ok = true;
  std::string reason;
  std::int64_t index = -1;  // offending row or column
};

inline StochasticityCheck check_doubly_stochastic(const Matrix<double>& M, double tol = 1e-9) {
  if (M.rows() != M.cols() || M.rows() == 0) return {false, "matrix is not square", -1};
  auto n = static_cast<std::int64_t>(M.rows());
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      if (M(i, j) < -1e-12) return {false, "negative entry", i};
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::int64_t j = 0; j < n; ++j) s += M(i, j);
    if (std::abs(s - 1.0) > tol) return {false, "row sum != 1", i};
  }
  for (std::int64_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::int64_t i = 0; i < n; ++i) s += M(i, j);
    if (std::abs(s - 1.0) > tol) return {false, "column sum != 1", j};
  }
  return {};
}

/// Integrate a doubly stochastic matrix to its Birkhoff copula.  The
/// stochasticity tolerance is configurable; 1e-9 by default.
inline BirkhoffCopula birkhoff_copula_from_matrix(const Matrix<double>& M, double tol = 1e-9) {
  StochasticityCheck chk = check_doubly_stochastic(M, tol);
  if (!chk.ok)
    throw std::invalid_argument("not doubly stochastic: " + chk.reason + " at index " +
                                std::to_string(chk.index));
  auto n = static_cast<std::int64_t>(M.rows());
  BirkhoffCopula c;
  c.n = n;
  c.C.assign(static_cast<std::size_t>(n + 1), static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t a = 1; a <= n; ++a) {
    double rowsum = 0;
    for (std::int64_t b = 1; b <= n; ++b) {
      rowsum += M(a - 1, b - 1);
      c.C(a, b) = c.C(a - 1, b) + rowsum;
    }
  }
  return c;
}

/// Real-valued copula conditions (i)-(iii) within tol.
struct BirkhoffCheck {
  bool ok = true;
  std::string reason;
  std::int64_t a = -1, b = -1;
};

inline BirkhoffCheck is_birkhoff_copula(const Matrix<double>& C, double tol = 1e-9) {
  if (C.rows() != C.cols() || C.rows() < 2) return {false, "matrix is not square with side >= 2", -1, -1};
  auto n = static_cast<std::int64_t>(C.rows()) - 1;
  for (std::int64_t a = 0; a <= n; ++a) {
    if (std::abs(C(a, 0)) > tol) return {false, "C_{a,0} != 0", a, 0};
    if (std::abs(C(0, a)) > tol) return {false, "C_{0,b} != 0", 0, a};
    if (std::abs(C(a, n) - static_cast<double>(a)) > tol * static_cast<double>(n))
      return {false, "C_{a,n} != a", a, n};
    if (std::abs(C(n, a) - static_cast<double>(a)) > tol * static_cast<double>(n))
      return {false, "C_{n,b} != b", n, a};
  }
  for (std::int64_t a = 1; a <= n; ++a)
    for (std::int64_t b = 1; b <= n; ++b)
      if (C(a, b) + C(a - 1, b - 1) - C(a - 1, b) - C(a, b - 1) < -tol)
        return {false, "2-increasing condition violated", a, b};
  return {};
}

}  // namespace copula
