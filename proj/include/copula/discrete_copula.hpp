#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "copula/common.hpp"
#include "copula/exact.hpp"
#include "copula/permutation.hpp"

namespace copula {

/// Integrated permutation matrix: C is (n+1)x(n+1) with indices 0..n,
/// C_{a,b} = #{(a',b') : a' <= a, b' <= b, M_{a',b'} = 1}.
struct DiscreteCopula {
  std::int64_t n = 0;
  Matrix<std::int32_t> C;
};

/// Outcome of a structural check; `ok == false` carries the first violated
/// condition and the offending indices (as the quadruple a,b -> a2,b2 for
/// 2-increasing failures, a single node otherwise).
struct CopulaCheck {
  bool ok = true;
  std::string reason;
  std::int64_t a = -1, b = -1, a2 = -1, b2 = -1;
};

/// Conditions for an integer matrix to be a discrete copula:
///   (i)  zero first row and column,
///   (ii) boundary C_{a,n} = C_{n,a} = a,
///   (iii) 2-increasing.
/// (iii) is checked on unit cells, which is equivalent by telescoping.
inline CopulaCheck is_discrete_copula(const Matrix<std::int32_t>& C) {
  CopulaCheck r;
  if (C.rows() != C.cols() || C.rows() < 2) {
    r.ok = false;
    r.reason = "matrix is not square with side >= 2";
    return r;
  }
  auto n = static_cast<std::int64_t>(C.rows()) - 1;
  for (std::int64_t a = 0; a <= n; ++a) {
    if (C(a, 0) != 0 || C(0, a) != 0) {
      r = {false, "boundary condition C_{a,0}=C_{0,b}=0 violated", a, 0, -1, -1};
      if (C(a, 0) == 0) r.a = 0, r.b = a;
      return r;
    }
  }
  for (std::int64_t a = 0; a <= n; ++a) {
    if (C(a, n) != a) return {false, "boundary condition C_{a,n}=a violated", a, n, -1, -1};
    if (C(n, a) != a) return {false, "boundary condition C_{n,b}=b violated", n, a, -1, -1};
  }
  for (std::int64_t a = 1; a <= n; ++a)
    for (std::int64_t b = 1; b <= n; ++b) {
      std::int64_t inc = static_cast<std::int64_t>(C(a, b)) - C(a - 1, b) - C(a, b - 1) + C(a - 1, b - 1);
      if (inc < 0) return {false, "2-increasing condition violated", a - 1, b - 1, a, b};
    }
  return r;
}

inline void copula_from_permutation_into(const Permutation& p, DiscreteCopula& out) {
  auto n = p.n;
  out.n = n;
  if (out.C.rows() != static_cast<std::size_t>(n + 1)) out.C.assign(static_cast<std::size_t>(n + 1), static_cast<std::size_t>(n + 1), 0);
  for (std::int64_t b = 0; b <= n; ++b) out.C(0, b) = 0;
  for (std::int64_t a = 1; a <= n; ++a) {
    std::int32_t col = p.sigma[static_cast<std::size_t>(a - 1)];
    out.C(a, 0) = 0;
    for (std::int64_t b = 1; b <= n; ++b)
      out.C(a, b) = out.C(a - 1, b) + (col <= b ? 1 : 0);
  }
}

inline DiscreteCopula copula_from_permutation(const Permutation& p) {
  validate_permutation(p);
  DiscreteCopula c;
  copula_from_permutation_into(p, c);
  return c;
}

/// Inverse of the integration bijection.  Rejects input that is not a
/// discrete copula, naming the first violated condition.
inline Permutation permutation_from_copula(const DiscreteCopula& c) {
  CopulaCheck chk = is_discrete_copula(c.C);
  if (!chk.ok)
    throw std::invalid_argument("not a discrete copula: " + chk.reason + " at (" +
                                std::to_string(chk.a) + "," + std::to_string(chk.b) + ")");
  Permutation p{c.n, std::vector<std::int32_t>(static_cast<std::size_t>(c.n), 0)};
  for (std::int64_t a = 1; a <= c.n; ++a)
    for (std::int64_t b = 1; b <= c.n; ++b) {
      std::int64_t inc = static_cast<std::int64_t>(c.C(a, b)) - c.C(a - 1, b) - c.C(a, b - 1) + c.C(a - 1, b - 1);
      if (inc == 1) {
        p.sigma[static_cast<std::size_t>(a - 1)] = static_cast<std::int32_t>(b);
        break;
      }
    }
  return p;
}

inline BigRational product_copula_entry(std::int64_t n, std::int64_t a, std::int64_t b) {
  return BigRational(BigInt(a) * b, BigInt(n));
}

/// (C_0)_{a,b} = ab/n, exact.  Intended for desk-scale n; entries are
/// rationals, not integers (C_0 is a Birkhoff copula, not a discrete one).
inline Matrix<BigRational> product_copula(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("product_copula: n must be >= 1");
  Matrix<BigRational> m(static_cast<std::size_t>(n + 1), static_cast<std::size_t>(n + 1));
  for (std::int64_t a = 0; a <= n; ++a)
    for (std::int64_t b = 0; b <= n; ++b) m(a, b) = product_copula_entry(n, a, b);
  return m;
}

/// D = C - C_0 stored exactly as numerators over the fixed denominator n:
/// numer(a,b) = n*C_{a,b} - a*b, so D_{a,b} = numer(a,b)/n.
struct ResidualField {
  std::int64_t n = 0;
  Matrix<std::int64_t> numer;

  double value(std::int64_t a, std::int64_t b) const {
    return static_cast<double>(numer(a, b)) / static_cast<double>(n);
  }
  BigRational exact(std::int64_t a, std::int64_t b) const {
    return BigRational(BigInt(numer(a, b)), BigInt(n));
  }
};

inline ResidualField residual(const DiscreteCopula& c) {
  ResidualField r;
  r.n = c.n;
  r.numer.assign(static_cast<std::size_t>(c.n + 1), static_cast<std::size_t>(c.n + 1), 0);
  for (std::int64_t a = 0; a <= c.n; ++a)
    for (std::int64_t b = 0; b <= c.n; ++b)
      r.numer(a, b) = static_cast<std::int64_t>(c.C(a, b)) * c.n - a * b;
  return r;
}

/// max_{a,b} |n*C_{a,b} - a*b| = n * max |D|, streamed row by row so the
/// copula matrix is never materialized.  Used by concentration audits.
inline std::int64_t max_abs_residual_numer(const Permutation& p) {
  auto n = p.n;
  std::vector<std::int32_t> row(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t best = 0;
  for (std::int64_t a = 1; a <= n; ++a) {
    std::int32_t col = p.sigma[static_cast<std::size_t>(a - 1)];
    for (std::int64_t b = col; b <= n; ++b) ++row[static_cast<std::size_t>(b)];
    for (std::int64_t b = 1; b < n; ++b) {
      std::int64_t v = static_cast<std::int64_t>(row[static_cast<std::size_t>(b)]) * n - a * b;
      if (v < 0) v = -v;
      if (v > best) best = v;
    }
  }
  return best;
}

}  // namespace copula
