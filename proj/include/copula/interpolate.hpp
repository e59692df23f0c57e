#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "copula/common.hpp"
#include "copula/discrete_copula.hpp"
#include "copula/exact.hpp"

namespace copula {

namespace detail {

// Locate u in the uniform partition {0, 1/n, ..., 1}: cell index k and local
// coordinate s in [0,1].  Values within 1e-12 of a node snap to it, so node
// evaluations reproduce corners exactly.
inline void locate_uniform(double u, std::int64_t n, std::int64_t& k, double& s) {
  double x = u * static_cast<double>(n);
  double r = std::round(x);
  if (std::abs(x - r) < 1e-12) x = r;
  k = static_cast<std::int64_t>(std::floor(x));
  if (k >= n) k = n - 1;
  if (k < 0) k = 0;
  s = x - static_cast<double>(k);
}

}  // namespace detail

/// Bilinear field on the uniform (n+1)x(n+1) grid with exact rational
/// corners num(a,b)/den.  This is the interpolation used for both x_n
/// (corners C/n) and y_n (corners D/n); per cell it equals the polynomial
/// a00 + a10 u + a01 v + a11 uv through the four corners, so the
/// coefficients are never stored.
struct InterpolatedField {
  std::int64_t n = 0;
  Matrix<std::int64_t> num;
  std::int64_t den = 1;

  double corner(std::int64_t a, std::int64_t b) const {
    return static_cast<double>(num(a, b)) / static_cast<double>(den);
  }

  double operator()(double u, double v) const {
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
      throw std::invalid_argument("interpolate: point outside the unit square");
    std::int64_t a, b;
    double s, t;
    detail::locate_uniform(u, n, a, s);
    detail::locate_uniform(v, n, b, t);
    double c00 = corner(a, b), c10 = corner(a + 1, b);
    double c01 = corner(a, b + 1), c11 = corner(a + 1, b + 1);
    return (1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11;
  }

  /// Exact evaluation for rational (u,v); grid nodes return the stored
  /// corner value with no rounding at all.
  BigRational eval_exact(const BigRational& u, const BigRational& v) const {
    if (u < 0 || u > 1 || v < 0 || v > 1)
      throw std::invalid_argument("interpolate: point outside the unit square");
    BigRational un = u * n, vn = v * n;
    BigInt a = boost::multiprecision::numerator(un) / boost::multiprecision::denominator(un);
    BigInt b = boost::multiprecision::numerator(vn) / boost::multiprecision::denominator(vn);
    if (a >= n) a = n - 1;
    if (b >= n) b = n - 1;
    BigRational s = un - BigRational(a), t = vn - BigRational(b);
    auto ai = a.convert_to<std::int64_t>();
    auto bi = b.convert_to<std::int64_t>();
    BigRational c00(BigInt(num(ai, bi)), BigInt(den));
    BigRational c10(BigInt(num(ai + 1, bi)), BigInt(den));
    BigRational c01(BigInt(num(ai, bi + 1)), BigInt(den));
    BigRational c11(BigInt(num(ai + 1, bi + 1)), BigInt(den));
    BigRational one(1);
    return (one - s) * (one - t) * c00 + s * (one - t) * c10 + (one - s) * t * c01 + s * t * c11;
  }
};

/// x_n: corners C_{a,b}/n (a 1-Lipschitz continuous copula).
inline InterpolatedField x_field(const DiscreteCopula& c) {
  InterpolatedField f;
  f.n = c.n;
  f.den = c.n;
  f.num.assign(c.C.rows(), c.C.cols(), 0);
  for (std::size_t i = 0; i < c.C.size(); ++i) f.num.data()[i] = c.C.data()[i];
  return f;
}

/// y_n: corners (C_{a,b} - ab/n)/n = (n C - ab)/n^2.
inline InterpolatedField y_field(const DiscreteCopula& c) {
  InterpolatedField f;
  f.n = c.n;
  f.den = c.n * c.n;
  f.num.assign(c.C.rows(), c.C.cols(), 0);
  for (std::int64_t a = 0; a <= c.n; ++a)
    for (std::int64_t b = 0; b <= c.n; ++b)
      f.num(a, b) = static_cast<std::int64_t>(c.C(a, b)) * c.n - a * b;
  return f;
}

inline InterpolatedField y_field(const ResidualField& r) {
  InterpolatedField f;
  f.n = r.n;
  f.den = r.n * r.n;
  f.num = r.numer;
  return f;
}

inline double interpolate_eval(const InterpolatedField& f, double u, double v) {
  return f(u, v);
}

/// Bilinear interpolation over an arbitrary knot partition (real corners);
/// used for sheet samples and Birkhoff fields.
struct BilinearGrid {
  std::vector<double> us, vs;  // strictly increasing, endpoints 0 and 1
  Matrix<double> vals;         // (us.size()) x (vs.size())

  double operator()(double u, double v) const {
    auto cell = [](const std::vector<double>& knots, double x) {
      auto it = std::upper_bound(knots.begin(), knots.end(), x);
      std::size_t k = static_cast<std::size_t>(it - knots.begin());
      if (k == 0) k = 1;
      if (k >= knots.size()) k = knots.size() - 1;
      return k - 1;
    };
    std::size_t i = cell(us, u), j = cell(vs, v);
    double s = (u - us[i]) / (us[i + 1] - us[i]);
    double t = (v - vs[j]) / (vs[j + 1] - vs[j]);
    return (1 - s) * (1 - t) * vals(i, j) + s * (1 - t) * vals(i + 1, j) +
           (1 - s) * t * vals(i, j + 1) + s * t * vals(i + 1, j + 1);
  }
};

}  // namespace copula
