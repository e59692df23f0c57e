#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace copula {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt factorial(std::int64_t k) {
  if (k < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt r = 1;
  for (std::int64_t i = 2; i <= k; ++i) r *= i;
  return r;
}

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;  // exact at every step
  }
  return r;
}

inline double to_double(const BigRational& q) { return q.template convert_to<double>(); }

/// "num/den" in lowest terms, or plain "num" for integers.
inline std::string rational_string(const BigRational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace copula
