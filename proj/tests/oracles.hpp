// Test-only oracles: brute-force enumeration over S_n and independent
// expansions used to freeze expected values.  Nothing here touches the
// implementation paths being checked.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "copula/exact.hpp"
#include "copula/permutation.hpp"

namespace oracles {

/// Visit every permutation of {1..n} in lexicographic order.
inline void for_each_permutation(std::int64_t n, const std::function<void(const copula::Permutation&)>& fn) {
  copula::Permutation p = copula::identity_permutation(n);
  do {
    fn(p);
  } while (std::next_permutation(p.sigma.begin(), p.sigma.end()));
}

/// #{sigma : |{i <= a, sigma(i) <= b}| = c} over all of S_n.
inline std::int64_t count_blockings(std::int64_t n, std::int64_t a, std::int64_t b, std::int64_t c) {
  std::int64_t count = 0;
  for_each_permutation(n, [&](const copula::Permutation& p) {
    count += (copula::count_upper_left(p, a, b) == c);
  });
  return count;
}

/// Exact brute-force P(n,a,b,c) as count / n!.
inline copula::BigRational blocking_prob_bruteforce(std::int64_t n, std::int64_t a, std::int64_t b,
                                                    std::int64_t c) {
  return copula::BigRational(copula::BigInt(count_blockings(n, a, b, c)), copula::factorial(n));
}

/// Joint distribution of box counts for a full grid: flattened count matrix
/// -> number of matching permutations.
inline std::map<std::vector<std::int64_t>, std::int64_t> grid_count_distribution(
    std::int64_t n, const std::vector<std::int64_t>& acuts, const std::vector<std::int64_t>& bcuts) {
  std::map<std::vector<std::int64_t>, std::int64_t> dist;
  auto band = [](const std::vector<std::int64_t>& cuts, std::int64_t x) {
    std::size_t k = 0;
    while (cuts[k + 1] < x) ++k;
    return k;
  };
  for_each_permutation(n, [&](const copula::Permutation& p) {
    std::vector<std::int64_t> counts((acuts.size() - 1) * (bcuts.size() - 1), 0);
    for (std::int64_t i = 1; i <= n; ++i) {
      std::size_t bi = band(acuts, i);
      std::size_t bj = band(bcuts, p.sigma[static_cast<std::size_t>(i - 1)]);
      ++counts[bi * (bcuts.size() - 1) + bj];
    }
    ++dist[counts];
  });
  return dist;
}

/// Covariance of the bridged sheet via the 16-term expansion of
/// f = f* - u f*(1,v) - v f*(u,1) + uv f*(1,1) against the plain-sheet
/// covariance Cov(f*(x,y), f*(x',y')) = min(x,x') min(y,y').
inline double bridged_cov_expansion(double u1, double v1, double u2, double v2) {
  struct Term {
    double coeff, u, v;
  };
  auto terms = [](double u, double v) {
    return std::vector<Term>{{1.0, u, v}, {-u, 1.0, v}, {-v, u, 1.0}, {u * v, 1.0, 1.0}};
  };
  double cov = 0.0;
  for (const Term& s : terms(u1, v1))
    for (const Term& t : terms(u2, v2))
      cov += s.coeff * t.coeff * std::min(s.u, t.u) * std::min(s.v, t.v);
  return cov;
}

}  // namespace oracles
