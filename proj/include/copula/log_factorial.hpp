#pragma once

#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <quadmath.h>

namespace copula {

/// Cached table of log k!.  Entries are accumulated in __float128 and stored
/// as double, so lf(k) carries only the final rounding error even for
/// k ~ 10^7.  A quad-precision prefix is kept alongside (up to kTailCap) for
/// Stirling-tail work, where double cancellation would swamp the 1/(12k)
/// bound being checked.
class LogFactorialTable {
 public:
  static constexpr std::size_t kCapacity = 10'000'000;
  static constexpr std::size_t kTailCap = 2'000'000;

  static LogFactorialTable& instance() {
    static LogFactorialTable table;
    return table;
  }

  /// Grow the table to cover k.  Serialized; call before read-only use from
  /// parallel sections.
  void ensure(std::size_t k) {
    if (k > kCapacity) throw std::invalid_argument("log_factorial: k beyond table capacity");
    std::lock_guard<std::mutex> lock(mutex_);
    if (k < lf_.size()) return;
    std::size_t old = lf_.size();
    lf_.resize(k + 1);
    if (k < kTailCap) hp_.resize(k + 1);
    for (std::size_t i = old; i <= k; ++i) {
      acc_ += logq(static_cast<__float128>(i));
      lf_[i] = static_cast<double>(acc_);
      if (i < hp_.size()) hp_[i] = acc_;
    }
  }

  double operator()(std::size_t k) const { return lf_[k]; }

  /// st(k) = log k! - (k log k - k + log(k)/2 + log(2 pi)/2), in quad
  /// precision; satisfies 0 < st(k) < 1/(12k).
  double stirling_tail(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("stirling tail undefined for k = 0 (log 0! = 0)");
    if (k >= hp_.size()) throw std::invalid_argument("stirling tail: k beyond quad-precision prefix");
    const __float128 half = 0.5;
    const __float128 log_two_pi = logq(static_cast<__float128>(2) * acosq(-1));
    __float128 kq = static_cast<__float128>(k);
    __float128 lk = logq(kq);
    __float128 main = kq * lk - kq + half * lk + half * log_two_pi;
    return static_cast<double>(hp_[k] - main);
  }

 private:
  LogFactorialTable() {
    lf_ = {0.0, 0.0};  // log 0! = log 1! = 0
    hp_ = {0, 0};
    acc_ = 0;
  }

  std::mutex mutex_;
  std::vector<double> lf_;
  std::vector<__float128> hp_;
  __float128 acc_ = 0;
};

inline double log_factorial(std::size_t k) {
  auto& t = LogFactorialTable::instance();
  t.ensure(k);
  return t(k);
}

struct StirlingParts {
  double log_factorial = 0.0;
  double tail = 0.0;
};

/// log k! together with the Stirling remainder st(k).
inline StirlingParts stirling_log_factorial(std::size_t k) {
  if (k == 0) throw std::invalid_argument("stirling_log_factorial: k must be >= 1");
  auto& t = LogFactorialTable::instance();
  t.ensure(k);
  return {t(k), t.stirling_tail(k)};
}

}  // namespace copula
