#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace combwalk {

/// Two-sided standard normal critical value for confidence `level`.
double normal_critical(double level);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double level);

/// mean +- z * stderr.
Interval normal_interval(double mean, double se, double level);

/// Running mean and variance (Welford); fold order is the caller's.
class RunningMoments {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct QuantileEstimate {
  double point = 0.0;
  Interval ci;
};

/// Empirical q-quantile of `sorted` with a distribution-free order-statistic
/// confidence interval.
QuantileEstimate quantile_estimate(std::span<const double> sorted, double q, double level);

}  // namespace combwalk
