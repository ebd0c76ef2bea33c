#include "combwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace combwalk {

double normal_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0,1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double level) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval needs trials > 0");
  const double z = normal_critical(level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

Interval normal_interval(double mean, double se, double level) {
  const double z = normal_critical(level);
  return {mean - z * se, mean + z * se};
}

double RunningMoments::standard_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

QuantileEstimate quantile_estimate(std::span<const double> sorted, double q, double level) {
  if (sorted.empty()) throw std::invalid_argument("quantile_estimate needs data");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must be in (0,1)");
  const auto n = static_cast<std::int64_t>(sorted.size());
  const double z = normal_critical(level);
  auto at = [&](std::int64_t rank) {  // 1-based order statistic, clamped
    return sorted[static_cast<std::size_t>(std::clamp<std::int64_t>(rank, 1, n) - 1)];
  };
  const double nq = static_cast<double>(n) * q;
  const double spread = z * std::sqrt(nq * (1.0 - q));
  QuantileEstimate out;
  out.point = at(static_cast<std::int64_t>(std::ceil(nq)));
  out.ci.lo = at(static_cast<std::int64_t>(std::floor(nq - spread)));
  out.ci.hi = at(static_cast<std::int64_t>(std::ceil(nq + spread)) + 1);
  return out;
}

}  // namespace combwalk
