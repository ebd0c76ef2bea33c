#include "combwalk/fast_walk.hpp"

#include <cmath>
#include <stdexcept>

namespace combwalk {

BlockKernel::BlockKernel() {
  for (int level = 0; level <= kMaxLevel; ++level) {
    const std::int64_t k = std::int64_t{1} << level;
    const double sd = std::sqrt(static_cast<double>(k)) / 2.0;
    const std::int64_t half_width = static_cast<std::int64_t>(std::ceil(14.0 * sd)) + 1;
    const std::int64_t mode = k / 2;
    const std::int64_t lo = std::max<std::int64_t>(0, mode - half_width);
    const std::int64_t hi = std::min<std::int64_t>(k, mode + half_width);

    // Unnormalized pmf by the ratio recurrence from the mode outward, then
    // normalized over the window.
    std::vector<double> pmf(static_cast<std::size_t>(hi - lo + 1), 0.0);
    pmf[static_cast<std::size_t>(mode - lo)] = 1.0;
    for (std::int64_t b = mode; b < hi; ++b) {
      pmf[static_cast<std::size_t>(b + 1 - lo)] =
          pmf[static_cast<std::size_t>(b - lo)] * static_cast<double>(k - b) / static_cast<double>(b + 1);
    }
    for (std::int64_t b = mode; b > lo; --b) {
      pmf[static_cast<std::size_t>(b - 1 - lo)] =
          pmf[static_cast<std::size_t>(b - lo)] * static_cast<double>(b) / static_cast<double>(k - b + 1);
    }
    long double total = 0.0L;
    for (double p : pmf) total += p;
    Level& L = levels_[static_cast<std::size_t>(level)];
    L.first_b = lo;
    L.radius = std::max(k - 2 * lo, 2 * hi - k);
    L.pmf.resize(pmf.size());
    L.cdf.resize(pmf.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      L.pmf[i] = static_cast<double>(pmf[i] / total);
      acc += pmf[i] / total;
      L.cdf[i] = static_cast<double>(acc);
    }
    L.cdf.back() = 1.0;
    L.guide.resize(L.cdf.size());
    std::size_t idx = 0;
    for (std::size_t j = 0; j < L.guide.size(); ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(L.guide.size());
      while (L.cdf[idx] <= u) ++idx;
      L.guide[j] = static_cast<std::uint32_t>(idx);
    }
  }
}

const BlockKernel& BlockKernel::instance() {
  static const BlockKernel kernel;
  return kernel;
}

std::int64_t BlockKernel::sample(int level, RngStream& rng) const {
  const Level& L = levels_[static_cast<std::size_t>(level)];
  const double u = rng.uniform01();
  std::size_t idx = L.guide[static_cast<std::size_t>(u * static_cast<double>(L.guide.size()))];
  while (L.cdf[idx] <= u) ++idx;
  const std::int64_t b = L.first_b + static_cast<std::int64_t>(idx);
  return 2 * b - (std::int64_t{1} << level);
}

FirstPassage::FirstPassage() : rows_(static_cast<std::size_t>(kMaxStart) + 1) {
  const double ln2 = std::log(2.0);
  for (std::int64_t a = 1; a <= kMaxStart; ++a) {
    std::vector<double> cum(static_cast<std::size_t>(kMaxSteps) + 1, 0.0);
    long double acc = 0.0L;
    for (std::int64_t n = a; n <= kMaxSteps; ++n) {
      if ((n - a) % 2 == 0) {
        const double up = static_cast<double>((n + a) / 2);
        const double down = static_cast<double>((n - a) / 2);
        const double lf = std::log(static_cast<double>(a) / static_cast<double>(n)) +
                          std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(up + 1.0) -
                          std::lgamma(down + 1.0) - static_cast<double>(n) * ln2;
        acc += std::exp(static_cast<long double>(lf));
      }
      cum[static_cast<std::size_t>(n)] = static_cast<double>(acc);
    }
    rows_[static_cast<std::size_t>(a)] = std::move(cum);
  }
}

const FirstPassage& FirstPassage::instance() {
  static const FirstPassage table;
  return table;
}

double FirstPassage::cdf(std::int64_t a, std::int64_t k) const {
  if (a < 1 || a > kMaxStart || k < 0 || k > kMaxSteps)
    throw std::invalid_argument("FirstPassage::cdf out of range");
  return rows_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
}

std::int64_t FirstPassage::sample(std::int64_t a, std::int64_t k, RngStream& rng) const {
  const auto& cum = rows_[static_cast<std::size_t>(a)];
  const double total = cum[static_cast<std::size_t>(k)];
  const double u = rng.uniform01() * total;
  const auto end = cum.begin() + k + 1;
  auto it = std::upper_bound(cum.begin(), end, u);
  if (it == end) --it;
  return static_cast<std::int64_t>(it - cum.begin());
}

double BlockKernel::probability(int level, std::int64_t displacement) const {
  if (level < 0 || level > kMaxLevel) throw std::invalid_argument("BlockKernel level out of range");
  const std::int64_t k = std::int64_t{1} << level;
  if ((displacement + k) % 2 != 0) return 0.0;
  const std::int64_t b = (displacement + k) / 2;
  const Level& L = levels_[static_cast<std::size_t>(level)];
  const std::int64_t i = b - L.first_b;
  if (i < 0 || i >= static_cast<std::int64_t>(L.pmf.size())) return 0.0;
  return L.pmf[static_cast<std::size_t>(i)];
}

}  // namespace combwalk
