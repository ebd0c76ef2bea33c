#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "combwalk/profile.hpp"
#include "combwalk/rng.hpp"
#include "combwalk/walk.hpp"

namespace combwalk {

/**
 * Displacement tables for k = 2^j free vertical steps.
 *
 * While a walker stays strictly inside a tooth it moves like a simple random
 * walk on Z, so k steps displace it by 2 Binomial(k, 1/2) - k. The table keeps
 * the binomial CDF on mean +- 14 sd; radius(j) is the largest tabulated
 * |displacement| (never more than k). By the reflection principle the path
 * leaves [-radius, radius] during the k steps with probability below 1e-40.
 */
class BlockKernel {
 public:
  static constexpr int kMaxLevel = 24;

  static const BlockKernel& instance();

  /// Displacement after 2^level free steps; one uniform draw.
  std::int64_t sample(int level, RngStream& rng) const;

  /// Exact P(displacement == d) as tabulated (0 outside the table).
  double probability(int level, std::int64_t displacement) const;

  std::int64_t radius(int level) const { return levels_[static_cast<std::size_t>(level)].radius; }

 private:
  BlockKernel();

  struct Level {
    std::int64_t first_b = 0;  // smallest tabulated Binomial value
    std::int64_t radius = 0;
    std::vector<double> cdf;
    std::vector<double> pmf;
    std::vector<std::uint32_t> guide;  // guide[j] = first index with cdf > j / guide.size()
  };
  std::array<Level, kMaxLevel + 1> levels_;
};

/**
 * First-passage times to 0 of a simple random walk on Z started at height a:
 * f_a(n) = (a / n) P(S_n = a), tabulated for a <= kMaxStart, n <= kMaxSteps.
 */
class FirstPassage {
 public:
  static constexpr std::int64_t kMaxStart = 256;
  static constexpr std::int64_t kMaxSteps = 4096;

  static const FirstPassage& instance();

  /// A draw of T given T <= k, for 1 <= a <= k <= kMaxSteps.
  std::int64_t sample(std::int64_t a, std::int64_t k, RngStream& rng) const;

  /// P(T <= k) from height a.
  double cdf(std::int64_t a, std::int64_t k) const;

 private:
  FirstPassage();

  std::vector<std::vector<double>> rows_;  // rows_[a][n] = P(T <= n)
};

/**
 * K synchronized independent walkers with block acceleration.
 *
 * The group advances on a shared clock. A walker at height a inside a tooth
 * may jump k = 2^j steps at once when the displacement radius r of the block
 * keeps it inside the tooth (a - r >= 1, a + r <= height) and no other walker
 * can reach the band [a - r, a + r] within k steps. Other walkers are
 * credited a reach of min(k, 3r): spine displacement, tooth depth on entry
 * and tooth depth on exit each stay below r except with probability < 1e-40.
 * Blocks therefore change the law of the observed process by a total
 * variation below 1e-38 each; collision times, horizontal-move times, spine
 * visits and exit times are otherwise observed as in step-by-step simulation.
 * Only the in-tooth path during the block is skipped.
 *
 * Near the spine a second, exact block kind is used: a walker at height
 * a <= FirstPassage::kMaxStart with a + k below the tooth top runs k steps
 * killed at 0. The free endpoint is drawn, the path is declared to have hit 0
 * with the reflection-principle probability P(-a -> y) / P(a -> y), and on a
 * hit the walker reappears on the spine at a first-passage time drawn from
 * f_a conditioned on T <= k.
 *
 * After advance(), position(i) is valid unless blocked(i).
 */
template <std::size_t K>
class FastGroup {
 public:
  FastGroup(const Profile& profile, const std::array<Vertex, K>& starts,
            const std::array<RngStream, K>& rngs, bool accelerate = true)
      : profile_(&profile), rngs_(rngs), accelerate_(accelerate) {
    for (std::size_t i = 0; i < K; ++i) {
      w_[i].pos = starts[i];
      w_[i].height = profile.tooth_height(starts[i].x);
    }
  }

  std::int64_t time() const { return t_; }
  bool blocked(std::size_t i) const { return w_[i].blocked; }
  const Vertex& position(std::size_t i) const { return w_[i].pos; }
  std::int64_t column(std::size_t i) const { return w_[i].pos.x; }
  bool on_spine(std::size_t i) const { return !w_[i].blocked && w_[i].pos.y == 0; }
  /// True if walker i changed column on the last tick.
  bool moved_horizontally(std::size_t i) const { return w_[i].moved_h; }
  /// Number of ticks simulated one step at a time (cost metric).
  std::int64_t single_steps() const { return single_steps_; }

  /// All walkers unblocked and on the same vertex.
  bool all_together() const {
    for (std::size_t i = 0; i < K; ++i) {
      if (w_[i].blocked || w_[i].pos != w_[0].pos) return false;
    }
    return true;
  }
  bool together(std::size_t i, std::size_t j) const {
    return !w_[i].blocked && !w_[j].blocked && w_[i].pos == w_[j].pos;
  }

  /**
   * Advance to the next time at which some walker is unblocked, but not past
   * `cap`. If every walker stays blocked through `cap`, time becomes `cap`
   * and the walkers remain blocked.
   */
  void advance(std::int64_t cap = std::numeric_limits<std::int64_t>::max()) {
    if (accelerate_) plan_blocks();
    bool any_free = false;
    std::int64_t next = std::numeric_limits<std::int64_t>::max();
    for (const auto& w : w_) {
      if (w.blocked) {
        next = std::min(next, w.release);
      } else {
        any_free = true;
      }
    }
    if (any_free) next = t_ + 1;
    if (next > cap) {
      t_ = cap;
      for (auto& w : w_) w.moved_h = false;
      return;
    }
    t_ = next;
    for (std::size_t i = 0; i < K; ++i) {
      auto& w = w_[i];
      w.moved_h = false;
      if (w.blocked) {
        if (w.release == t_) {
          w.blocked = false;
          w.pos.y = w.release_y;
        }
        continue;
      }
      const Vertex nv = step(*profile_, w.pos, rngs_[i]);
      ++single_steps_;
      if (nv.x != w.pos.x) {
        w.moved_h = true;
        w.height = profile_->tooth_height(nv.x);
      }
      w.pos = nv;
    }
  }

 private:
  struct Walker {
    Vertex pos{};
    std::int64_t height = 0;
    bool blocked = false;
    bool moved_h = false;
    std::int64_t release = 0;
    std::int64_t release_y = 0;
    std::int64_t band_lo = 0;  // |y| range reachable during the block
    std::int64_t band_hi = 0;
  };

  static std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }
  static int sign(std::int64_t v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }
  static int floor_log2(std::int64_t v) { return 63 - std::countl_zero(static_cast<std::uint64_t>(v)); }

  // Lower bound on the graph distance from any position walker m may hold
  // now to the column-x, side-s height band [lo, hi] (lo >= 1).
  std::int64_t distance_to_band(const Walker& m, std::int64_t x, int s, std::int64_t lo,
                                std::int64_t hi) const {
    const std::int64_t m_lo = m.blocked ? m.band_lo : iabs(m.pos.y);
    const std::int64_t m_hi = m.blocked ? m.band_hi : iabs(m.pos.y);
    if (m.pos.x == x && sign(m.pos.y) == s && m_lo > 0) {
      if (m_hi < lo) return lo - m_hi;
      if (m_lo > hi) return m_lo - hi;
      return 0;
    }
    return m_lo + iabs(m.pos.x - x) + lo;
  }

  void plan_blocks() {
    constexpr std::int64_t kMinBlock = 4;
    const BlockKernel& kernel = *kernel_;
    for (std::size_t i = 0; i < K; ++i) {
      auto& w = w_[i];
      if (w.blocked) continue;
      const std::int64_t a = iabs(w.pos.y);
      if (a == 0) continue;
      const int s = sign(w.pos.y);

      // Interior block: the band stays strictly inside the tooth.
      int interior = -1;
      const std::int64_t limit = std::min(a - 1, w.height - a);
      if (a > kMinBlock && limit >= kMinBlock) {
        int top = std::min(floor_log2(limit), BlockKernel::kMaxLevel);
        while (top < BlockKernel::kMaxLevel && kernel.radius(top + 1) <= limit) ++top;
        interior = largest_clear(2, top, [&](int level) {
          const std::int64_t r = kernel.radius(level);
          return clear_of(i, s, a - r, a + r, reach(level));
        });
      }

      // Killed block: may return to the spine, must not reach the top.
      int killed = -1;
      const std::int64_t room = std::min(FirstPassage::kMaxSteps, w.height - a);
      if (a <= FirstPassage::kMaxStart && room >= kMinBlock) {
        const int top = floor_log2(room);
        const int bottom = std::max(interior + 1, 2);
        if (top >= bottom) {
          killed = largest_clear(bottom, top, [&](int level) {
            const std::int64_t k = std::int64_t{1} << level;
            return clear_of(i, s, std::max<std::int64_t>(1, a - k), a + k, reach(level));
          });
        }
      }

      if (killed >= 2) {
        const std::int64_t k = std::int64_t{1} << killed;
        const std::int64_t y = a + kernel.sample(killed, rngs_[i]);
        bool hit = y <= 0;
        if (!hit) {
          const double ratio = kernel.probability(killed, y + a) / kernel.probability(killed, y - a);
          hit = rngs_[i].uniform01() < ratio;
        }
        w.blocked = true;
        w.band_lo = std::max<std::int64_t>(1, a - k);
        w.band_hi = a + k;
        if (hit) {
          w.release = t_ + passage_->sample(a, k, rngs_[i]);
          w.release_y = 0;
        } else {
          w.release = t_ + k;
          w.release_y = s * y;
        }
      } else if (interior >= 2) {
        const std::int64_t r = kernel.radius(interior);
        const std::int64_t d = kernel.sample(interior, rngs_[i]);
        w.blocked = true;
        w.release = t_ + (std::int64_t{1} << interior);
        w.release_y = s * (a + d);
        w.band_lo = a - r;
        w.band_hi = a + r;
      }
    }
  }

  // Largest level in [lo, hi] passing `clear` (monotone: true up to some
  // level, false above), or -1.
  template <class Pred>
  static int largest_clear(int lo, int hi, Pred clear) {
    if (!clear(lo)) return -1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (clear(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  }

  // Largest distance another walker may cover during a block of 2^level steps.
  std::int64_t reach(int level) const {
    return std::min(std::int64_t{1} << level, 3 * kernel_->radius(level));
  }

  bool clear_of(std::size_t i, int s, std::int64_t lo, std::int64_t hi, std::int64_t reach) const {
    for (std::size_t m = 0; m < K; ++m) {
      if (m != i && distance_to_band(w_[m], w_[i].pos.x, s, lo, hi) <= reach) return false;
    }
    return true;
  }

  const Profile* profile_;
  const BlockKernel* kernel_ = &BlockKernel::instance();
  const FirstPassage* passage_ = &FirstPassage::instance();
  std::array<RngStream, K> rngs_;
  std::array<Walker, K> w_{};
  bool accelerate_;
  std::int64_t t_ = 0;
  std::int64_t single_steps_ = 0;
};

}  // namespace combwalk
