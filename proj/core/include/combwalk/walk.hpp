#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "combwalk/profile.hpp"
#include "combwalk/rng.hpp"

namespace combwalk {

/// Spine coordinates beyond this abort a replica as censored.
inline constexpr std::int64_t kSpineLimit = std::int64_t{1} << 62;

/**
 * One step of the simple random walk: a uniform neighbor of v.
 *
 * Consumes exactly one bounded draw over the precomputed degree, with the
 * neighbor order documented on neighbors().
 */
inline Vertex step(const Profile& profile, const Vertex& v, RngStream& rng) {
  const std::int64_t h = profile.tooth_height(v.x);
  if (v.y == 0) {
    if (h == 0) return {rng.uniform_below(2) == 0 ? v.x - 1 : v.x + 1, 0};
    switch (rng.uniform_below(4)) {
      case 0:
        return {v.x - 1, 0};
      case 1:
        return {v.x + 1, 0};
      case 2:
        return {v.x, 1};
      default:
        return {v.x, -1};
    }
  }
  const std::int64_t a = v.y > 0 ? v.y : -v.y;
  const std::int64_t s = v.y > 0 ? 1 : -1;
  if (a >= h) return {v.x, s * (a - 1)};
  return {v.x, rng.uniform_below(2) == 0 ? s * (a - 1) : s * (a + 1)};
}

/// Stopping condition that ends a simulation early.
struct EarlyExit {
  enum class Kind { Theta, Tau };
  Kind kind = Kind::Theta;
  std::int64_t radius = 0;  // Theta: stop at theta_radius
  Vertex target{};          // Tau: stop at tau_target

  static EarlyExit theta(std::int64_t n) { return {Kind::Theta, n, {}}; }
  static EarlyExit tau(Vertex v) { return {Kind::Tau, 0, v}; }
};

struct StopSpec {
  std::vector<std::int64_t> theta_radii;
  std::vector<Vertex> tau_targets;
  std::optional<EarlyExit> early_exit;
};

struct Trajectory {
  Vertex start{};
  std::vector<Vertex> steps;  // X_0 .. X_len
  std::int64_t horizon = 0;
  bool censored = false;

  std::int64_t length() const { return static_cast<std::int64_t>(steps.size()) - 1; }
  std::vector<std::int64_t> U() const;
  std::vector<std::int64_t> V() const;
};

/// Stopping times of one trajectory; std::nullopt means "not reached".
struct StopRecord {
  std::vector<std::int64_t> T;  // T_0 = 0 < T_1 < ... horizontal-move times
  std::map<std::int64_t, std::optional<std::int64_t>> theta;
  std::map<Vertex, std::optional<std::int64_t>> tau;
};

/// theta_n = inf{m >= 0 : |U_m| >= n}, the exit time of V_{n-1}.
std::optional<std::int64_t> exit_time(const Trajectory& traj, std::int64_t n);

/// Horizontal-move times T_0 = 0 < T_1 < ...
std::vector<std::int64_t> horizontal_move_times(const Trajectory& traj);

/**
 * Simulate up to `horizon` steps from `start`.
 *
 * Every requested stopping time is recorded independently. If an early exit
 * is requested the path is cut at the step where it fires; if it never fires
 * within the horizon the trajectory is marked censored. Throws
 * std::invalid_argument for horizon < 1 and std::domain_error for an invalid
 * start.
 */
std::pair<Trajectory, StopRecord> simulate(const Profile& profile, const Vertex& start,
                                           std::int64_t horizon, const StopSpec& stops,
                                           RngStream& rng);

/// W_k = U_{T_k}.
std::vector<std::int64_t> embedded_walk(const Trajectory& traj, const StopRecord& rec);

/// |{k <= n : seq[k] == x}|. Throws std::invalid_argument if n is out of range.
std::int64_t local_time(std::span<const std::int64_t> seq, std::int64_t x, std::int64_t n);

/**
 * Sojourn lengths at spine column x: for each visit of the embedded walk to
 * x, the time until the next horizontal move. A final sojourn that the
 * trajectory cuts short is omitted.
 */
std::vector<std::int64_t> excursion_durations(const Trajectory& traj, const StopRecord& rec,
                                              std::int64_t x);

/// CSV with header `n,x,y`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace combwalk
