#include "combwalk/walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace combwalk {

std::vector<std::int64_t> Trajectory::U() const {
  std::vector<std::int64_t> out;
  out.reserve(steps.size());
  for (const auto& v : steps) out.push_back(v.x);
  return out;
}

std::vector<std::int64_t> Trajectory::V() const {
  std::vector<std::int64_t> out;
  out.reserve(steps.size());
  for (const auto& v : steps) out.push_back(v.y);
  return out;
}

std::optional<std::int64_t> exit_time(const Trajectory& traj, std::int64_t n) {
  for (std::size_t m = 0; m < traj.steps.size(); ++m) {
    const std::int64_t x = traj.steps[m].x;
    if (x >= n || x <= -n) return static_cast<std::int64_t>(m);
  }
  return std::nullopt;
}

std::vector<std::int64_t> horizontal_move_times(const Trajectory& traj) {
  std::vector<std::int64_t> T{0};
  for (std::size_t n = 1; n < traj.steps.size(); ++n) {
    if (traj.steps[n].x != traj.steps[n - 1].x) T.push_back(static_cast<std::int64_t>(n));
  }
  return T;
}

std::pair<Trajectory, StopRecord> simulate(const Profile& profile, const Vertex& start,
                                           std::int64_t horizon, const StopSpec& stops,
                                           RngStream& rng) {
  if (horizon < 1) throw std::invalid_argument("simulate needs horizon >= 1");
  if (!is_vertex(profile, start)) throw std::domain_error("simulate: start is not a vertex");

  Trajectory traj;
  traj.start = start;
  traj.horizon = horizon;
  traj.steps.reserve(static_cast<std::size_t>(std::min<std::int64_t>(horizon, 1 << 20)) + 1);

  StopRecord rec;
  rec.T.push_back(0);
  for (auto r : stops.theta_radii) rec.theta[r] = std::nullopt;
  for (const auto& v : stops.tau_targets) rec.tau[v] = std::nullopt;

  bool fired = false;
  auto observe = [&](std::int64_t n, const Vertex& v) {
    for (auto& [r, t] : rec.theta) {
      if (!t && (v.x >= r || v.x <= -r)) t = n;
    }
    for (auto& [target, t] : rec.tau) {
      if (!t && v == target) t = n;
    }
    if (stops.early_exit) {
      const auto& e = *stops.early_exit;
      if (e.kind == EarlyExit::Kind::Theta) {
        fired = v.x >= e.radius || v.x <= -e.radius;
      } else {
        fired = v == e.target;
      }
    }
  };

  Vertex cur = start;
  traj.steps.push_back(cur);
  observe(0, cur);
  bool overflow = false;
  for (std::int64_t n = 1; n <= horizon && !fired; ++n) {
    const Vertex next = step(profile, cur, rng);
    if (next.x != cur.x) rec.T.push_back(n);
    cur = next;
    traj.steps.push_back(cur);
    observe(n, cur);
    if (cur.x >= kSpineLimit || cur.x <= -kSpineLimit) {
      overflow = true;
      break;
    }
  }
  traj.censored = overflow || (stops.early_exit.has_value() && !fired);
  return {std::move(traj), std::move(rec)};
}

std::vector<std::int64_t> embedded_walk(const Trajectory& traj, const StopRecord& rec) {
  std::vector<std::int64_t> W;
  W.reserve(rec.T.size());
  for (auto t : rec.T) W.push_back(traj.steps.at(static_cast<std::size_t>(t)).x);
  return W;
}

std::int64_t local_time(std::span<const std::int64_t> seq, std::int64_t x, std::int64_t n) {
  if (n < 0 || n >= static_cast<std::int64_t>(seq.size()))
    throw std::invalid_argument("local_time: index out of range");
  return std::count(seq.begin(), seq.begin() + n + 1, x);
}

std::vector<std::int64_t> excursion_durations(const Trajectory& traj, const StopRecord& rec,
                                              std::int64_t x) {
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k + 1 < rec.T.size(); ++k) {
    if (traj.steps[static_cast<std::size_t>(rec.T[k])].x == x) out.push_back(rec.T[k + 1] - rec.T[k]);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "n,x,y\n";
  for (std::size_t n = 0; n < traj.steps.size(); ++n) {
    os << n << ',' << traj.steps[n].x << ',' << traj.steps[n].y << '\n';
  }
}

}  // namespace combwalk
