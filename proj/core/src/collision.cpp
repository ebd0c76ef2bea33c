#include "combwalk/collision.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace combwalk {
namespace {

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

std::optional<std::int64_t> min_opt(std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// d^m, saturating.
std::int64_t ipow_sat(std::int64_t d, std::int64_t m) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < m; ++i) {
    if (r > kSpineLimit / d) return kSpineLimit;
    r *= d;
  }
  return r;
}

template <std::size_t K>
std::vector<EventFlag> windows_impl(const std::array<const Trajectory*, K>& trajs,
                                    const std::vector<std::int64_t>& events, std::int64_t d,
                                    std::int64_t m_max) {
  if (d < 2) throw std::invalid_argument("upsilon_windows needs d >= 2");
  const std::int64_t horizon = trajs[0]->length();
  auto exit_min = [&](std::int64_t r) {
    std::optional<std::int64_t> t;
    for (const auto* tr : trajs) t = min_opt(t, exit_time(*tr, r));
    return t;
  };
  std::vector<EventFlag> flags;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const auto start = exit_min(ipow_sat(d, m));
    const auto end = exit_min(ipow_sat(d, m + 1));
    if (!start) {
      flags.push_back(EventFlag::Censored);
      continue;
    }
    const std::int64_t stop = end ? *end : horizon + 1;
    const auto it = std::lower_bound(events.begin(), events.end(), *start);
    if (it != events.end() && *it < stop) {
      flags.push_back(EventFlag::True);
    } else {
      flags.push_back(end ? EventFlag::False : EventFlag::Censored);
    }
  }
  return flags;
}

}  // namespace

PairRun make_pair_run(Trajectory a, Trajectory b) {
  if (a.steps.size() != b.steps.size() || a.steps.empty())
    throw std::invalid_argument("make_pair_run: trajectories must have equal nonzero length");
  PairRun run;
  const auto& xa = a.steps;
  const auto& xb = b.steps;
  const std::size_t len = xa.size();
  run.parity_mismatch = parity(xa[0]) != parity(xb[0]);

  run.sigma.push_back(0);
  for (std::size_t n = 0; n < len; ++n) {
    if (xa[n] == xb[n]) run.collisions.push_back(static_cast<std::int64_t>(n));
    if (n >= 1 && xa[n].x == xb[n].x && (xa[n].x != xa[n - 1].x || xb[n].x != xb[n - 1].x)) {
      run.sigma.push_back(static_cast<std::int64_t>(n));
    }
  }

  run.z_seq.reserve(2 * len - 1);
  for (std::size_t n = 0; n < len; ++n) {
    run.z_seq.push_back(xa[n].x - xb[n].x);
    if (n + 1 < len) run.z_seq.push_back(xa[n + 1].x - xb[n].x);
  }
  run.z_jump_times.push_back(0);
  for (std::size_t i = 1; i < run.z_seq.size(); ++i) {
    if (run.z_seq[i] != run.z_seq[i - 1]) run.z_jump_times.push_back(static_cast<std::int64_t>(i));
  }
  run.traj_a = std::move(a);
  run.traj_b = std::move(b);
  return run;
}

PairRun run_pair(const Profile& profile, const Vertex& start_a, const Vertex& start_b,
                 std::int64_t horizon, const StopSpec& stops, const RngStream& master) {
  if (horizon < 0) throw std::invalid_argument("run_pair needs horizon >= 0");
  if (!is_vertex(profile, start_a) || !is_vertex(profile, start_b))
    throw std::domain_error("run_pair: start is not a vertex");
  RngStream ra = master.split(0);
  RngStream rb = master.split(1);
  Trajectory a{start_a, {start_a}, horizon, false};
  Trajectory b{start_b, {start_b}, horizon, false};

  std::optional<std::int64_t> exit_radius;
  if (stops.early_exit && stops.early_exit->kind == EarlyExit::Kind::Theta)
    exit_radius = stops.early_exit->radius;
  auto outside = [&](const Vertex& v) { return v.x >= *exit_radius || v.x <= -*exit_radius; };

  bool fired = exit_radius && (outside(start_a) || outside(start_b));
  Vertex ca = start_a;
  Vertex cb = start_b;
  for (std::int64_t n = 1; n <= horizon && !fired; ++n) {
    ca = step(profile, ca, ra);
    cb = step(profile, cb, rb);
    a.steps.push_back(ca);
    b.steps.push_back(cb);
    if (exit_radius) fired = outside(ca) || outside(cb);
  }
  if (exit_radius && !fired) a.censored = b.censored = true;
  return make_pair_run(std::move(a), std::move(b));
}

std::vector<std::int64_t> sigma_times(const PairRun& pair, std::int64_t m_max) {
  std::vector<std::int64_t> out;
  for (std::size_t m = 1; m < pair.sigma.size() && static_cast<std::int64_t>(m) <= m_max; ++m)
    out.push_back(pair.sigma[m]);
  return out;
}

std::int64_t z_zero_local_time(const PairRun& pair, std::int64_t M) {
  if (M < 0 || M >= static_cast<std::int64_t>(pair.z_jump_times.size()))
    throw std::invalid_argument("z_zero_local_time: M beyond the recorded jump times");
  std::int64_t count = 0;
  for (std::int64_t m = 0; m <= M; ++m) {
    if (pair.z_seq[static_cast<std::size_t>(pair.z_jump_times[static_cast<std::size_t>(m)])] == 0)
      ++count;
  }
  return count;
}

EventFlag psi_event(const PairRun& pair, std::int64_t m) {
  if (m < 0 || m >= static_cast<std::int64_t>(pair.sigma.size()))
    throw std::invalid_argument("psi_event: sigma_m not reached within the horizon");
  const auto& xa = pair.traj_a.steps;
  const auto& xb = pair.traj_b.steps;
  const auto s = static_cast<std::size_t>(pair.sigma[static_cast<std::size_t>(m)]);
  const std::int64_t level = iabs(xa[s].y) + iabs(xb[s].y);
  for (std::size_t n = s; n < xa.size(); ++n) {
    if (n > s && (xa[n].y == 0 || xb[n].y == 0)) return EventFlag::False;
    if (xa[n] == xb[n] && iabs(xa[n].y) + iabs(xb[n].y) >= level) return EventFlag::True;
  }
  return EventFlag::Censored;
}

ToothCount tooth_collision_count(const PairRun& pair) {
  const auto& xa = pair.traj_a.steps;
  const auto& xb = pair.traj_b.steps;
  if (xa[0].y != 0 || xa[0].x != xb[0].x || xb[0].y % 2 != 0)
    throw std::invalid_argument("tooth_collision_count needs starts (u,0), (u,v) with v even");
  ToothCount out;
  for (std::size_t n = 0; n < xa.size(); ++n) {
    if (n >= 1 && (xa[n].y == 0 || xb[n].y == 0)) return out;
    if (xa[n] == xb[n]) ++out.count;
  }
  out.censored = true;
  return out;
}

ZkhCount z_kh_count(const Profile& profile, const std::vector<Vertex>& collision_vertices,
                    std::int64_t k, std::int64_t h) {
  if (h < 0 || h > profile.tooth_height(k))
    throw std::invalid_argument("z_kh_count: need 0 <= h <= tooth_height(k)");
  const std::int64_t third = h / 3;
  const std::int64_t two_thirds = 2 * h / 3;
  ZkhCount out;
  for (const auto& v : collision_vertices) {
    if (v.x != k || v.y < 0 || v.y > h) continue;
    ++out.z_kh;
    if (v.y > third && v.y <= two_thirds) ++out.z_tilde;
  }
  return out;
}

ZkhCount z_kh_count(const Profile& profile, const PairRun& pair, std::int64_t k, std::int64_t h) {
  std::vector<Vertex> where;
  where.reserve(pair.collisions.size());
  for (auto n : pair.collisions) where.push_back(pair.traj_a.steps[static_cast<std::size_t>(n)]);
  return z_kh_count(profile, where, k, h);
}

std::vector<EventFlag> upsilon_windows(const PairRun& pair, std::int64_t d, std::int64_t m_max) {
  return windows_impl<2>({&pair.traj_a, &pair.traj_b}, pair.collisions, d, m_max);
}

std::vector<EventFlag> upsilon_windows(const TripleRun& triple, std::int64_t d,
                                       std::int64_t m_max) {
  return windows_impl<3>({&triple.trajs[0], &triple.trajs[1], &triple.trajs[2]},
                         triple.triple_collisions, d, m_max);
}

TripleRun run_triple(const Profile& profile, const std::array<Vertex, 3>& starts,
                     std::int64_t horizon, std::int64_t d, std::int64_t N,
                     const RngStream& master) {
  if (horizon < 0) throw std::invalid_argument("run_triple needs horizon >= 0");
  if (d < 1 || N < 1) throw std::invalid_argument("run_triple needs d, N >= 1");
  TripleRun run;
  std::array<RngStream, 3> rngs{master.split(0), master.split(1), master.split(2)};
  std::array<Vertex, 3> cur = starts;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!is_vertex(profile, starts[i])) throw std::domain_error("run_triple: start is not a vertex");
    run.trajs[i] = Trajectory{starts[i], {starts[i]}, horizon, false};
  }
  run.parity_mismatch =
      parity(starts[0]) != parity(starts[1]) || parity(starts[0]) != parity(starts[2]);
  auto check = [&](std::int64_t n) {
    if (cur[0] == cur[1] && cur[1] == cur[2]) run.triple_collisions.push_back(n);
  };
  check(0);
  for (std::int64_t n = 1; n <= horizon; ++n) {
    for (std::size_t i = 0; i < 3; ++i) {
      cur[i] = step(profile, cur[i], rngs[i]);
      run.trajs[i].steps.push_back(cur[i]);
    }
    check(n);
  }
  for (const auto& tr : run.trajs) run.Theta = min_opt(run.Theta, exit_time(tr, d * N));
  return run;
}

void write_collision_csv(std::ostream& os, const PairRun& pair) {
  os << "n,x,y,kind\n";
  for (auto n : pair.collisions) {
    const auto& v = pair.traj_a.steps[static_cast<std::size_t>(n)];
    os << n << ',' << v.x << ',' << v.y << ",pair\n";
  }
}

void write_collision_csv(std::ostream& os, const TripleRun& triple) {
  os << "n,x,y,kind\n";
  for (auto n : triple.triple_collisions) {
    const auto& v = triple.trajs[0].steps[static_cast<std::size_t>(n)];
    os << n << ',' << v.x << ',' << v.y << ",triple\n";
  }
}

}  // namespace combwalk
