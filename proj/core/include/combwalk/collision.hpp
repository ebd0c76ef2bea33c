#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "combwalk/profile.hpp"
#include "combwalk/rng.hpp"
#include "combwalk/walk.hpp"

namespace combwalk {

/// Three-valued outcome for events whose window may run past the horizon.
enum class EventFlag { False, True, Censored };

/**
 * Two independent walkers stepped on a shared clock.
 *
 * z_seq interlaces the spine difference: Z_{2n} = U_n - U'_n and
 * Z_{2n+1} = U_{n+1} - U'_n, for a total length 2H + 1.
 */
struct PairRun {
  Trajectory traj_a;
  Trajectory traj_b;
  std::vector<std::int64_t> collisions;    // times n with X_n = X'_n
  std::vector<std::int64_t> sigma;         // sigma_0 = 0 < sigma_1 < ...
  std::vector<std::int64_t> z_seq;
  std::vector<std::int64_t> z_jump_times;  // tau_0 = 0 < tau_1 < ...
  /// Starts have odd combined parity, so no collision is possible.
  bool parity_mismatch = false;

  std::int64_t horizon() const { return traj_a.length(); }
};

struct TripleRun {
  std::array<Trajectory, 3> trajs;
  std::vector<std::int64_t> triple_collisions;
  /// First time one of the three leaves V_{dN-1}.
  std::optional<std::int64_t> Theta;
  bool parity_mismatch = false;
};

/**
 * Run two walkers for `horizon` steps (horizon 0 allowed). Walker a uses
 * master.split(0), walker b master.split(1). If `stops.early_exit` is a theta
 * radius, both stop at the first exit by either walker.
 */
PairRun run_pair(const Profile& profile, const Vertex& start_a, const Vertex& start_b,
                 std::int64_t horizon, const StopSpec& stops, const RngStream& master);

/// Build the derived fields from two equal-length trajectories.
PairRun make_pair_run(Trajectory a, Trajectory b);

/// sigma_1 .. sigma_{m_max}, fewer if the horizon cuts them off.
std::vector<std::int64_t> sigma_times(const PairRun& pair, std::int64_t m_max);

/// |{m <= M : Z_{tau_m} = 0}|; M must index an existing jump time.
std::int64_t z_zero_local_time(const PairRun& pair, std::int64_t M);

/**
 * Psi_m: a collision at combined height >= the level at sigma_m, at some
 * sigma_m <= n < first h > sigma_m with V_h = 0 or V'_h = 0.
 * Throws std::invalid_argument if sigma_m was not reached.
 */
EventFlag psi_event(const PairRun& pair, std::int64_t m);

struct ToothCount {
  std::int64_t count = 0;
  bool censored = false;
};

/**
 * H: collisions at times n >= 0 strictly before the first n >= 1 at which
 * either walker's height is 0. The pair must start at (u,0), (u,v) with v even.
 */
ToothCount tooth_collision_count(const PairRun& pair);

struct ZkhCount {
  std::int64_t z_kh = 0;
  std::int64_t z_tilde = 0;
};

/// Collisions in Q_{k,h} = {(k,y) : 0 <= y <= h}, and in the middle-third band
/// Z_{k,floor(2h/3)} - Z_{k,floor(h/3)}. Throws if h > tooth_height(k).
ZkhCount z_kh_count(const Profile& profile, const std::vector<Vertex>& collision_vertices,
                    std::int64_t k, std::int64_t h);
ZkhCount z_kh_count(const Profile& profile, const PairRun& pair, std::int64_t k, std::int64_t h);

/**
 * Upsilon_m for m = 1..m_max: a collision in
 * [min_i theta^i_{d^m}, min_i theta^i_{d^{m+1}}). Pairwise for PairRun, triple
 * for TripleRun.
 */
std::vector<EventFlag> upsilon_windows(const PairRun& pair, std::int64_t d, std::int64_t m_max);
std::vector<EventFlag> upsilon_windows(const TripleRun& triple, std::int64_t d,
                                       std::int64_t m_max);

/// Three walkers using master.split(0..2); Theta = min exit time of V_{dN-1}.
TripleRun run_triple(const Profile& profile, const std::array<Vertex, 3>& starts,
                     std::int64_t horizon, std::int64_t d, std::int64_t N,
                     const RngStream& master);

/// CSV `n,x,y,kind`.
void write_collision_csv(std::ostream& os, const PairRun& pair);
void write_collision_csv(std::ostream& os, const TripleRun& triple);

}  // namespace combwalk
