#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "combwalk/collision.hpp"
#include "combwalk/oracle.hpp"
#include "oracles.hpp"

using namespace combwalk;

namespace {

Trajectory path(std::vector<Vertex> steps) {
  Trajectory t;
  t.start = steps.front();
  t.horizon = static_cast<std::int64_t>(steps.size()) - 1;
  t.steps = std::move(steps);
  return t;
}

std::vector<Vertex> spine(std::initializer_list<std::int64_t> xs) {
  std::vector<Vertex> out;
  for (auto x : xs) out.push_back({x, 0});
  return out;
}

}  // namespace

TEST(RunPair, HorizonZeroCountsStart) {
  const auto r = run_pair(Profile::constant(2), {0, 0}, {0, 0}, 0, {}, RngStream(1));
  EXPECT_EQ(r.collisions, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(r.z_seq, (std::vector<std::int64_t>{0}));
}

TEST(RunPair, OddParityNeverCollides) {
  const auto r = run_pair(Profile::constant(2), {0, 0}, {1, 0}, 5000, {}, RngStream(2));
  EXPECT_TRUE(r.parity_mismatch);
  EXPECT_TRUE(r.collisions.empty());
}

TEST(RunPair, ZSeqInterlaces) {
  const auto r = run_pair(Profile::constant(1), {0, 0}, {2, 0}, 300, {}, RngStream(3));
  ASSERT_EQ(r.z_seq.size(), 601u);
  const auto U = r.traj_a.U(), Up = r.traj_b.U();
  for (std::size_t n = 0; n <= 300; ++n) {
    EXPECT_EQ(r.z_seq[2 * n], U[n] - Up[n]);
    if (n < 300) EXPECT_EQ(r.z_seq[2 * n + 1], U[n + 1] - Up[n]);
  }
  EXPECT_EQ(r.z_jump_times.front(), 0);
}

TEST(RunPair, MeanCollisionsMatchDifferenceWalk) {
  const std::int64_t H = 4096;
  double exact = 0;
  for (std::int64_t n = 0; n <= H; ++n) exact += oracle::difference_return(n);
  const int reps = 10000;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto run = run_pair(Profile::constant(0), {0, 0}, {0, 0}, H, {},
                              RngStream(derive_seed(4, static_cast<std::uint64_t>(r))));
    const double c = double(run.collisions.size());
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / reps, se = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, exact, 3 * se);
}

TEST(Sigma, ConstructedHorizontalArrival) {
  const auto pr = make_pair_run(path({{0, 0}, {1, 0}}), path({{1, 0}, {1, 1}}));
  EXPECT_EQ(sigma_times(pr, 3), (std::vector<std::int64_t>{1}));
}

TEST(Sigma, DistinctTeethGiveNone) {
  const auto pr = make_pair_run(path({{0, 0}, {0, 1}, {0, 0}, {0, 1}}),
                                path({{2, 0}, {2, 1}, {2, 0}, {2, -1}}));
  EXPECT_TRUE(sigma_times(pr, 5).empty());
  EXPECT_EQ(pr.sigma, (std::vector<std::int64_t>{0}));
}

TEST(Sigma, PredicateHoldsOnRandomRuns) {
  for (int r = 0; r < 1000; ++r) {
    const auto pr = run_pair(Profile::constant(2), {0, 0}, {2, 0}, 400, {},
                             RngStream(derive_seed(5, static_cast<std::uint64_t>(r))));
    const auto U = pr.traj_a.U(), Up = pr.traj_b.U();
    const auto s = sigma_times(pr, 1000);
    for (std::size_t m = 0; m < s.size(); ++m) {
      const auto n = static_cast<std::size_t>(s[m]);
      ASSERT_GE(n, 1u);
      EXPECT_EQ(U[n], Up[n]);
      EXPECT_TRUE(U[n] != U[n - 1] || Up[n] != Up[n - 1]);
      if (m > 0) EXPECT_GT(s[m], s[m - 1]);
    }
    // Every time meeting the predicate is listed.
    std::size_t listed = 0;
    for (std::size_t n = 1; n < U.size(); ++n)
      listed += U[n] == Up[n] && (U[n] != U[n - 1] || Up[n] != Up[n - 1]);
    EXPECT_EQ(listed, s.size());
  }
}

TEST(ZLocalTime, CountsZerosAtJumpTimes) {
  const auto pr = make_pair_run(path(spine({0, 1, 0, 1})), path(spine({0, -1, 0, 1})));
  // Z: 0, 1, 2, 1, 0, 1, 0
  EXPECT_EQ(pr.z_seq, (std::vector<std::int64_t>{0, 1, 2, 1, 0, 1, 0}));
  EXPECT_EQ(pr.z_jump_times, (std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(z_zero_local_time(pr, 6), 3);
  EXPECT_EQ(z_zero_local_time(pr, 3), 1);
}

TEST(Psi, CoincidenceAtSigmaIsTrue) {
  const auto pr = make_pair_run(path({{0, 0}, {0, 1}}), path({{0, 0}, {0, -1}}));
  EXPECT_EQ(psi_event(pr, 0), EventFlag::True);
}

TEST(Psi, HorizontalFirstMoveClosesWindow) {
  const auto pr = make_pair_run(path({{0, 0}, {1, 0}, {1, 1}}), path({{0, 2}, {0, 1}, {0, 2}}));
  EXPECT_EQ(psi_event(pr, 0), EventFlag::False);
}

TEST(Psi, CensoredWindow) {
  const auto pr = make_pair_run(path({{0, 0}, {0, 1}, {0, 2}}), path({{0, 4}, {0, 5}, {0, 4}}));
  EXPECT_EQ(psi_event(pr, 0), EventFlag::Censored);
  EXPECT_THROW(psi_event(pr, 1), std::invalid_argument);
}

TEST(Psi, EstimatesInsideExactBracket) {
  const auto p = Profile::constant(16);
  for (std::int64_t v : {2, 4, 8}) {
    const auto br = psi0_probability_bracket(p, 0, v, 1);
    int hits = 0, total = 0;
    for (int r = 0; r < 10000; ++r) {
      const auto pr = run_pair(p, {0, 0}, {0, v}, 5000, {},
                               RngStream(derive_seed(6 + static_cast<std::uint64_t>(v),
                                                     static_cast<std::uint64_t>(r))));
      const auto f = psi_event(pr, 0);
      ASSERT_NE(f, EventFlag::Censored);
      hits += f == EventFlag::True;
      ++total;
    }
    const double ph = hits / double(total);
    const double se = std::sqrt(br.midpoint() * (1 - br.midpoint()) / total);
    EXPECT_GE(ph, br.lower - 3 * se) << v;
    EXPECT_LE(ph, br.upper + 3 * se) << v;
  }
}

TEST(ToothCount, StartCollisionCounts) {
  const auto pr = make_pair_run(path({{0, 0}, {1, 0}}), path({{0, 0}, {0, 1}}));
  const auto c = tooth_collision_count(pr);
  EXPECT_EQ(c.count, 1);
  EXPECT_FALSE(c.censored);
}

TEST(ToothCount, ImmediateSpineHitGivesZero) {
  const auto pr = make_pair_run(path({{0, 0}, {1, 0}}), path({{0, 2}, {0, 1}}));
  EXPECT_EQ(tooth_collision_count(pr).count, 0);
}

TEST(ToothCount, CountsBeforeReturn) {
  const auto pr = make_pair_run(path({{0, 0}, {0, 1}, {0, 2}, {0, 1}}),
                                path({{0, 2}, {0, 1}, {0, 0}, {1, 0}}));
  EXPECT_EQ(tooth_collision_count(pr).count, 1);
}

TEST(ToothCount, MeanMatchesExact) {
  const auto p = Profile::constant(16);
  const double exact = expected_tooth_collisions(16, 4).value;
  EXPECT_NEAR(exact, oracle::tooth_collisions_forward(16, 4), 1e-9);
  EXPECT_LE(exact, 2.0);
  const int reps = 20000;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto pr = run_pair(p, {0, 0}, {0, 4}, 5000, {},
                             RngStream(derive_seed(7, static_cast<std::uint64_t>(r))));
    const auto c = tooth_collision_count(pr);
    ASSERT_FALSE(c.censored);
    sum += double(c.count);
    sum2 += double(c.count) * double(c.count);
  }
  const double mean = sum / reps, se = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, exact, 3 * se);
  EXPECT_LE(mean, 2.0);
}

TEST(Zkh, Constructed) {
  const auto p = Profile::constant(9);
  EXPECT_EQ(z_kh_count(p, std::vector<Vertex>{}, 3, 9).z_kh, 0);
  const auto s = z_kh_count(p, std::vector<Vertex>{{3, 0}, {3, 0}, {2, 0}}, 3, 9);
  EXPECT_EQ(s.z_kh, 2);
  EXPECT_EQ(s.z_tilde, 0);
  const auto t = z_kh_count(p, std::vector<Vertex>{{3, 4}, {3, 6}, {3, 3}, {3, 7}, {3, -4}}, 3, 9);
  EXPECT_EQ(t.z_kh, 4);
  EXPECT_EQ(t.z_tilde, 2);
  EXPECT_THROW(z_kh_count(p, std::vector<Vertex>{}, 3, 10), std::invalid_argument);
}

TEST(Upsilon, EarlyCollisionsOnly) {
  const auto pr = make_pair_run(path(spine({0, 1, 2, 3, 4})), path(spine({0, -1, -2, -3, -4})));
  EXPECT_EQ(upsilon_windows(pr, 2, 1), (std::vector<EventFlag>{EventFlag::False}));
}

TEST(Upsilon, ConstructedWindowHit) {
  const auto pr =
      make_pair_run(path(spine({0, 1, 2, 3, 2, 3, 4})), path(spine({0, -1, 0, 1, 2, 3, 4})));
  EXPECT_EQ(upsilon_windows(pr, 2, 1), (std::vector<EventFlag>{EventFlag::True}));
}

// On Z with d = 2 each window holds a collision with probability near 0.57,
// not 0.9; compared against an independent plain simulation.
TEST(Upsilon, FlatLineWindowsMatchLineSimulation) {
  const std::int64_t d = 2, m_max = 5;
  const int reps = 4000;
  std::vector<int> hits(m_max, 0);
  for (int r = 0; r < reps; ++r) {
    StopSpec s;
    s.early_exit = EarlyExit::theta(64);
    const auto pr = run_pair(Profile::constant(0), {0, 0}, {0, 0}, 10000000, s,
                             RngStream(derive_seed(8, static_cast<std::uint64_t>(r))));
    const auto f = upsilon_windows(pr, d, m_max);
    for (std::size_t m = 0; m < f.size(); ++m) {
      ASSERT_NE(f[m], EventFlag::Censored);
      hits[m] += f[m] == EventFlag::True;
    }
  }
  const auto ref = oracle::upsilon_fractions_line(d, m_max, reps, 2024);
  for (std::size_t m = 0; m < std::size_t(m_max); ++m) {
    const double a = hits[m] / double(reps), b = ref[m];
    const double pooled = 0.5 * (a + b);
    const double z = (a - b) / std::sqrt(2 * pooled * (1 - pooled) / reps);
    EXPECT_GT(oracle::normal_p(z), 1e-3) << "window " << m + 1 << ": " << a << " vs " << b;
    EXPECT_GT(a, 0.4);
  }
}

TEST(RunTriple, Trivial) {
  const auto t = run_triple(Profile::constant(1), {Vertex{0, 0}, {0, 0}, {0, 0}}, 0, 2, 4,
                            RngStream(1));
  EXPECT_EQ(t.triple_collisions, (std::vector<std::int64_t>{0}));
  const auto u = run_triple(Profile::constant(1), {Vertex{0, 0}, {1, 0}, {0, 0}}, 2000, 2, 4,
                            RngStream(2));
  EXPECT_TRUE(u.parity_mismatch);
  EXPECT_TRUE(u.triple_collisions.empty());
}

TEST(RunTriple, ThetaIsFirstExit) {
  const auto t = run_triple(Profile::constant(2), {Vertex{0, 0}, {2, 0}, {-2, 0}}, 100000, 2, 4,
                            RngStream(3));
  ASSERT_TRUE(t.Theta.has_value());
  for (const auto& tr : t.trajs) {
    for (std::int64_t n = 0; n < *t.Theta; ++n) EXPECT_LT(std::abs(tr.steps[n].x), 8);
  }
  bool any = false;
  for (const auto& tr : t.trajs) any |= std::abs(tr.steps[*t.Theta].x) >= 8;
  EXPECT_TRUE(any);
}

TEST(CollisionCsv, Format) {
  const auto pr = make_pair_run(path({{0, 0}, {0, 1}}), path({{0, 0}, {1, 0}}));
  std::ostringstream os;
  write_collision_csv(os, pr);
  EXPECT_EQ(os.str(), "n,x,y,kind\n0,0,0,pair\n");
}
