#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "combwalk/errors.hpp"
#include "combwalk/oracle.hpp"
#include "combwalk/runner.hpp"
#include "oracles.hpp"

using namespace combwalk;
using nlohmann::json;

namespace {

ExperimentConfig make(Profile p, Estimator e, std::int64_t replicas, std::uint64_t seed,
                      std::int64_t horizon = kDefaultHorizon) {
  ExperimentConfig c;
  c.profile = std::move(p);
  c.estimator = std::move(e);
  c.replicas = replicas;
  c.master_seed = seed;
  c.horizon = horizon;
  return c;
}

json base_config() {
  return json::parse(R"({
    "schema": 1,
    "profile": {"family": "constant", "params": {"a": 64}},
    "estimator": {"kind": "PsiZero", "v": 2},
    "replicas": 4000,
    "master_seed": 99
  })");
}

}  // namespace

TEST(Runner, ConfigRoundTrip) {
  const auto c = config_from_json(base_config());
  const auto j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  EXPECT_EQ(fingerprint(c), fingerprint(config_from_json(j)));
  EXPECT_EQ(fingerprint(c).size(), 16u);
  auto other = base_config();
  other["master_seed"] = 100;
  EXPECT_NE(fingerprint(config_from_json(other)), fingerprint(c));
}

TEST(Runner, ConfigRejectsBadInput) {
  auto j = base_config();
  j["extra"] = 1;
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["schema"] = 2;
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["estimator"]["w"] = 3;
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["estimator"]["kind"] = "Nope";
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
}

TEST(Runner, ZeroReplicasRejected) {
  EXPECT_THROW(run_estimator(make(Profile::constant(0), est::GamblerRuin{3}, 0, 1)),
               std::invalid_argument);
  EXPECT_THROW(run_estimator(make(Profile::constant(4), est::PsiZero{0, 3, {}}, 10, 1)),
               std::invalid_argument);
  EXPECT_THROW(run_estimator(make(Profile::constant(0), est::GamblerRuin{0}, 10, 1)),
               std::invalid_argument);
}

TEST(Runner, GamblerRuin) {
  const auto e = run_estimator(make(Profile::constant(0), est::GamblerRuin{3}, 100000, 7));
  EXPECT_NEAR(e.point, 1.0 / 6, 3 * e.std_error);
  EXPECT_LE(e.ci_lo, e.point);
  EXPECT_GE(e.ci_hi, e.point);
  EXPECT_EQ(e.interval, IntervalKind::Wilson);
  EXPECT_EQ(e.censored, 0);
  EXPECT_EQ(e.replicas, 100000);
}

TEST(Runner, GamblerRuinCoverage) {
  int covered = 0;
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    const auto e = run_estimator(
        make(Profile::constant(0), est::GamblerRuin{2}, 400, derive_seed(555, std::uint64_t(r))),
        {1});
    covered += e.ci_lo <= 0.25 && 0.25 <= e.ci_hi;
  }
  EXPECT_GE(covered, 930);
  EXPECT_LE(covered, 970);
}

TEST(Runner, PsiZeroInsideBracket) {
  const auto p = Profile::constant(64);
  const auto e = run_estimator(make(p, est::PsiZero{0, 4, {}}, 20000, 11));
  const auto br = psi0_probability_bracket(p, 0, 4, 1);
  EXPECT_GE(e.point, br.lower - 3 * e.std_error);
  EXPECT_LE(e.point, br.upper + 3 * e.std_error);
}

TEST(Runner, ToothHMatchesExact) {
  const auto e = run_estimator(make(Profile::constant(16), est::ToothH{0, 4, {}}, 20000, 12));
  EXPECT_EQ(e.interval, IntervalKind::Normal);
  EXPECT_NEAR(e.point, expected_tooth_collisions(16, 4).value, 3 * e.std_error);
}

TEST(Runner, DeterministicAcrossThreads) {
  const auto c = make(Profile::power(1), est::CollisionBeforeExit{8, 4, {}}, 500, 13);
  const auto a = run_estimator(c, {1});
  const auto b = run_estimator(c, {3});
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(to_csv_row(a), to_csv_row(b));
  EXPECT_EQ(a.fingerprint, fingerprint(c));
}

TEST(Runner, ReplicaStreamsDistinct) {
  std::set<std::array<std::uint64_t, 4>> seen;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    auto s = replica_stream(42, i);
    const std::uint64_t a = s.next_u64(), b = s.next_u64(), c = s.next_u64(), d = s.next_u64();
    seen.insert({a, b, c, d});
  }
  EXPECT_EQ(seen.size(), 20000u);
}

TEST(Runner, AllCensoredIsError) {
  const auto c = make(Profile::constant(2), est::CollisionBeforeExit{16, 4, {}}, 20, 14, 1);
  EXPECT_THROW(run_estimator(c), EstimationError);
}

TEST(Runner, LocalTimeQuantileMatchesExactLaw) {
  const std::int64_t N = 8;
  const auto law = oracle::local_time_law(N * N);
  double cum = 0;
  std::int64_t median = 0;
  for (std::size_t k = 0; k < law.size(); ++k) {
    cum += law[k];
    if (cum >= 0.5) {
      median = static_cast<std::int64_t>(k);
      break;
    }
  }
  const auto e = run_estimator(make(Profile::constant(0), est::LocalTimeQuantile{N, 0.5, 1.0}, 4000, 15));
  EXPECT_EQ(e.interval, IntervalKind::OrderStatistic);
  EXPECT_LE(e.ci_lo, double(median));
  EXPECT_GE(e.ci_hi, double(median));
}

TEST(Runner, UpsilonOnLineMatchesLineSimulation) {
  const auto e = run_estimator(make(Profile::constant(0), est::UpsilonWindows{2, 5}, 4000, 16));
  const auto ref = oracle::upsilon_fractions_line(2, 5, 20000, 77);
  double mean = 0;
  for (double f : ref) mean += f / 5;
  // Window indicators are positively correlated; 0.5 / sqrt(n) bounds the
  // standard error of a mean of [0,1] variables.
  EXPECT_NEAR(e.point, mean, 4 * (e.std_error + 0.5 / std::sqrt(20000.0)));
}

TEST(Runner, CsvRow) {
  const auto e = run_estimator(make(Profile::constant(0), est::GamblerRuin{2}, 100, 17));
  const auto row = to_csv_row(e);
  EXPECT_EQ(row.rfind("GamblerRuin,\"", 0), 0u);
  EXPECT_NE(row.find(e.fingerprint), std::string::npos);
  const std::string header = kEstimateCsvHeader;
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 9);
}

TEST(Sweep, EmptyGridRejected) {
  EXPECT_THROW(sweep(base_config(), {}), std::invalid_argument);
}

TEST(Sweep, BadPointCarriesError) {
  const auto rows = sweep(base_config(), {json{{"estimator", {{"v", 3}}}},
                                          json{{"estimator", {{"v", 2}}}}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_FALSE(rows[0].estimate.has_value());
  EXPECT_TRUE(rows[1].error.empty());
  ASSERT_TRUE(rows[1].estimate.has_value());
}

TEST(Sweep, PointsAreNamespaced) {
  const auto p2 = json{{"estimator", {{"v", 2}}}};
  const auto p8 = json{{"estimator", {{"v", 8}}}};
  const auto a = sweep(base_config(), {p2});
  const auto b = sweep(base_config(), {p8, p2});
  ASSERT_TRUE(a[0].estimate && b[1].estimate);
  EXPECT_EQ(to_json(*a[0].estimate).dump(), to_json(*b[1].estimate).dump());
  EXPECT_NE(a[0].estimate->master_seed, 99u);
}

TEST(Sweep, PsiZeroScalesLikeInverseV) {
  std::vector<json> grid;
  for (int v : {2, 4, 8, 16}) grid.push_back(json{{"estimator", {{"v", v}}}});
  auto base = base_config();
  base["replicas"] = 20000;
  const auto rows = sweep(base, grid);
  double lo = 1e9, hi = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].estimate.has_value()) << rows[i].error;
    const double s = double(grid[i]["estimator"]["v"].get<int>()) * rows[i].estimate->point;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  EXPECT_LE(hi / lo, 4.0);
}
