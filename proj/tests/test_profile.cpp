#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "combwalk/errors.hpp"
#include "combwalk/profile.hpp"
#include "combwalk/rng.hpp"
#include "oracles.hpp"

using namespace combwalk;

namespace {

std::set<Vertex> as_set(const std::vector<Vertex>& v) { return {v.begin(), v.end()}; }

Profile iid_geometric(double p, std::uint64_t seed) {
  return Profile(family::IidSample{family::Geometric{p}, seed});
}

std::vector<Profile> fuzz_profiles() {
  return {Profile::constant(0),   Profile::constant(3),    Profile::power(0.5),
          Profile::power(1.5),    Profile::linlog(0),      Profile::linlog(2.5),
          Profile::nlogn(),       iid_geometric(0.3, 7),
          Profile(family::Table{{{-2, 4.0}, {0, 1.5}, {5, 9.0}}})};
}

}  // namespace

TEST(Profile, HeightExamples) {
  EXPECT_EQ(tooth_height(Profile::constant(0), 7), 0);
  EXPECT_EQ(tooth_height(Profile::linlog(0), -5), 5);
  EXPECT_DOUBLE_EQ(Profile::linlog(0).value(-5), 5.0);
  const auto p = iid_geometric(0.5, 42);
  EXPECT_EQ(tooth_height(p, 3), tooth_height(p, 3));
  EXPECT_EQ(tooth_height(p, 3), tooth_height(iid_geometric(0.5, 42), 3));
}

TEST(Profile, HeightsOutsideCacheMatchFormula) {
  const auto p = Profile::power(1.0);
  const std::int64_t far = Profile::kCacheRadius + 12345;
  EXPECT_EQ(tooth_height(p, far), far);
  EXPECT_EQ(tooth_height(p, -far), far);
  EXPECT_EQ(tooth_height(Profile::nlogn(), 100),
            static_cast<std::int64_t>(std::floor(100 * std::log(100.0))));
}

TEST(Profile, IidGeometricHeightsHaveGeometricLaw) {
  const auto p = iid_geometric(0.5, 2024);
  const int bins = 12;
  std::vector<std::int64_t> counts(bins, 0);
  for (std::int64_t x = -50000; x < 50000; ++x)
    ++counts[std::min<std::int64_t>(tooth_height(p, x), bins - 1)];
  std::vector<double> probs(bins);
  for (int k = 0; k < bins - 1; ++k) probs[k] = 0.5 * std::pow(0.5, k);
  probs[bins - 1] = std::pow(0.5, bins - 1);
  EXPECT_GT(oracle::chi_square_p(oracle::pearson(counts, probs), bins - 1), 1e-3);
}

TEST(Profile, IidSeedsDiffer) {
  const auto a = iid_geometric(0.5, 1), b = iid_geometric(0.5, 2);
  int diff = 0;
  for (std::int64_t x = 0; x < 200; ++x) diff += tooth_height(a, x) != tooth_height(b, x);
  EXPECT_GT(diff, 50);
}

TEST(Profile, NeighborExamples) {
  EXPECT_EQ(as_set(neighbors(Profile::constant(0), {0, 0})),
            (std::set<Vertex>{{-1, 0}, {1, 0}}));
  EXPECT_EQ(as_set(neighbors(Profile::constant(2), {0, 0})),
            (std::set<Vertex>{{-1, 0}, {1, 0}, {0, 1}, {0, -1}}));
  EXPECT_EQ(as_set(neighbors(Profile::constant(2), {3, 2})), (std::set<Vertex>{{3, 1}}));
  EXPECT_EQ(as_set(neighbors(Profile::constant(2), {3, -1})),
            (std::set<Vertex>{{3, 0}, {3, -2}}));
}

TEST(Profile, NeighborOrderIsCanonical) {
  const auto p = Profile::constant(2);
  EXPECT_EQ(neighbors(p, {0, 0}), (std::vector<Vertex>{{-1, 0}, {1, 0}, {0, 1}, {0, -1}}));
  EXPECT_EQ(neighbors(p, {0, -1}), (std::vector<Vertex>{{0, 0}, {0, -2}}));
}

TEST(Profile, InvalidVertexThrows) {
  EXPECT_THROW(neighbors(Profile::constant(2), {0, 3}), std::domain_error);
  EXPECT_THROW(neighbors(Profile::constant(0), {0, 1}), std::domain_error);
  EXPECT_FALSE(is_vertex(Profile::constant(2), {4, -3}));
  EXPECT_TRUE(is_vertex(Profile::constant(2), {4, -2}));
}

TEST(Profile, EdgeSymmetryAndDegree) {
  for (const auto& p : fuzz_profiles()) {
    RngStream rng(derive_seed(99, 0));
    for (int trial = 0; trial < 2000; ++trial) {
      const std::int64_t x = static_cast<std::int64_t>(rng.uniform_below(41)) - 20;
      const std::int64_t h = tooth_height(p, x);
      const std::int64_t y =
          static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(2 * h + 1))) - h;
      const Vertex v{x, y};
      ASSERT_TRUE(is_vertex(p, v));
      const auto nb = neighbors(p, v);
      EXPECT_EQ(static_cast<int>(nb.size()), degree(p, v));
      EXPECT_GE(nb.size(), 1u);
      EXPECT_LE(nb.size(), 4u);
      for (const auto& u : nb) {
        ASSERT_TRUE(is_vertex(p, u));
        EXPECT_EQ(parity(u), 1 - parity(v));
        const auto back = neighbors(p, u);
        EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
      }
    }
  }
}

TEST(Profile, BreveFExamples) {
  EXPECT_DOUBLE_EQ(breve_f(Profile::constant(0), 10), 1.0);
  EXPECT_DOUBLE_EQ(breve_f(Profile::constant(5), 3), 5.0);
  EXPECT_DOUBLE_EQ(breve_f(Profile::linlog(0), 4), 4.0);
  const Profile t(family::Table{{{-7, 3.0}, {2, 2.0}}});
  EXPECT_DOUBLE_EQ(breve_f(t, 6), 2.0);
  EXPECT_DOUBLE_EQ(breve_f(t, 7), 3.0);
}

TEST(Profile, ReciprocalSumExamples) {
  EXPECT_NEAR(reciprocal_partial_sum(Profile::constant(5), 10), 2.0, 1e-12);
  EXPECT_NEAR(reciprocal_partial_sum(Profile::constant(0), 7), 7.0, 1e-12);
  EXPECT_THROW(reciprocal_partial_sum(Profile::constant(1), 0), std::invalid_argument);
}

TEST(Profile, ReciprocalSumMatchesLoop) {
  const Profile asym(family::Table{{{-3, 6.0}, {1, 2.0}, {4, 0.5}, {9, 12.0}}});
  for (const auto& p : {Profile::power(0.7), Profile::linlog(2.0), Profile::nlogn(), asym}) {
    for (std::int64_t N : {1, 5, 100, 3000}) {
      double s = 0, run = 0;
      for (std::int64_t n = 0; n <= N; ++n) {
        run = std::max({run, p.value(n), p.value(-n)});
        if (n >= 1) s += 1.0 / std::max(1.0, run);
      }
      EXPECT_NEAR(reciprocal_partial_sum(p, N), s, 1e-9 * s);
    }
  }
}

// The LinLog(3) tail between 1e6 and 1e7 is about 1/(2 ln^2) differences, not
// below 1e-6; compare against the integral of 1/(x ln^3 x).
TEST(Profile, ReciprocalSumLinLogTailMatchesIntegral) {
  const auto p = Profile::linlog(3);
  const double d = reciprocal_partial_sum(p, 10000000) - reciprocal_partial_sum(p, 1000000);
  const auto prim = [](double x) { return -1.0 / (2.0 * std::pow(std::log(x), 2)); };
  const double integral = prim(1e7) - prim(1e6);
  EXPECT_NEAR(d, integral, 0.01 * integral);
  EXPECT_GT(d, 1e-6);
}

TEST(Profile, ClassificationExamples) {
  EXPECT_EQ(classify_profile(Profile::nlogn()).verdict, Verdict::InfiniteCollision_Thm1_1);
  EXPECT_EQ(classify_profile(Profile::linlog(3)).verdict, Verdict::FiniteCollision_Thm4_1);
  EXPECT_EQ(classify_profile(Profile::linlog(1.5)).verdict, Verdict::Unknown);
  EXPECT_EQ(classify_profile(Profile::linlog(1)).verdict, Verdict::InfiniteCollision_Thm1_1);
  EXPECT_EQ(classify_profile(Profile::power(1)).verdict, Verdict::InfiniteCollision_Thm1_1);
  EXPECT_EQ(classify_profile(Profile::power(2)).verdict, Verdict::Unknown);
  const auto c = classify_profile(Profile::constant(2));
  EXPECT_EQ(c.verdict, Verdict::InfiniteCollision_Thm1_1);
  EXPECT_NE(std::find(c.verdicts.begin(), c.verdicts.end(), Verdict::TripleCollision_Thm3_1),
            c.verdicts.end());
  EXPECT_FALSE(c.witness.empty());
  EXPECT_EQ(classify_profile(iid_geometric(0.5, 1)).verdict, Verdict::TripleCollision_Thm3_1);
}

TEST(Profile, TruncationExamples) {
  EXPECT_EQ(enumerate_truncation(Profile::constant(0), 4, 1000).count, 9u);
  EXPECT_EQ(enumerate_truncation(Profile::constant(1), 4, 1000).count, 27u);
  const auto t = enumerate_truncation(Profile::constant(1), 100, 10000);
  EXPECT_EQ(t.count, 603u);
  EXPECT_LE(200u, t.count);
  EXPECT_LE(t.count, 800u);
}

TEST(Profile, TruncationEnumerationIsConsistent) {
  for (const auto& p : fuzz_profiles()) {
    for (std::int64_t n : {1, 3, 10}) {
      const auto t = enumerate_truncation(p, n, 1u << 20);
      ASSERT_EQ(t.count, t.vertices.size());
      EXPECT_EQ(t.count, truncation_size(p, n));
      EXPECT_TRUE(std::is_sorted(t.vertices.begin(), t.vertices.end()));
      EXPECT_EQ(std::adjacent_find(t.vertices.begin(), t.vertices.end()), t.vertices.end());
      for (const auto& v : t.vertices) {
        EXPECT_TRUE(is_vertex(p, v));
        EXPECT_LE(std::abs(v.x), n);
      }
    }
  }
}

TEST(Profile, TruncationCapThrows) {
  EXPECT_THROW(enumerate_truncation(Profile::constant(1), 100, 602), ResourceError);
  EXPECT_NO_THROW(enumerate_truncation(Profile::constant(1), 100, 603));
}

TEST(Profile, JsonRoundTrip) {
  for (const auto& p : fuzz_profiles()) {
    const auto j = to_json(p);
    const auto q = profile_from_json(j);
    EXPECT_EQ(to_json(q), j);
    EXPECT_EQ(q.family_name(), p.family_name());
    for (std::int64_t x = -30; x <= 30; ++x) EXPECT_EQ(tooth_height(q, x), tooth_height(p, x));
  }
}

TEST(Profile, JsonRejectsBadInput) {
  using nlohmann::json;
  EXPECT_THROW(profile_from_json(json{{"family", "cubic"}}), std::invalid_argument);
  EXPECT_THROW(profile_from_json(json{{"family", "constant"}, {"params", {{"b", 1}}}}),
               std::invalid_argument);
  EXPECT_THROW(profile_from_json(json{{"family", "power"}, {"params", {{"alpha", 1}}}, {"x", 1}}),
               std::invalid_argument);
  EXPECT_THROW(profile_from_json(json{{"family", "constant"},
                                      {"params", {{"a", 1}}},
                                      {"profile_seed", 3}}),
               std::invalid_argument);
  EXPECT_THROW(profile_from_json(json{{"family", "iid"},
                                      {"params", {{"distribution", "geometric"}, {"p", 0.5}}}}),
               std::invalid_argument);
  EXPECT_THROW(profile_from_json(json::array()), std::invalid_argument);
}
