#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace combwalk {

/// A vertex (x, y) of the wedge comb: x on the spine, y the height in tooth x.
struct Vertex {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// (x + y) mod 2. Flips on every edge.
constexpr int parity(const Vertex& v) { return static_cast<int>(((v.x + v.y) % 2 + 2) % 2); }

namespace family {

struct Constant {
  double a = 0.0;
};
/// f(n) = |n|^alpha
struct Power {
  double alpha = 1.0;
};
/// f(n) = |n| log^beta(|n| v 1)
struct LinLog {
  double beta = 0.0;
};
/// f(n) = |n| log(|n| v 1)
struct NLogN {};
/// Explicit finite map; zero outside its support.
struct Table {
  std::map<std::int64_t, double> values;
};

struct Geometric {
  double p = 0.5;  // support {0, 1, 2, ...}
};
struct Poisson {
  double lambda = 1.0;
};
/// weights[k] is the (unnormalized) probability of height k.
struct Empirical {
  std::vector<double> weights;
};
using Distribution = std::variant<Geometric, Poisson, Empirical>;

/// i.i.d. heights drawn lazily from `distribution`, keyed by (seed, x).
struct IidSample {
  Distribution distribution;
  std::uint64_t profile_seed = 0;
};

}  // namespace family

using ProfileFamily =
    std::variant<family::Constant, family::Power, family::LinLog, family::NLogN, family::Table,
                 family::IidSample>;

/**
 * Tooth-height function f of a wedge comb Comb(Z, f).
 *
 * Immutable after construction. Integer tooth heights floor(f(x)) are
 * precomputed on |x| <= kCacheRadius; outside that window they are evaluated
 * on demand, which is also pure, so concurrent readers always agree.
 */
class Profile {
 public:
  static constexpr std::int64_t kCacheRadius = std::int64_t{1} << 16;
  /// Heights saturate here so that y arithmetic cannot overflow.
  static constexpr std::int64_t kMaxHeight = std::int64_t{1} << 60;

  explicit Profile(ProfileFamily family);

  static Profile constant(double a) { return Profile(family::Constant{a}); }
  static Profile power(double alpha) { return Profile(family::Power{alpha}); }
  static Profile linlog(double beta) { return Profile(family::LinLog{beta}); }
  static Profile nlogn() { return Profile(family::NLogN{}); }

  const ProfileFamily& family() const { return family_; }

  /// f(x), a non-negative real.
  double value(std::int64_t x) const;

  /// floor(f(x)).
  std::int64_t tooth_height(std::int64_t x) const {
    if (x >= -kCacheRadius && x <= kCacheRadius) return center_[x];
    return compute_height(x);
  }

  /// True when f(x) = f(-x) and f is nondecreasing in |x|.
  bool symmetric_monotone() const;

  /// Short family name as used in the JSON schema.
  std::string family_name() const;

 private:
  std::int64_t compute_height(std::int64_t x) const;

  ProfileFamily family_;
  std::shared_ptr<const std::vector<std::int64_t>> heights_;
  const std::int64_t* center_ = nullptr;
};

std::int64_t tooth_height(const Profile& profile, std::int64_t x);

bool is_vertex(const Profile& profile, const Vertex& v);

/// Number of neighbors of a valid vertex: 1, 2, 3 or 4.
int degree(const Profile& profile, const Vertex& v);

/**
 * Neighbors of v, in the canonical order used by the walk engine:
 * spine vertex: (x-1,0), (x+1,0), then (x,1), (x,-1) if the tooth is nonempty;
 * tooth vertex: (x,y-1), then (x,y+1) when it exists.
 * Throws std::domain_error for an invalid vertex.
 */
std::vector<Vertex> neighbors(const Profile& profile, const Vertex& v);

/// 1 v max_{|i| <= n} f(i).
double breve_f(const Profile& profile, std::int64_t n);

/// sum_{n=1}^{N} 1 / breve_f(n). Exploration only; it cannot certify divergence.
double reciprocal_partial_sum(const Profile& profile, std::int64_t N);

enum class Verdict {
  InfiniteCollision_Thm1_1,
  FiniteCollision_Thm4_1,
  TripleCollision_Thm3_1,
  Unknown,
};

std::string to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Unknown;
  /// All verdicts that apply, primary first (e.g. constant profiles also have
  /// the triple-collision property).
  std::vector<Verdict> verdicts;
  std::string witness;
};

/// Symbolic classification per family and parameters; never numerical.
Classification classify_profile(const Profile& profile);

struct Truncation {
  std::vector<Vertex> vertices;
  std::size_t count = 0;
};

/// |V_n| = sum_{|i| <= n} (2 floor(f(i)) + 1) without enumerating.
std::size_t truncation_size(const Profile& profile, std::int64_t n);

/// All vertices with |x| <= n, ordered by (x, y). Throws ResourceError if the
/// count exceeds `cap`.
Truncation enumerate_truncation(const Profile& profile, std::int64_t n, std::size_t cap);

nlohmann::json to_json(const Profile& profile);
/// Throws std::invalid_argument on schema violations, including unknown keys.
Profile profile_from_json(const nlohmann::json& j);

}  // namespace combwalk
