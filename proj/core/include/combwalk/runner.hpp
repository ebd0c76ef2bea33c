#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "combwalk/profile.hpp"
#include "combwalk/rng.hpp"

namespace combwalk {

namespace est {

/// P(hit 2v before 0) for a walk on {0..2v} started at 1.
struct GamblerRuin {
  std::int64_t v = 1;
};
/// P^{(u,0),(u,v)}(Psi_0). L only matters to the exact bracket.
struct PsiZero {
  std::int64_t u = 0;
  std::int64_t v = 2;
  std::optional<std::int64_t> L;
};
/// E(H) from (u,0), (u,v); h, if given, must equal tooth_height(u).
struct ToothH {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::optional<std::int64_t> h;
};
/// P(X_n = X'_n for some n < theta_dN ^ theta'_dN).
struct CollisionBeforeExit {
  std::int64_t N = 16;
  std::int64_t d = 4;
  std::optional<std::array<Vertex, 2>> starts;
};
/// P(sigma_N >= theta_dN ^ theta'_dN).
struct SigmaRace {
  std::int64_t N = 16;
  std::int64_t d = 4;
  std::optional<std::array<Vertex, 2>> starts;
};
/// P(X_n = X'_n = X''_n for some n < Theta).
struct TripleBeforeExit {
  std::int64_t N = 16;
  std::int64_t d = 4;
  std::optional<std::array<Vertex, 3>> starts;
};
/// E(Z_{k,h}) over the configured horizon from (0,0), (0,0).
struct ZkhMean {
  std::int64_t k = 8;
  std::optional<std::int64_t> h;  // default tooth_height(k)
};
/// q-quantile of xi(0, ceil(scale N^2)) for a simple random walk on Z.
struct LocalTimeQuantile {
  std::int64_t N = 16;
  double q = 0.5;
  double scale = 1.0;
};
/// Mean fraction of windows m = 1..m_max with a collision, from (0,0), (0,0).
struct UpsilonWindows {
  std::int64_t d = 2;
  std::int64_t m_max = 5;
};

}  // namespace est

using Estimator = std::variant<est::GamblerRuin, est::PsiZero, est::ToothH,
                               est::CollisionBeforeExit, est::SigmaRace, est::TripleBeforeExit,
                               est::ZkhMean, est::LocalTimeQuantile, est::UpsilonWindows>;

std::string estimator_name(const Estimator& e);

inline constexpr std::int64_t kDefaultHorizon = 1'000'000;

struct ExperimentConfig {
  Profile profile = Profile::constant(0.0);
  Estimator estimator = est::GamblerRuin{};
  std::int64_t replicas = 1000;
  std::int64_t horizon = kDefaultHorizon;
  std::uint64_t master_seed = 0;
  double ci_level = 0.95;
};

/// Schema-1 config object. Unknown keys are rejected with std::invalid_argument.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json estimator_params(const Estimator& e);

/// FNV-1a of the canonical JSON serialization, as 16 hex digits.
std::string fingerprint(const ExperimentConfig& config);

enum class IntervalKind { Wilson, Normal, OrderStatistic };

struct Estimate {
  std::string estimator;
  nlohmann::json params;
  double point = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t replicas = 0;  // replicas run
  std::int64_t censored = 0;  // of which censored (excluded from point)
  std::uint64_t master_seed = 0;
  std::string fingerprint;
  IntervalKind interval = IntervalKind::Normal;

  double censored_fraction() const {
    return replicas > 0 ? static_cast<double>(censored) / static_cast<double>(replicas) : 0.0;
  }
};

inline constexpr const char* kEstimateCsvHeader =
    "estimator,params,point,stderr,ci_lo,ci_hi,replicas,censored,master_seed,fingerprint";

std::string to_csv_row(const Estimate& e);
nlohmann::json to_json(const Estimate& e);

/// Outcome of one replica.
struct ReplicaOutcome {
  double value = 0.0;
  bool censored = false;
};

struct RunOptions {
  /// 0 means: COMBWALK_THREADS if set, else hardware concurrency.
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

/// The random stream of replica `index`; walker j uses .split(j).
inline RngStream replica_stream(std::uint64_t master, std::uint64_t index) {
  return RngStream(derive_seed(master, index));
}

/// Run one replica of `config` (exposed for tests).
ReplicaOutcome run_replica(const ExperimentConfig& config, std::uint64_t index);

/**
 * Run all replicas and fold them in replica-index order.
 *
 * Throws std::invalid_argument for an invalid config (including replicas <= 0)
 * and EstimationError if every replica is censored.
 */
Estimate run_estimator(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepRow {
  nlohmann::json config;
  std::optional<Estimate> estimate;
  std::string error;  // non-empty if this grid point failed
};

/**
 * One estimate per grid point. Each point is `base` with the patch applied
 * (RFC 7386 merge); its master seed is derive_seed(base master, fingerprint),
 * so adding points never changes the others.
 */
std::vector<SweepRow> sweep(const nlohmann::json& base, const std::vector<nlohmann::json>& grid,
                            const RunOptions& options = {});

}  // namespace combwalk
