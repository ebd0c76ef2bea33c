#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "combwalk/chain.hpp"
#include "combwalk/profile.hpp"

namespace combwalk {

enum class SolveMode { Float, Rational };

struct OracleValue {
  double value = 0.0;
  std::optional<Rational> exact;  // set in rational mode
};

/// P(hit b before 0) for a simple random walk on {0..b} started at a; a / b.
OracleValue absorption_probability(std::int64_t a, std::int64_t b,
                                   SolveMode mode = SolveMode::Float);

/// Distribution at time t of the chain killed on absorption, from `start`.
/// Throws ResourceError if t > max_steps.
std::vector<double> killed_kernel(const FiniteChain& chain, std::int32_t start, std::int64_t t,
                                  std::int64_t max_steps = 10'000'000);

/// Expected visits to every transient state before absorption, from `start`.
std::vector<double> green_function(const FiniteChain& chain, std::int32_t start);

/// E[theta_n] from `start` (inside V_{n-1}), via the fundamental matrix.
double expected_exit_time(const Profile& profile, const Vertex& start, std::int64_t n,
                          std::size_t budget = 2'000'000);

/// E[D] for one sojourn at spine column x (time until the next horizontal move).
double expected_sojourn(const Profile& profile, std::int64_t x);

/**
 * E(H) for two walkers started at heights 0 and v of a tooth of height h:
 * collisions at times n >= 0 before the first n >= 1 at which either height
 * is 0. Spine vertex (u,0) has degree 4 (2 if h = 0), so a horizontal move
 * ends the count. Throws ResourceError if the product space exceeds `budget`.
 */
OracleValue expected_tooth_collisions(std::int64_t h, std::int64_t v,
                                      SolveMode mode = SolveMode::Float,
                                      std::size_t budget = 4'000'000);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t states = 0;

  double midpoint() const { return 0.5 * (lower + upper); }
};

/**
 * P^{(u,0),(u,v)}(Psi_0) on the comb truncated at |x| <= L, solved twice:
 * leaving the truncation counts as failure (lower) and as success (upper).
 */
Bracket psi0_probability_bracket(const Profile& profile, std::int64_t u, std::int64_t v,
                                 std::int64_t L, std::size_t budget = 4'000'000);

struct KernelDecay {
  std::int64_t t = 0;
  double max_kernel = 0.0;  // max over |x| <= n of q_t((0,0), x)
  double bound = 0.0;       // 1 / (n^2 log^beta n)
  double ratio = 0.0;       // max_kernel / bound
};

/// Killed kernel on LinLog(beta) truncated at |x| <= 2n, at t = ceil(n^3 log^beta n).
KernelDecay kernel_decay_check(double beta, std::int64_t n, std::size_t budget = 2'000'000);

/// {"quantity", "params", "value", "mode"}.
nlohmann::json oracle_json(const std::string& quantity, const nlohmann::json& params,
                           const OracleValue& value);
nlohmann::json oracle_json(const std::string& quantity, const nlohmann::json& params,
                           const Bracket& bracket);

}  // namespace combwalk
