#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "combwalk/profile.hpp"

namespace combwalk {

using Rational = boost::multiprecision::cpp_rational;

/// A transition probability num/den kept exactly alongside its double value.
struct Weight {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational exact() const { return Rational(num, den); }
};

/**
 * Finite absorbing Markov chain.
 *
 * `rows[i]` lists transitions between transient states; `exits[label][i]` is
 * the probability of jumping from transient state i into the absorbing set
 * `label`. Every transient row plus its exits sums to one.
 */
struct FiniteChain {
  struct Entry {
    std::int32_t to = 0;
    Weight w;
  };

  std::vector<std::vector<Entry>> rows;
  std::map<std::string, std::vector<Weight>> exits;

  std::size_t size() const { return rows.size(); }

  /// Row sum including all exits; 1 up to rounding for a valid chain.
  double row_total(std::size_t i) const;

  /// Add `w` to the exit probability of state i into `label`.
  void add_exit(const std::string& label, std::size_t i, Weight w);
};

/// A FiniteChain whose transient states are comb vertices.
struct CombChain {
  FiniteChain chain;
  std::vector<Vertex> vertices;
  std::map<Vertex, std::int32_t> index;
  std::vector<int> degrees;  // comb degree of each state

  std::int32_t at(const Vertex& v) const;
};

/**
 * Simple random walk on V_L = {|x| <= L}; a step to |x| = L + 1 is absorbed
 * into "exit". Throws ResourceError if |V_L| exceeds `budget`.
 */
CombChain truncated_comb_chain(const Profile& profile, std::int64_t L, std::size_t budget);

/// The tooth of column x (heights -h..h); any horizontal move is absorbed
/// into "horizontal".
CombChain column_chain(const Profile& profile, std::int64_t x);

/// Simple random walk on {1, ..., b-1} absorbed at "low" (0) and "high" (b).
FiniteChain interval_chain(std::int64_t b);

// --- solvers -------------------------------------------------------------

/// Solve (I - Q) x = rhs in double precision with one step of iterative refinement.
std::vector<double> solve_absorbing(const FiniteChain& chain, const std::vector<double>& rhs);

/// Solve g^T (I - Q) = init^T, the expected visit counts from `init`.
std::vector<double> solve_visits(const FiniteChain& chain, const std::vector<double>& init);

/// Exact solve of (I - Q) x = rhs; throws ResourceError above `budget` states.
std::vector<Rational> solve_absorbing_exact(const FiniteChain& chain,
                                            const std::vector<Rational>& rhs,
                                            std::size_t budget = 10000);

/// Throws SingularityError if some transient state cannot reach an exit.
void require_absorbing_reachable(const FiniteChain& chain);

/// max_i |((I - Q) x - rhs)_i|.
double residual(const FiniteChain& chain, const std::vector<double>& x, const std::vector<double>& rhs);

}  // namespace combwalk
