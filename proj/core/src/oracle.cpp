#include "combwalk/oracle.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "combwalk/errors.hpp"

namespace combwalk {
namespace {

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

enum class Outcome { Transient, Success, Failure };

using PairKey = std::pair<Vertex, Vertex>;

// First-passage chain of two independent walkers started at a fixed pair.
// `classify` labels every state reached at times n >= 1.
struct PairChain {
  FiniteChain chain;
  std::vector<PairKey> states;
  std::vector<double> init;       // distribution at time 1 over transient states
  std::vector<Weight> init_exact;
  Rational direct_success = 0;    // mass absorbed into success at time 1
};

template <class Classify>
PairChain build_pair_chain(const Profile& profile, const PairKey& start, Classify classify,
                           std::size_t budget) {
  PairChain pc;
  std::map<PairKey, std::int32_t> index;
  std::deque<std::int32_t> queue;

  auto intern = [&](const PairKey& key) -> std::int32_t {
    auto [it, inserted] = index.try_emplace(key, static_cast<std::int32_t>(pc.states.size()));
    if (inserted) {
      if (pc.states.size() >= budget) {
        std::ostringstream os;
        os << "product chain exceeds budget of " << budget << " states";
        throw ResourceError(os.str());
      }
      pc.states.push_back(key);
      pc.chain.rows.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };

  // transitions out of `from`; `sink(kind, target_index, weight)`
  auto expand = [&](const PairKey& from, auto&& sink) {
    const auto na = neighbors(profile, from.first);
    const auto nb = neighbors(profile, from.second);
    const auto den = static_cast<std::int64_t>(na.size() * nb.size());
    for (const auto& a : na) {
      for (const auto& b : nb) {
        const PairKey next{a, b};
        const Outcome o = classify(next);
        sink(o, o == Outcome::Transient ? intern(next) : -1, Weight{1, den});
      }
    }
  };

  std::map<std::int32_t, Rational> init_map;
  expand(start, [&](Outcome o, std::int32_t idx, Weight w) {
    if (o == Outcome::Success) pc.direct_success += w.exact();
    if (o == Outcome::Transient) init_map[idx] += w.exact();
  });
  while (!queue.empty()) {
    const std::int32_t i = queue.front();
    queue.pop_front();
    const PairKey from = pc.states[static_cast<std::size_t>(i)];
    expand(from, [&](Outcome o, std::int32_t idx, Weight w) {
      const auto row = static_cast<std::size_t>(i);
      if (o == Outcome::Transient) {
        pc.chain.rows[row].push_back({idx, w});
      } else {
        pc.chain.add_exit(o == Outcome::Success ? "success" : "failure", row, w);
      }
    });
  }
  for (const char* label : {"success", "failure"}) {
    pc.chain.exits[label].resize(pc.chain.size(), Weight{0, 1});
  }
  pc.init.assign(pc.chain.size(), 0.0);
  pc.init_exact.assign(pc.chain.size(), Weight{0, 1});
  for (const auto& [idx, mass] : init_map) {
    pc.init[static_cast<std::size_t>(idx)] = static_cast<double>(mass);
    pc.init_exact[static_cast<std::size_t>(idx)] =
        Weight{static_cast<std::int64_t>(numerator(mass)), static_cast<std::int64_t>(denominator(mass))};
  }
  return pc;
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

}  // namespace

OracleValue absorption_probability(std::int64_t a, std::int64_t b, SolveMode mode) {
  if (b < 1 || a < 0 || a > b) throw std::invalid_argument("absorption_probability needs 0 <= a <= b, b >= 1");
  if (a == 0 || a == b) {
    const Rational r = a == 0 ? Rational(0) : Rational(1);
    return {static_cast<double>(r), mode == SolveMode::Rational ? std::optional<Rational>(r) : std::nullopt};
  }
  const FiniteChain chain = interval_chain(b);
  const auto& high = chain.exits.at("high");
  const auto i = static_cast<std::size_t>(a - 1);
  if (mode == SolveMode::Rational) {
    std::vector<Rational> rhs;
    for (const auto& w : high) rhs.push_back(w.exact());
    const auto x = solve_absorbing_exact(chain, rhs);
    return {static_cast<double>(x[i]), x[i]};
  }
  std::vector<double> rhs;
  for (const auto& w : high) rhs.push_back(w.value());
  return {solve_absorbing(chain, rhs)[i], std::nullopt};
}

std::vector<double> killed_kernel(const FiniteChain& chain, std::int32_t start, std::int64_t t,
                                  std::int64_t max_steps) {
  if (t < 0) throw std::invalid_argument("killed_kernel needs t >= 0");
  if (t > max_steps) {
    std::ostringstream os;
    os << "killed_kernel: t = " << t << " exceeds iteration budget " << max_steps;
    throw ResourceError(os.str());
  }
  if (start < 0 || static_cast<std::size_t>(start) >= chain.size())
    throw std::out_of_range("killed_kernel: start state out of range");
  std::vector<double> p(chain.size(), 0.0);
  std::vector<double> q(chain.size(), 0.0);
  p[static_cast<std::size_t>(start)] = 1.0;
  for (std::int64_t s = 0; s < t; ++s) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (p[i] == 0.0) continue;
      for (const auto& e : chain.rows[i]) q[static_cast<std::size_t>(e.to)] += p[i] * e.w.value();
    }
    std::swap(p, q);
  }
  return p;
}

std::vector<double> green_function(const FiniteChain& chain, std::int32_t start) {
  std::vector<double> init(chain.size(), 0.0);
  init.at(static_cast<std::size_t>(start)) = 1.0;
  return solve_visits(chain, init);
}

double expected_exit_time(const Profile& profile, const Vertex& start, std::int64_t n,
                          std::size_t budget) {
  if (n < 1) throw std::invalid_argument("expected_exit_time needs n >= 1");
  // V_0 is the single column x = 0: any horizontal move leaves it.
  const CombChain cc = n == 1 ? column_chain(profile, 0) : truncated_comb_chain(profile, n - 1, budget);
  const auto g = green_function(cc.chain, cc.at(start));
  long double total = 0.0L;
  for (double v : g) total += v;
  return static_cast<double>(total);
}

double expected_sojourn(const Profile& profile, std::int64_t x) {
  const CombChain cc = column_chain(profile, x);
  const auto g = green_function(cc.chain, cc.at({x, 0}));
  long double total = 0.0L;
  for (double v : g) total += v;
  return static_cast<double>(total);
}

OracleValue expected_tooth_collisions(std::int64_t h, std::int64_t v, SolveMode mode,
                                      std::size_t budget) {
  if (h < 0 || v < 0 || v > h || v % 2 != 0)
    throw std::invalid_argument("expected_tooth_collisions needs 0 <= v <= h with v even");
  const Profile tooth = Profile::constant(static_cast<double>(h));
  const PairKey start{{0, 0}, {0, v}};
  auto classify = [](const PairKey& s) {
    return (s.first.y == 0 || s.second.y == 0) ? Outcome::Failure : Outcome::Transient;
  };
  const PairChain pc = build_pair_chain(tooth, start, classify, budget);
  const Rational time_zero = v == 0 ? Rational(1) : Rational(0);
  if (pc.chain.size() == 0) {
    return {static_cast<double>(time_zero),
            mode == SolveMode::Rational ? std::optional<Rational>(time_zero) : std::nullopt};
  }
  // E(H) = 1[v = 0] + init^T (I - Q)^{-1} 1_diag = 1[v = 0] + init^T x with
  // (I - Q) x = 1_diag.
  if (mode == SolveMode::Rational) {
    std::vector<Rational> rhs(pc.chain.size(), 0);
    for (std::size_t i = 0; i < pc.states.size(); ++i)
      if (pc.states[i].first == pc.states[i].second) rhs[i] = 1;
    const auto x = solve_absorbing_exact(pc.chain, rhs, std::min<std::size_t>(budget, 10000));
    Rational total = time_zero;
    for (std::size_t i = 0; i < x.size(); ++i) total += pc.init_exact[i].exact() * x[i];
    return {static_cast<double>(total), total};
  }
  std::vector<double> rhs(pc.chain.size(), 0.0);
  for (std::size_t i = 0; i < pc.states.size(); ++i)
    if (pc.states[i].first == pc.states[i].second) rhs[i] = 1.0;
  const auto x = solve_absorbing(pc.chain, rhs);
  long double total = static_cast<double>(time_zero);
  for (std::size_t i = 0; i < x.size(); ++i) total += pc.init[i] * x[i];
  return {static_cast<double>(total), std::nullopt};
}

Bracket psi0_probability_bracket(const Profile& profile, std::int64_t u, std::int64_t v,
                                 std::int64_t L, std::size_t budget) {
  if (v < 0 || v % 2 != 0 || v > profile.tooth_height(u))
    throw std::invalid_argument("psi0_probability_bracket needs even 0 <= v <= tooth_height(u)");
  if (L < 0 || iabs(u) > L) throw std::invalid_argument("psi0_probability_bracket needs |u| <= L");
  if (v == 0) return {1.0, 1.0, 0};

  auto solve = [&](Outcome boundary) {
    auto classify = [&](const PairKey& s) {
      const auto& [a, b] = s;
      if (a.y == 0 || b.y == 0) return Outcome::Failure;
      if (a == b && iabs(a.y) + iabs(b.y) >= v) return Outcome::Success;
      if (iabs(a.x) > L || iabs(b.x) > L) return boundary;
      return Outcome::Transient;
    };
    const PairChain pc = build_pair_chain(profile, {{u, 0}, {u, v}}, classify, budget);
    double p = static_cast<double>(pc.direct_success);
    if (pc.chain.size() > 0) {
      std::vector<double> rhs;
      for (const auto& w : pc.chain.exits.at("success")) rhs.push_back(w.value());
      const auto x = solve_absorbing(pc.chain, rhs);
      long double acc = p;
      for (std::size_t i = 0; i < x.size(); ++i) acc += pc.init[i] * x[i];
      p = static_cast<double>(acc);
    }
    return std::make_pair(p, pc.chain.size());
  };
  const auto [lower, n_lo] = solve(Outcome::Failure);
  const auto [upper, n_hi] = solve(Outcome::Success);
  return {lower, upper, std::max(n_lo, n_hi)};
}

KernelDecay kernel_decay_check(double beta, std::int64_t n, std::size_t budget) {
  if (n < 1) throw std::invalid_argument("kernel_decay_check needs n >= 1");
  const double logn = std::log(static_cast<double>(n));
  const double scale = std::pow(logn, beta);
  const double t_real = std::pow(static_cast<double>(n), 3.0) * scale;
  if (!(t_real >= 1.0))
    throw std::invalid_argument("kernel_decay_check needs t = n^3 log^beta n >= 1");
  KernelDecay out;
  out.t = static_cast<std::int64_t>(std::ceil(t_real - 1e-9));
  const Profile profile = Profile::linlog(beta);
  const CombChain cc = truncated_comb_chain(profile, 2 * n, budget);
  const auto q = killed_kernel(cc.chain, cc.at({0, 0}), out.t);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (iabs(cc.vertices[i].x) <= n) out.max_kernel = std::max(out.max_kernel, q[i]);
  }
  out.bound = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * scale);
  out.ratio = out.max_kernel / out.bound;
  return out;
}

nlohmann::json oracle_json(const std::string& quantity, const nlohmann::json& params,
                           const OracleValue& value) {
  nlohmann::json j{{"quantity", quantity}, {"params", params}, {"value", value.value}};
  j["mode"] = value.exact ? "rational" : "float";
  if (value.exact) j["exact"] = rational_string(*value.exact);
  return j;
}

nlohmann::json oracle_json(const std::string& quantity, const nlohmann::json& params,
                           const Bracket& bracket) {
  return {{"quantity", quantity},
          {"params", params},
          {"value", {{"lower", bracket.lower}, {"upper", bracket.upper}}},
          {"mode", "float"}};
}

}  // namespace combwalk
