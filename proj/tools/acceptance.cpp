#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "combwalk/chain.hpp"
#include "combwalk/collision.hpp"
#include "combwalk/oracle.hpp"
#include "combwalk/runner.hpp"

namespace combwalk::acceptance {
namespace {

constexpr std::uint64_t kSuiteSeed = 0x5eed0c0b5eed0001ULL;

// Frozen from one separate k = 8 run, 10^4 replicas, seed derive_seed(kSuiteSeed, 800):
// mean 0.1667 (se 0.0329), i.e. C = 0.169, upper 95% limit 0.234, rounded up.
constexpr double kZkhConstant = 0.24;

std::uint64_t seed_for(int criterion, int part = 0) {
  return derive_seed(kSuiteSeed, static_cast<std::uint64_t>(criterion * 100 + part));
}

std::int64_t scaled(Suite suite, std::int64_t full) {
  return suite == Suite::Full ? full : std::max<std::int64_t>(1, full / 10);
}

ExperimentConfig make_config(Profile profile, Estimator estimator, std::int64_t replicas,
                             std::uint64_t seed, std::int64_t horizon = kDefaultHorizon) {
  ExperimentConfig c;
  c.profile = std::move(profile);
  c.estimator = std::move(estimator);
  c.replicas = replicas;
  c.master_seed = seed;
  c.horizon = horizon;
  return c;
}

struct Report {
  bool pass = true;
  std::ostringstream text;

  Report() { text << std::setprecision(4); }
  void check(bool ok) { pass = pass && ok; }
  void sep() {
    if (text.tellp() > 0) text << "; ";
  }
};

// 1. Gambler's ruin identity.
void gambler_ruin(Suite suite, Report& r) {
  for (std::int64_t v : {2, 3, 8}) {
    const Estimate e = run_estimator(
        make_config(Profile::constant(0.0), est::GamblerRuin{v}, scaled(suite, 100000), seed_for(1, static_cast<int>(v))));
    const double truth = 1.0 / static_cast<double>(2 * v);
    const double z = std::abs(e.point - truth) / e.std_error;
    const OracleValue exact = absorption_probability(1, 2 * v, SolveMode::Rational);
    const bool exact_ok = exact.exact && *exact.exact == Rational(1, 2 * v);
    r.check(z <= 3.0 && exact_ok);
    r.sep();
    r.text << "v=" << v << " point=" << e.point << " truth=" << truth << " |dev|/se=" << z
           << " exact=" << (exact.exact ? numerator(*exact.exact).str() + "/" + denominator(*exact.exact).str() : "none");
  }
}

// 2. E(H) <= 2 and MC agreement.
void tooth_h(Suite suite, Report& r) {
  double worst = 0.0;
  std::int64_t worst_h = 0, worst_v = 0;
  for (std::int64_t h : {4, 8, 16, 32, 64}) {
    for (std::int64_t v = 0; v <= h / 2; v += 2) {
      const double value = expected_tooth_collisions(h, v).value;
      if (value > worst) {
        worst = value;
        worst_h = h;
        worst_v = v;
      }
    }
  }
  r.check(worst <= 2.0);
  r.text << "max E(H)=" << std::setprecision(10) << worst << std::setprecision(4) << " at (h,v)=(" << worst_h
         << "," << worst_v << ")";
  const double exact = expected_tooth_collisions(16, 4).value;
  const Estimate e = run_estimator(
      make_config(Profile::constant(16.0), est::ToothH{0, 4, {}}, scaled(suite, 10000), seed_for(2)));
  const double z = std::abs(e.point - exact) / e.std_error;
  r.check(z <= 3.0);
  r.sep();
  r.text << "(16,4): MC=" << e.point << " exact=" << exact << " |dev|/se=" << z;
}

// 3. Psi_0 sandwich on Constant(64).
void psi_sandwich(Suite suite, Report& r) {
  const Profile profile = Profile::constant(64.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool inside = true;
  std::ostringstream detail;
  detail << std::setprecision(4);
  for (std::int64_t v : {2, 4, 8, 16}) {
    const Bracket b = psi0_probability_bracket(profile, 0, v, 1);
    const double scaled_mid = static_cast<double>(v) * b.midpoint();
    lo = std::min(lo, scaled_mid);
    hi = std::max(hi, scaled_mid);
    const Estimate e = run_estimator(make_config(profile, est::PsiZero{0, v, {}}, scaled(suite, 10000),
                                                 seed_for(3, static_cast<int>(v))));
    const bool ok = e.point >= b.lower - 3.0 * e.std_error && e.point <= b.upper + 3.0 * e.std_error;
    inside = inside && ok;
    detail << " v=" << v << ":[" << b.lower << "," << b.upper << "] MC=" << e.point << "+-" << e.std_error;
  }
  const double ratio = hi / lo;
  r.check(ratio <= 4.0 && inside);
  r.text << "max/min v*P=" << ratio << ";" << detail.str();
}

// 4. q_{2n}(x,x) nonincreasing.
void kernel_monotone(Suite, Report& r) {
  const CombChain comb = truncated_comb_chain(Profile::constant(2.0), 8, 100000);
  const auto states = static_cast<std::int32_t>(comb.chain.size());
  double worst_increase = -1.0;
  std::int64_t violations = 0;
  for (std::int32_t s = 0; s < states; ++s) {
    double prev = 1.0;
    for (std::int64_t n = 1; n <= 50; ++n) {
      const double q = killed_kernel(comb.chain, s, 2 * n)[static_cast<std::size_t>(s)];
      worst_increase = std::max(worst_increase, q - prev);
      if (q > prev + 1e-12) ++violations;
      prev = q;
    }
  }
  r.check(violations == 0);
  r.text << "states=" << states << " violations=" << violations << " max increase=" << worst_increase;
}

std::vector<Profile> fuzz_profiles() {
  std::vector<Profile> out;
  out.push_back(Profile::constant(0.0));
  out.push_back(Profile::constant(2.0));
  out.push_back(Profile::constant(5.0));
  out.push_back(Profile::power(0.5));
  out.push_back(Profile::power(1.0));
  out.push_back(Profile::power(2.0));
  out.push_back(Profile::linlog(0.0));
  out.push_back(Profile::linlog(3.0));
  out.push_back(Profile::nlogn());
  out.push_back(Profile(family::IidSample{family::Geometric{0.3}, 7}));
  out.push_back(Profile(family::Table{{{-1, 3.0}, {0, 1.0}, {2, 6.0}}}));
  return out;
}

Vertex fuzz_start(const Profile& p, RngStream& rng) {
  const auto x = static_cast<std::int64_t>(rng.uniform_below(11)) - 5;
  const std::int64_t h = p.tooth_height(x);
  const auto y = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(2 * h + 1))) - h;
  return {x, y};
}

// 5. {xi(0,M) >= N} within {sigma_N <= tau_M}, zeros counted from m >= 1,
// on same-parity pairs.
void inclusion(Suite, Report& r) {
  const auto profiles = fuzz_profiles();
  RngStream rng(seed_for(5));
  std::int64_t runs = 0, checks = 0, violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Profile& p = profiles[static_cast<std::size_t>(i) % profiles.size()];
    const Vertex a = fuzz_start(p, rng);
    Vertex b = fuzz_start(p, rng);
    while (parity(b) != parity(a)) b = fuzz_start(p, rng);
    const PairRun run = run_pair(p, a, b, 2000, StopSpec{}, rng.split(static_cast<std::uint64_t>(i)));
    ++runs;
    const bool z0 = run.z_seq.front() == 0;
    for (std::size_t M = 0; M < run.z_jump_times.size(); ++M) {
      const std::int64_t N = z_zero_local_time(run, static_cast<std::int64_t>(M)) - (z0 ? 1 : 0);
      const std::int64_t tau = run.z_jump_times[M];
      ++checks;
      if (N >= static_cast<std::int64_t>(run.sigma.size()) || run.sigma[static_cast<std::size_t>(N)] > tau)
        ++violations;
    }
  }
  r.check(violations == 0);
  r.text << "runs=" << runs << " (M,N) checks=" << checks << " violations=" << violations;
}

// 6. Combined parity of every pair of walkers is constant.
void parity(Suite, Report& r) {
  const auto profiles = fuzz_profiles();
  RngStream rng(seed_for(6));
  std::int64_t violations = 0, runs = 0;
  auto check_pair = [&](const Trajectory& s, const Trajectory& t) {
    const int p0 = (parity(s.steps[0]) + parity(t.steps[0])) % 2;
    for (std::size_t n = 0; n < s.steps.size(); ++n) {
      if ((parity(s.steps[n]) + parity(t.steps[n])) % 2 != p0) {
        ++violations;
        return;
      }
    }
  };
  for (int i = 0; i < 1000; ++i) {
    const Profile& p = profiles[static_cast<std::size_t>(i) % profiles.size()];
    const RngStream master = rng.split(static_cast<std::uint64_t>(i));
    if (i % 2 == 0) {
      const PairRun run = run_pair(p, fuzz_start(p, rng), fuzz_start(p, rng), 1000, StopSpec{}, master);
      check_pair(run.traj_a, run.traj_b);
    } else {
      const TripleRun run = run_triple(p, {fuzz_start(p, rng), fuzz_start(p, rng), fuzz_start(p, rng)}, 1000,
                                       4, 16, master);
      check_pair(run.trajs[0], run.trajs[1]);
      check_pair(run.trajs[1], run.trajs[2]);
      check_pair(run.trajs[0], run.trajs[2]);
    }
    ++runs;
  }
  r.check(violations == 0);
  r.text << "runs=" << runs << " violations=" << violations;
}

// 7. CollisionBeforeExit sweep over N.
void collision_scaling(Suite suite, Report& r) {
  constexpr std::int64_t kHorizon = std::int64_t{1} << 50;
  const std::vector<nlohmann::json> grid = {
      {{"estimator", {{"N", 16}}}}, {{"estimator", {{"N", 32}}}}, {{"estimator", {{"N", 64}}}}};
  auto run_family = [&](const Profile& p, int part) {
    ExperimentConfig base = make_config(p, est::CollisionBeforeExit{16, 4, {}}, scaled(suite, 10000),
                                        seed_for(7, part), kHorizon);
    std::vector<double> points;
    for (const auto& row : sweep(to_json(base), grid)) {
      if (!row.estimate) throw std::runtime_error("sweep point failed: " + row.error);
      points.push_back(row.estimate->point);
      r.text << " " << row.estimate->point << "(cens " << row.estimate->censored << ")";
    }
    return points;
  };
  r.text << "LinLog(0):";
  const auto flat = run_family(Profile::linlog(0.0), 1);
  const bool bounded = *std::min_element(flat.begin(), flat.end()) >= 0.05;
  r.text << " -> min>=0.05 " << (bounded ? "yes" : "no") << "; Power(2):";
  const auto power = run_family(Profile::power(2.0), 2);
  const bool decreasing = power[0] > power[1] && power[1] > power[2];
  r.text << " -> strictly decreasing " << (decreasing ? "yes" : "no");
  r.check(bounded && decreasing);
}

// 8. Z_{k,h} bound on LinLog(3).
void zkh_bound(Suite suite, Report& r) {
  const double beta = 3.0;
  const Profile p = Profile::linlog(beta);
  double slack = 1.0;
  for (std::int64_t k : {8, 16}) {
    const double lk = std::pow(std::log(static_cast<double>(k)), beta);
    const auto horizon = static_cast<std::int64_t>(std::ceil(static_cast<double>(k * k * k) * lk));
    const std::int64_t h = p.tooth_height(k);
    const Estimate e = run_estimator(
        make_config(p, est::ZkhMean{k, h}, scaled(suite, 10000), seed_for(8, static_cast<int>(k)), horizon));
    const double bound = kZkhConstant * static_cast<double>(h) / (static_cast<double>(k) * lk);
    r.check(e.point <= slack * bound);
    r.sep();
    r.text << "k=" << k << " h=" << h << " horizon=" << horizon << " mean=" << e.point << " limit=" << slack * bound;
    slack = 1.5;
  }
  r.text << " (C=" << kZkhConstant << ")";
}

// 9. Triple collisions.
void triples(Suite suite, Report& r) {
  const Profile line = Profile::constant(0.0);
  RngStream rng(seed_for(9));
  const int runs = 1000;
  int hits = 0;
  for (int i = 0; i < runs; ++i) {
    const TripleRun run =
        run_triple(line, {Vertex{0, 0}, Vertex{0, 0}, Vertex{0, 0}}, 100000, 4, 1 << 20, rng.split(static_cast<std::uint64_t>(i)));
    if (std::any_of(run.triple_collisions.begin(), run.triple_collisions.end(),
                    [](std::int64_t n) { return n >= 1; }))
      ++hits;
  }
  const double fraction = static_cast<double>(hits) / runs;
  const Estimate e = run_estimator(make_config(Profile::constant(4.0), est::TripleBeforeExit{32, 4, {}},
                                               scaled(suite, 10000), seed_for(9, 1), std::int64_t{1} << 50));
  r.check(fraction >= 0.95 && e.point > 0.0 && e.ci_lo > 0.0);
  r.text << "Z: " << hits << "/" << runs << " triples met at n>=1 (" << fraction
         << "); Constant(4) N=32 d=4: point=" << e.point << " wilson_lo=" << e.ci_lo;
}

// 10. Determinism across worker counts.
void determinism(Suite, Report& r) {
  const ExperimentConfig c = make_config(Profile::constant(2.0), est::CollisionBeforeExit{8, 4, {}}, 2000,
                                         seed_for(10));
  const Estimate one = run_estimator(c, RunOptions{1});
  const Estimate four = run_estimator(c, RunOptions{4});
  const std::string a = to_csv_row(one) + "\n" + to_json(one).dump();
  const std::string b = to_csv_row(four) + "\n" + to_json(four).dump();
  r.check(a == b);
  r.text << "threads 1 vs 4: " << (a == b ? "identical" : "DIFFERENT") << " (fingerprint " << one.fingerprint << ")";
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<void(Suite, Report&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "gambler-ruin", 30, gambler_ruin},
      {2, "tooth-collisions", 120, tooth_h},
      {3, "psi0-sandwich", 180, psi_sandwich},
      {4, "kernel-monotone", 30, kernel_monotone},
      {5, "pathwise-inclusion", 60, inclusion},
      {6, "parity", 30, parity},
      {7, "collision-scaling", 300, collision_scaling},
      {8, "zkh-bound", 300, zkh_bound},
      {9, "triple-collisions", 300, triples},
      {10, "determinism", 60, determinism},
  };
  return list;
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "fast") return Suite::Fast;
  if (name == "full") return Suite::Full;
  throw std::invalid_argument("unknown acceptance suite '" + name + "' (expected fast or full)");
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << ": " << r.measured << " ["
     << std::fixed << std::setprecision(1) << r.seconds << " s, budget " << r.budget_seconds << " s]";
  return os.str();
}

std::vector<CriterionResult> run_suite(Suite suite, std::ostream& out, const std::vector<int>& only) {
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(suite, rep);
    } catch (const std::exception& ex) {
      rep.pass = false;
      rep.sep();
      rep.text << "error: " << ex.what();
    }
    CriterionResult res;
    res.id = c.id;
    res.name = c.name;
    res.pass = rep.pass;
    res.measured = rep.text.str();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.budget_seconds = c.budget;
    out << format_line(res) << std::endl;
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace combwalk::acceptance
