#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "acceptance.hpp"
#include "combwalk/collision.hpp"
#include "combwalk/errors.hpp"
#include "combwalk/oracle.hpp"
#include "combwalk/runner.hpp"
#include "combwalk/walk.hpp"

namespace combwalk::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct ProfileFlags {
  std::string family;
  double a = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw UsageError("malformed JSON in '" + path + "': " + ex.what());
  }
}

/// Profile from --config (a profile object or a full experiment config) or
/// from --family and its parameter flags.
Profile resolve_profile(const Common& c, const ProfileFlags& f) {
  if (!c.config.empty()) {
    const nlohmann::json j = read_json(c.config);
    return profile_from_json(j.contains("schema") ? j.at("profile") : j);
  }
  if (f.family == "constant") return Profile::constant(f.a);
  if (f.family == "power") return Profile::power(f.alpha);
  if (f.family == "linlog") return Profile::linlog(f.beta);
  if (f.family == "nlogn") return Profile::nlogn();
  throw UsageError("give a profile with --config or --family");
}

Vertex parse_vertex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("vertex must be 'x,y': " + s);
  try {
    return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("vertex must be 'x,y': " + s);
  }
}

/// Writes to --out if given, else to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_classify(const Common& c, const ProfileFlags& f, std::ostream& out) {
  const Profile p = resolve_profile(c, f);
  const Classification cl = classify_profile(p);
  const double s3 = reciprocal_partial_sum(p, 1000);
  const double s6 = reciprocal_partial_sum(p, 1000000);
  Sink sink(c.out, out);
  auto& os = sink.stream();
  nlohmann::json verdicts = nlohmann::json::array();
  for (Verdict v : cl.verdicts) verdicts.push_back(to_string(v));
  if (c.format == "json") {
    os << nlohmann::json{{"profile", to_json(p)},
                         {"verdict", to_string(cl.verdict)},
                         {"verdicts", verdicts},
                         {"witness", cl.witness},
                         {"reciprocal_partial_sum", {{"1000", s3}, {"1000000", s6}}}}
              .dump(2)
       << "\n";
  } else {
    os << "verdict: " << to_string(cl.verdict) << "\n";
    if (cl.verdicts.size() > 1) {
      os << "also:";
      for (std::size_t i = 1; i < cl.verdicts.size(); ++i) os << " " << to_string(cl.verdicts[i]);
      os << "\n";
    }
    os << "witness: " << cl.witness << "\n";
    os << "sum_{n<=1e3} 1/breve_f(n): " << number(s3) << "\n";
    os << "sum_{n<=1e6} 1/breve_f(n): " << number(s6) << "\n";
  }
  return kExitOk;
}

struct SimulateFlags {
  std::vector<std::string> starts;
  std::int64_t horizon = 1000;
  std::int64_t d = 4;
  std::int64_t N = 16;
};

int cmd_simulate(const Common& c, const ProfileFlags& f, const SimulateFlags& s, std::ostream& out) {
  if (c.format != "csv") throw UsageError("simulate writes CSV only");
  const Profile p = resolve_profile(c, f);
  std::vector<Vertex> starts;
  for (const auto& v : s.starts) starts.push_back(parse_vertex(v));
  if (starts.empty()) starts.push_back({0, 0});
  if (starts.size() > 3) throw UsageError("simulate takes at most 3 walkers");
  for (const auto& v : starts) {
    if (!is_vertex(p, v)) throw UsageError("start is not a vertex of the comb");
  }
  if (s.horizon < 1) throw UsageError("--horizon must be >= 1");
  const RngStream master(c.seed.value_or(0));
  Sink sink(c.out, out);
  if (starts.size() == 1) {
    RngStream rng = master.split(0);
    const auto [traj, rec] = simulate(p, starts[0], s.horizon, StopSpec{}, rng);
    write_trajectory_csv(sink.stream(), traj);
  } else if (starts.size() == 2) {
    write_collision_csv(sink.stream(), run_pair(p, starts[0], starts[1], s.horizon, StopSpec{}, master));
  } else {
    write_collision_csv(sink.stream(),
                        run_triple(p, {starts[0], starts[1], starts[2]}, s.horizon, s.d, s.N, master));
  }
  return kExitOk;
}

struct ExactFlags {
  std::string quantity;
  std::string mode = "float";
  std::int64_t a = 1, b = 2, h = 4, v = 0, u = 0, L = 1, n = 2, x = 0;
  std::string start = "0,0";
};

int cmd_exact(const Common& c, const ProfileFlags& f, const ExactFlags& e, std::ostream& out) {
  const SolveMode mode = e.mode == "rational" ? SolveMode::Rational : SolveMode::Float;
  nlohmann::json result;
  if (e.quantity == "absorption") {
    result = oracle_json("absorption_probability", {{"a", e.a}, {"b", e.b}},
                         absorption_probability(e.a, e.b, mode));
  } else if (e.quantity == "tooth-collisions") {
    result = oracle_json("expected_tooth_collisions", {{"h", e.h}, {"v", e.v}},
                         expected_tooth_collisions(e.h, e.v, mode));
  } else if (e.quantity == "psi0-bracket") {
    const Profile p = resolve_profile(c, f);
    result = oracle_json("psi0_probability", {{"profile", to_json(p)}, {"u", e.u}, {"v", e.v}, {"L", e.L}},
                         psi0_probability_bracket(p, e.u, e.v, e.L));
  } else if (e.quantity == "exit-time") {
    const Profile p = resolve_profile(c, f);
    const Vertex s = parse_vertex(e.start);
    result = oracle_json("expected_exit_time",
                         {{"profile", to_json(p)}, {"start", {s.x, s.y}}, {"n", e.n}},
                         OracleValue{expected_exit_time(p, s, e.n), std::nullopt});
  } else if (e.quantity == "sojourn") {
    const Profile p = resolve_profile(c, f);
    result = oracle_json("expected_sojourn", {{"profile", to_json(p)}, {"x", e.x}},
                         OracleValue{expected_sojourn(p, e.x), std::nullopt});
  } else if (e.quantity == "kernel-decay") {
    const KernelDecay k = kernel_decay_check(f.beta, e.n);
    result = {{"quantity", "kernel_decay"},
              {"params", {{"beta", f.beta}, {"n", e.n}, {"t", k.t}}},
              {"value", {{"max_kernel", k.max_kernel}, {"bound", k.bound}, {"ratio", k.ratio}}},
              {"mode", "float"}};
  } else {
    throw UsageError("unknown quantity '" + e.quantity + "'");
  }
  Sink sink(c.out, out);
  if (c.format == "json") {
    sink.stream() << result.dump(2) << "\n";
  } else {
    const auto& val = result.at("value");
    sink.stream() << "quantity,params,value,lower,upper,mode\n"
                  << result.at("quantity").get<std::string>() << ",\""
                  << [&] {
                       std::string s = result.at("params").dump(), q;
                       for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                       return q;
                     }()
                  << "\",";
    if (val.is_number()) {
      sink.stream() << number(val.get<double>()) << ",,";
    } else if (val.contains("lower")) {
      sink.stream() << "," << number(val.at("lower").get<double>()) << ","
                    << number(val.at("upper").get<double>());
    } else {
      sink.stream() << number(val.at("ratio").get<double>()) << ",,";
    }
    sink.stream() << "," << result.at("mode").get<std::string>() << "\n";
  }
  return kExitOk;
}

ExperimentConfig load_config(const Common& c) {
  if (c.config.empty()) throw UsageError("--config is required");
  nlohmann::json j = read_json(c.config);
  if (c.seed && j.is_object()) j["master_seed"] = *c.seed;
  try {
    return config_from_json(j);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(std::string("invalid config: ") + ex.what());
  } catch (const nlohmann::json::exception& ex) {
    throw UsageError(std::string("invalid config: ") + ex.what());
  }
}

int cmd_estimate(const Common& c, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = load_config(c);
  const Estimate e = run_estimator(config, RunOptions{c.threads});
  Sink sink(c.out, out);
  if (c.format == "json") {
    sink.stream() << to_json(e).dump(2) << "\n";
  } else {
    sink.stream() << kEstimateCsvHeader << "\n" << to_csv_row(e) << "\n";
  }
  (sink.to_file() ? out : err) << "fingerprint " << e.fingerprint << "\n";
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& grid_path, std::ostream& out) {
  if (c.config.empty()) throw UsageError("--config is required");
  if (grid_path.empty()) throw UsageError("--grid is required");
  nlohmann::json base = read_json(c.config);
  if (c.seed && base.is_object()) base["master_seed"] = *c.seed;
  const nlohmann::json grid = read_json(grid_path);
  if (!grid.is_array() || grid.empty()) throw UsageError("grid must be a nonempty JSON array of patches");
  const auto rows = sweep(base, grid.get<std::vector<nlohmann::json>>(), RunOptions{c.threads});
  Sink sink(c.out, out);
  auto& os = sink.stream();
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o = {{"config", r.config}};
      if (r.estimate) o["estimate"] = to_json(*r.estimate);
      if (!r.error.empty()) o["error"] = r.error;
      arr.push_back(o);
    }
    os << arr.dump(2) << "\n";
  } else {
    os << kEstimateCsvHeader << ",error\n";
    for (const auto& r : rows) {
      if (r.estimate) {
        os << to_csv_row(*r.estimate) << ",\n";
      } else {
        std::string msg;
        for (char ch : r.error) msg += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        os << ",,,,,,,,,,\"" << msg << "\"\n";
      }
    }
  }
  return kExitOk;
}

int cmd_acceptance(const Common& c, const std::string& suite_name, const std::vector<int>& only,
                   std::ostream& out) {
  acceptance::Suite suite;
  try {
    suite = acceptance::parse_suite(suite_name);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  Sink sink(c.out, out);
  const auto results = acceptance::run_suite(suite, sink.stream(), only);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  sink.stream() << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? kExitOk : kExitStatistical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collisions of random walks on wedge combs"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "Profile or experiment config (JSON)");
  app.add_option("--out", common.out, "Output file (default stdout)");
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", common.seed, "Master seed (overrides the config)");
  app.add_option("--threads", common.threads, "Worker threads (default COMBWALK_THREADS or all cores)");

  ProfileFlags pf;
  auto add_profile_flags = [&](CLI::App* sub) {
    sub->add_option("--family", pf.family, "Profile family")
        ->check(CLI::IsMember({"constant", "power", "linlog", "nlogn"}));
    sub->add_option("--a", pf.a, "Constant height");
    sub->add_option("--alpha", pf.alpha, "Power exponent");
    sub->add_option("--beta", pf.beta, "Log exponent (linlog, kernel-decay)");
  };

  auto* classify = app.add_subcommand("classify", "Classify a profile");
  add_profile_flags(classify);

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "Simulate 1-3 walkers and dump CSV");
  add_profile_flags(sim);
  sim->add_option("--start", sf.starts, "Start vertex x,y (repeat per walker)");
  sim->add_option("--horizon", sf.horizon, "Number of steps");
  sim->add_option("--d", sf.d, "Exit factor for the triple Theta");
  sim->add_option("--N", sf.N, "Scale for the triple Theta");

  ExactFlags ef;
  auto* exact = app.add_subcommand("exact", "Exact oracle values");
  add_profile_flags(exact);
  exact->add_option("--quantity", ef.quantity, "Quantity")
      ->required()
      ->check(CLI::IsMember(
          {"absorption", "tooth-collisions", "psi0-bracket", "exit-time", "sojourn", "kernel-decay"}));
  exact->add_option("--mode", ef.mode, "Solve mode")->check(CLI::IsMember({"float", "rational"}));
  exact->add_option("--from", ef.a, "Start of the interval walk (absorption)");
  exact->add_option("--b", ef.b, "Upper absorber (absorption)");
  exact->add_option("--height", ef.h, "Tooth height");
  exact->add_option("--v", ef.v, "Height of the second walker");
  exact->add_option("--u", ef.u, "Column");
  exact->add_option("--L", ef.L, "Truncation radius");
  exact->add_option("--n", ef.n, "Exit radius / kernel scale");
  exact->add_option("--x", ef.x, "Column (sojourn)");
  exact->add_option("--start", ef.start, "Start vertex x,y (exit-time)");

  auto* estimate = app.add_subcommand("estimate", "Run one Monte Carlo estimator");

  std::string grid_path;
  auto* sw = app.add_subcommand("sweep", "Run an estimator over a grid of config patches");
  sw->add_option("--grid", grid_path, "JSON array of merge patches");

  std::string suite_name;
  std::vector<int> only;
  auto* acc = app.add_subcommand("acceptance", "Run the acceptance criteria");
  acc->add_option("suite", suite_name, "fast or full")->required();
  acc->add_option("--only", only, "Criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*classify) return cmd_classify(common, pf, out);
    if (*sim) return cmd_simulate(common, pf, sf, out);
    if (*exact) return cmd_exact(common, pf, ef, out);
    if (*estimate) return cmd_estimate(common, out, err);
    if (*sw) return cmd_sweep(common, grid_path, out);
    if (*acc) return cmd_acceptance(common, suite_name, only, out);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const EstimationError& ex) {
    err << "error: " << ex.what() << " (replicas " << ex.replicas() << ", censored " << ex.censored() << ")\n";
    return kExitStatistical;
  } catch (const ResourceError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const SingularityError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace combwalk::cli
