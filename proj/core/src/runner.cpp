#include "combwalk/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "combwalk/errors.hpp"
#include "combwalk/fast_walk.hpp"
#include "combwalk/stats.hpp"

namespace combwalk {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

// ---------------------------------------------------------------------------
// JSON helpers

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
  }
}

std::int64_t get_int(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer())
    throw std::invalid_argument(std::string("missing integer field '") + key + "'");
  return obj.at(key).get<std::int64_t>();
}

std::int64_t get_int_or(const nlohmann::json& obj, const char* key, std::int64_t fallback) {
  return obj.contains(key) ? get_int(obj, key) : fallback;
}

std::optional<std::int64_t> get_opt_int(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return get_int(obj, key);
}

double get_double_or(const nlohmann::json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

template <std::size_t K>
std::optional<std::array<Vertex, K>> get_starts(const nlohmann::json& obj) {
  if (!obj.contains("starts")) return std::nullopt;
  const auto& s = obj.at("starts");
  if (!s.is_array() || s.size() != K) throw std::invalid_argument("'starts' must list one [x, y] per walker");
  std::array<Vertex, K> out;
  for (std::size_t i = 0; i < K; ++i) {
    if (!s[i].is_array() || s[i].size() != 2 || !s[i][0].is_number_integer() || !s[i][1].is_number_integer())
      throw std::invalid_argument("each start must be [integer x, integer y]");
    out[i] = {s[i][0].get<std::int64_t>(), s[i][1].get<std::int64_t>()};
  }
  return out;
}

template <std::size_t K>
nlohmann::json starts_json(const std::array<Vertex, K>& s) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : s) a.push_back({v.x, v.y});
  return a;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Default starting configurations

std::int64_t even_offset(std::int64_t N) { return 2 * (N / 2); }

std::array<Vertex, 2> pair_starts(std::int64_t N, const std::optional<std::array<Vertex, 2>>& s) {
  return s ? *s : std::array<Vertex, 2>{Vertex{0, 0}, Vertex{even_offset(N), 0}};
}

std::array<Vertex, 3> triple_starts(std::int64_t N, const std::optional<std::array<Vertex, 3>>& s) {
  return s ? *s
           : std::array<Vertex, 3>{Vertex{0, 0}, Vertex{even_offset(N), 0},
                                   Vertex{-even_offset(N), 0}};
}

template <std::size_t K>
std::array<RngStream, K> walker_streams(const RngStream& base) {
  if constexpr (K == 1) {
    return {base.split(0)};
  } else if constexpr (K == 2) {
    return {base.split(0), base.split(1)};
  } else {
    return {base.split(0), base.split(1), base.split(2)};
  }
}

template <std::size_t K>
bool any_outside(const FastGroup<K>& g, std::int64_t radius) {
  for (std::size_t i = 0; i < K; ++i) {
    if (g.on_spine(i) && iabs(g.column(i)) >= radius) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Replicas

ReplicaOutcome gambler_ruin(const est::GamblerRuin& e, std::int64_t horizon, RngStream rng) {
  RngStream walker = rng.split(0);
  std::int64_t y = 1;
  const std::int64_t top = 2 * e.v;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    y += walker.uniform_below(2) == 0 ? -1 : 1;
    if (y == 0) return {0.0, false};
    if (y == top) return {1.0, false};
  }
  return {0.0, true};
}

ReplicaOutcome psi_zero(const Profile& profile, const est::PsiZero& e, std::int64_t horizon,
                        const RngStream& rng) {
  if (e.v == 0) return {1.0, false};
  FastGroup<2> g(profile, {Vertex{e.u, 0}, Vertex{e.u, e.v}}, walker_streams<2>(rng));
  const std::int64_t level = iabs(e.v);
  while (g.time() < horizon) {
    g.advance(horizon);
    if (g.on_spine(0) || g.on_spine(1)) return {0.0, false};
    if (g.together(0, 1) && 2 * iabs(g.position(0).y) >= level) return {1.0, false};
  }
  return {0.0, true};
}

ReplicaOutcome tooth_h(const Profile& profile, const est::ToothH& e, std::int64_t horizon,
                       const RngStream& rng) {
  FastGroup<2> g(profile, {Vertex{e.u, 0}, Vertex{e.u, e.v}}, walker_streams<2>(rng));
  std::int64_t count = e.v == 0 ? 1 : 0;
  while (g.time() < horizon) {
    g.advance(horizon);
    if (g.on_spine(0) || g.on_spine(1)) return {static_cast<double>(count), false};
    if (g.together(0, 1)) ++count;
  }
  return {static_cast<double>(count), true};
}

ReplicaOutcome collision_before_exit(const Profile& profile, const est::CollisionBeforeExit& e,
                                     std::int64_t horizon, const RngStream& rng) {
  const auto starts = pair_starts(e.N, e.starts);
  const std::int64_t radius = e.d * e.N;
  if (starts[0] == starts[1]) return {1.0, false};
  FastGroup<2> g(profile, starts, walker_streams<2>(rng));
  while (g.time() < horizon) {
    g.advance(horizon);
    if (any_outside(g, radius)) return {0.0, false};
    if (g.together(0, 1)) return {1.0, false};
  }
  return {0.0, true};
}

ReplicaOutcome sigma_race(const Profile& profile, const est::SigmaRace& e, std::int64_t horizon,
                          const RngStream& rng) {
  const auto starts = pair_starts(e.N, e.starts);
  const std::int64_t radius = e.d * e.N;
  FastGroup<2> g(profile, starts, walker_streams<2>(rng));
  std::int64_t sigmas = 0;
  while (g.time() < horizon) {
    g.advance(horizon);
    if (any_outside(g, radius)) return {1.0, false};
    if (g.column(0) == g.column(1) && (g.moved_horizontally(0) || g.moved_horizontally(1))) {
      if (++sigmas >= e.N) return {0.0, false};
    }
  }
  return {0.0, true};
}

ReplicaOutcome triple_before_exit(const Profile& profile, const est::TripleBeforeExit& e,
                                  std::int64_t horizon, const RngStream& rng) {
  const auto starts = triple_starts(e.N, e.starts);
  const std::int64_t radius = e.d * e.N;
  if (starts[0] == starts[1] && starts[1] == starts[2]) return {1.0, false};
  FastGroup<3> g(profile, starts, walker_streams<3>(rng));
  while (g.time() < horizon) {
    g.advance(horizon);
    if (any_outside(g, radius)) return {0.0, false};
    if (g.all_together()) return {1.0, false};
  }
  return {0.0, true};
}

ReplicaOutcome zkh_mean(const Profile& profile, const est::ZkhMean& e, std::int64_t horizon,
                        const RngStream& rng) {
  const std::int64_t h = e.h ? *e.h : profile.tooth_height(e.k);
  auto in_q = [&](const Vertex& v) { return v.x == e.k && v.y >= 0 && v.y <= h; };
  FastGroup<2> g(profile, {Vertex{0, 0}, Vertex{0, 0}}, walker_streams<2>(rng));
  std::int64_t count = in_q({0, 0}) ? 1 : 0;
  while (g.time() < horizon) {
    g.advance(horizon);
    if (g.together(0, 1) && in_q(g.position(0))) ++count;
  }
  return {static_cast<double>(count), false};
}

ReplicaOutcome local_time_quantile(const est::LocalTimeQuantile& e, const RngStream& rng) {
  RngStream walker = rng.split(0);
  const auto n = static_cast<std::int64_t>(
      std::ceil(e.scale * static_cast<double>(e.N) * static_cast<double>(e.N)));
  std::int64_t w = 0;
  std::int64_t visits = 1;
  for (std::int64_t k = 1; k <= n; ++k) {
    w += walker.uniform_below(2) == 0 ? -1 : 1;
    if (w == 0) ++visits;
  }
  return {static_cast<double>(visits), false};
}

ReplicaOutcome upsilon(const Profile& profile, const est::UpsilonWindows& e, std::int64_t horizon,
                       const RngStream& rng) {
  std::vector<std::int64_t> radii;
  std::int64_t r = 1;
  for (std::int64_t m = 1; m <= e.m_max + 1; ++m) {
    r *= e.d;
    radii.push_back(r);
  }
  std::vector<char> hit(static_cast<std::size_t>(e.m_max) + 1, 0);
  FastGroup<2> g(profile, {Vertex{0, 0}, Vertex{0, 0}}, walker_streams<2>(rng));
  std::size_t crossed = 0;  // radii d^1..d^crossed already exited
  while (g.time() < horizon) {
    g.advance(horizon);
    while (crossed < radii.size() && any_outside(g, radii[crossed])) ++crossed;
    if (crossed == radii.size()) {
      const auto wins = std::count(hit.begin() + 1, hit.end(), 1);
      return {static_cast<double>(wins) / static_cast<double>(e.m_max), false};
    }
    if (crossed >= 1 && g.together(0, 1)) hit[crossed] = 1;
  }
  return {0.0, true};
}

IntervalKind interval_kind(const Estimator& e) {
  return std::visit(overloaded{
                        [](const est::ToothH&) { return IntervalKind::Normal; },
                        [](const est::ZkhMean&) { return IntervalKind::Normal; },
                        [](const est::UpsilonWindows&) { return IntervalKind::Normal; },
                        [](const est::LocalTimeQuantile&) { return IntervalKind::OrderStatistic; },
                        [](const auto&) { return IntervalKind::Wilson; },
                    },
                    e);
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

template <std::size_t K>
void validate_starts(const Profile& profile, const std::array<Vertex, K>& starts, std::int64_t N) {
  for (const auto& s : starts) {
    require(is_vertex(profile, s), "start is not a vertex of the comb");
    require(iabs(s.x) <= N, "starts must lie in V_N");
  }
}

void validate(const ExperimentConfig& c) {
  require(c.replicas >= 1, "replicas must be >= 1");
  require(c.horizon >= 1, "horizon must be >= 1");
  require(c.ci_level > 0.0 && c.ci_level < 1.0, "ci_level must be in (0,1)");
  const Profile& p = c.profile;
  std::visit(
      overloaded{
          [&](const est::GamblerRuin& e) { require(e.v >= 1, "GamblerRuin needs v >= 1"); },
          [&](const est::PsiZero& e) {
            require(e.v >= 0 && e.v % 2 == 0, "PsiZero needs even v >= 0");
            require(e.v <= p.tooth_height(e.u), "PsiZero needs v <= tooth_height(u)");
            require(!e.L || *e.L >= iabs(e.u), "PsiZero needs L >= |u|");
          },
          [&](const est::ToothH& e) {
            require(e.v >= 0 && e.v % 2 == 0, "ToothH needs even v >= 0");
            require(e.v <= p.tooth_height(e.u), "ToothH needs v <= tooth_height(u)");
            require(!e.h || *e.h == p.tooth_height(e.u), "ToothH h must equal tooth_height(u)");
          },
          [&](const est::CollisionBeforeExit& e) {
            require(e.N >= 1 && e.d >= 2, "CollisionBeforeExit needs N >= 1, d >= 2");
            validate_starts(p, pair_starts(e.N, e.starts), e.N);
          },
          [&](const est::SigmaRace& e) {
            require(e.N >= 1 && e.d >= 2, "SigmaRace needs N >= 1, d >= 2");
            validate_starts(p, pair_starts(e.N, e.starts), e.N);
          },
          [&](const est::TripleBeforeExit& e) {
            require(e.N >= 1 && e.d >= 2, "TripleBeforeExit needs N >= 1, d >= 2");
            validate_starts(p, triple_starts(e.N, e.starts), e.N);
          },
          [&](const est::ZkhMean& e) {
            const std::int64_t h = e.h ? *e.h : p.tooth_height(e.k);
            require(h >= 0 && h <= p.tooth_height(e.k), "ZkhMean needs 0 <= h <= tooth_height(k)");
          },
          [&](const est::LocalTimeQuantile& e) {
            require(e.N >= 1, "LocalTimeQuantile needs N >= 1");
            require(e.q > 0.0 && e.q < 1.0, "LocalTimeQuantile needs 0 < q < 1");
            require(e.scale > 0.0 && e.scale * static_cast<double>(e.N) * static_cast<double>(e.N) < 1e12,
                    "LocalTimeQuantile needs a positive, bounded scale");
          },
          [&](const est::UpsilonWindows& e) {
            require(e.d >= 2 && e.m_max >= 1, "UpsilonWindows needs d >= 2, m_max >= 1");
            require(static_cast<double>(e.m_max + 1) * std::log(static_cast<double>(e.d)) < 40.0,
                    "UpsilonWindows radius d^(m_max+1) too large");
          },
      },
      c.estimator);
}

Estimator estimator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("estimator needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string where = "estimator " + kind;
  if (kind == "GamblerRuin") {
    reject_unknown(j, {"kind", "v"}, where);
    return est::GamblerRuin{get_int(j, "v")};
  }
  if (kind == "PsiZero") {
    reject_unknown(j, {"kind", "u", "v", "L"}, where);
    return est::PsiZero{get_int_or(j, "u", 0), get_int(j, "v"), get_opt_int(j, "L")};
  }
  if (kind == "ToothH") {
    reject_unknown(j, {"kind", "u", "v", "h"}, where);
    return est::ToothH{get_int_or(j, "u", 0), get_int(j, "v"), get_opt_int(j, "h")};
  }
  if (kind == "CollisionBeforeExit") {
    reject_unknown(j, {"kind", "N", "d", "starts"}, where);
    return est::CollisionBeforeExit{get_int(j, "N"), get_int(j, "d"), get_starts<2>(j)};
  }
  if (kind == "SigmaRace") {
    reject_unknown(j, {"kind", "N", "d", "starts"}, where);
    return est::SigmaRace{get_int(j, "N"), get_int(j, "d"), get_starts<2>(j)};
  }
  if (kind == "TripleBeforeExit") {
    reject_unknown(j, {"kind", "N", "d", "starts"}, where);
    return est::TripleBeforeExit{get_int(j, "N"), get_int(j, "d"), get_starts<3>(j)};
  }
  if (kind == "ZkhMean") {
    reject_unknown(j, {"kind", "k", "h"}, where);
    return est::ZkhMean{get_int(j, "k"), get_opt_int(j, "h")};
  }
  if (kind == "LocalTimeQuantile") {
    reject_unknown(j, {"kind", "N", "q", "scale"}, where);
    return est::LocalTimeQuantile{get_int(j, "N"), get_double_or(j, "q", 0.5),
                                  get_double_or(j, "scale", 1.0)};
  }
  if (kind == "UpsilonWindows") {
    reject_unknown(j, {"kind", "d", "m_max"}, where);
    return est::UpsilonWindows{get_int(j, "d"), get_int(j, "m_max")};
  }
  throw std::invalid_argument("unknown estimator kind '" + kind + "'");
}

}  // namespace

std::string estimator_name(const Estimator& e) {
  return std::visit(overloaded{
                        [](const est::GamblerRuin&) { return std::string("GamblerRuin"); },
                        [](const est::PsiZero&) { return std::string("PsiZero"); },
                        [](const est::ToothH&) { return std::string("ToothH"); },
                        [](const est::CollisionBeforeExit&) { return std::string("CollisionBeforeExit"); },
                        [](const est::SigmaRace&) { return std::string("SigmaRace"); },
                        [](const est::TripleBeforeExit&) { return std::string("TripleBeforeExit"); },
                        [](const est::ZkhMean&) { return std::string("ZkhMean"); },
                        [](const est::LocalTimeQuantile&) { return std::string("LocalTimeQuantile"); },
                        [](const est::UpsilonWindows&) { return std::string("UpsilonWindows"); },
                    },
                    e);
}

nlohmann::json estimator_params(const Estimator& e) {
  nlohmann::json j = nlohmann::json::object();
  std::visit(overloaded{
                 [&](const est::GamblerRuin& x) { j["v"] = x.v; },
                 [&](const est::PsiZero& x) {
                   j["u"] = x.u;
                   j["v"] = x.v;
                   if (x.L) j["L"] = *x.L;
                 },
                 [&](const est::ToothH& x) {
                   j["u"] = x.u;
                   j["v"] = x.v;
                   if (x.h) j["h"] = *x.h;
                 },
                 [&](const est::CollisionBeforeExit& x) {
                   j["N"] = x.N;
                   j["d"] = x.d;
                   if (x.starts) j["starts"] = starts_json(*x.starts);
                 },
                 [&](const est::SigmaRace& x) {
                   j["N"] = x.N;
                   j["d"] = x.d;
                   if (x.starts) j["starts"] = starts_json(*x.starts);
                 },
                 [&](const est::TripleBeforeExit& x) {
                   j["N"] = x.N;
                   j["d"] = x.d;
                   if (x.starts) j["starts"] = starts_json(*x.starts);
                 },
                 [&](const est::ZkhMean& x) {
                   j["k"] = x.k;
                   if (x.h) j["h"] = *x.h;
                 },
                 [&](const est::LocalTimeQuantile& x) {
                   j["N"] = x.N;
                   j["q"] = x.q;
                   j["scale"] = x.scale;
                 },
                 [&](const est::UpsilonWindows& x) {
                   j["d"] = x.d;
                   j["m_max"] = x.m_max;
                 },
             },
             e);
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"schema", "profile", "estimator", "replicas", "horizon", "master_seed", "ci_level"},
                 "config");
  if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1)
    throw std::invalid_argument("config needs \"schema\": 1");
  if (!j.contains("profile")) throw std::invalid_argument("config needs a profile");
  if (!j.contains("estimator")) throw std::invalid_argument("config needs an estimator");
  ExperimentConfig c;
  c.profile = profile_from_json(j.at("profile"));
  c.estimator = estimator_from_json(j.at("estimator"));
  c.replicas = get_int(j, "replicas");
  c.horizon = get_int_or(j, "horizon", kDefaultHorizon);
  if (j.contains("master_seed")) {
    const auto& ms = j.at("master_seed");
    if (!ms.is_number_integer() || (!ms.is_number_unsigned() && ms.get<std::int64_t>() < 0))
      throw std::invalid_argument("master_seed must be an unsigned 64-bit integer");
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  c.ci_level = get_double_or(j, "ci_level", 0.95);
  validate(c);
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json est = estimator_params(c.estimator);
  est["kind"] = estimator_name(c.estimator);
  return {{"schema", 1},
          {"profile", to_json(c.profile)},
          {"estimator", est},
          {"replicas", c.replicas},
          {"horizon", c.horizon},
          {"master_seed", c.master_seed},
          {"ci_level", c.ci_level}};
}

std::string fingerprint(const ExperimentConfig& config) {
  const std::uint64_t h = fnv1a64(to_json(config).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv_row(const Estimate& e) {
  std::ostringstream os;
  os << e.estimator << ',' << csv_quote(e.params.dump()) << ',' << format_double(e.point) << ','
     << format_double(e.std_error) << ',' << format_double(e.ci_lo) << ',' << format_double(e.ci_hi)
     << ',' << e.replicas << ',' << e.censored << ',' << e.master_seed << ',' << e.fingerprint;
  return os.str();
}

nlohmann::json to_json(const Estimate& e) {
  return {{"estimator", e.estimator}, {"params", e.params},     {"point", e.point},
          {"stderr", e.std_error},    {"ci_lo", e.ci_lo},       {"ci_hi", e.ci_hi},
          {"replicas", e.replicas},   {"censored", e.censored}, {"master_seed", e.master_seed},
          {"fingerprint", e.fingerprint}};
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COMBWALK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ReplicaOutcome run_replica(const ExperimentConfig& c, std::uint64_t index) {
  const RngStream rng = replica_stream(c.master_seed, index);
  const Profile& p = c.profile;
  const std::int64_t H = c.horizon;
  return std::visit(overloaded{
                        [&](const est::GamblerRuin& e) { return gambler_ruin(e, H, rng); },
                        [&](const est::PsiZero& e) { return psi_zero(p, e, H, rng); },
                        [&](const est::ToothH& e) { return tooth_h(p, e, H, rng); },
                        [&](const est::CollisionBeforeExit& e) { return collision_before_exit(p, e, H, rng); },
                        [&](const est::SigmaRace& e) { return sigma_race(p, e, H, rng); },
                        [&](const est::TripleBeforeExit& e) { return triple_before_exit(p, e, H, rng); },
                        [&](const est::ZkhMean& e) { return zkh_mean(p, e, H, rng); },
                        [&](const est::LocalTimeQuantile& e) { return local_time_quantile(e, rng); },
                        [&](const est::UpsilonWindows& e) { return upsilon(p, e, H, rng); },
                    },
                    c.estimator);
}

Estimate run_estimator(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.replicas);
  std::vector<ReplicaOutcome> outcomes(n);

  const unsigned threads = std::min<unsigned>(resolve_threads(options.threads),
                                               static_cast<unsigned>(std::min<std::size_t>(n, 1024)));
  auto work = [&](unsigned tid) {
    for (std::size_t i = tid; i < n; i += threads) outcomes[i] = run_replica(config, i);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  Estimate e;
  e.estimator = estimator_name(config.estimator);
  e.params = estimator_params(config.estimator);
  e.params["profile"] = to_json(config.profile);
  e.params["horizon"] = config.horizon;
  e.replicas = config.replicas;
  e.master_seed = config.master_seed;
  e.fingerprint = fingerprint(config);
  e.interval = interval_kind(config.estimator);

  // Fold strictly in replica-index order.
  RunningMoments moments;
  std::int64_t successes = 0;
  std::vector<double> values;
  for (const auto& o : outcomes) {
    if (o.censored) {
      ++e.censored;
      continue;
    }
    moments.add(o.value);
    if (o.value != 0.0) ++successes;
    values.push_back(o.value);
  }
  if (moments.count() == 0) {
    throw EstimationError("all " + std::to_string(e.replicas) + " replicas censored at horizon " +
                              std::to_string(config.horizon),
                          e.replicas, e.censored);
  }
  const std::int64_t used = moments.count();
  switch (e.interval) {
    case IntervalKind::Wilson: {
      const double p = static_cast<double>(successes) / static_cast<double>(used);
      e.point = p;
      e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(used));
      const Interval ci = wilson_interval(successes, used, config.ci_level);
      e.ci_lo = ci.lo;
      e.ci_hi = ci.hi;
      break;
    }
    case IntervalKind::Normal: {
      e.point = moments.mean();
      e.std_error = moments.standard_error();
      const Interval ci = normal_interval(e.point, e.std_error, config.ci_level);
      e.ci_lo = ci.lo;
      e.ci_hi = ci.hi;
      break;
    }
    case IntervalKind::OrderStatistic: {
      std::sort(values.begin(), values.end());
      const auto& lt = std::get<est::LocalTimeQuantile>(config.estimator);
      const QuantileEstimate q = quantile_estimate(values, lt.q, config.ci_level);
      e.point = q.point;
      e.ci_lo = q.ci.lo;
      e.ci_hi = q.ci.hi;
      e.std_error = (q.ci.hi - q.ci.lo) / (2.0 * normal_critical(config.ci_level));
      break;
    }
  }
  return e;
}

std::vector<SweepRow> sweep(const nlohmann::json& base, const std::vector<nlohmann::json>& grid,
                            const RunOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sweep needs a nonempty grid");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& patch : grid) {
    SweepRow row;
    row.config = base;
    row.config.merge_patch(patch);
    try {
      ExperimentConfig c = config_from_json(row.config);
      c.master_seed = derive_seed(c.master_seed, fnv1a64(fingerprint(c)));
      row.estimate = run_estimator(c, options);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace combwalk
