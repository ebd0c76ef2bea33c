#include "combwalk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "combwalk/errors.hpp"
#include "combwalk/rng.hpp"

namespace combwalk {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Absorbs last-ulp error from pow/log so that e.g. 3^2 floors to 9.
constexpr double kFloorSlack = 1e-9;

double abs_x(std::int64_t x) { return std::fabs(static_cast<double>(x)); }

// Uniform on (0, 1) from the stateless hash of (seed, x).
double site_uniform(std::uint64_t seed, std::int64_t x) {
  const std::uint64_t bits = derive_seed(seed, static_cast<std::uint64_t>(x));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double sample_height(const family::Distribution& dist, double u) {
  return std::visit(
      overloaded{
          [&](const family::Geometric& g) -> double {
            if (g.p >= 1.0) return 0.0;
            // P(K >= k) = (1 - p)^k
            return std::floor(std::log(u) / std::log1p(-g.p));
          },
          [&](const family::Poisson& p) -> double {
            double pmf = std::exp(-p.lambda);
            double cdf = pmf;
            std::int64_t k = 0;
            while (u > cdf && k < 100000) {
              ++k;
              pmf *= p.lambda / static_cast<double>(k);
              cdf += pmf;
              if (pmf == 0.0 && cdf < u) break;
            }
            return static_cast<double>(k);
          },
          [&](const family::Empirical& e) -> double {
            const double total = std::accumulate(e.weights.begin(), e.weights.end(), 0.0);
            double acc = 0.0;
            for (std::size_t k = 0; k < e.weights.size(); ++k) {
              acc += e.weights[k];
              if (u * total < acc) return static_cast<double>(k);
            }
            return static_cast<double>(e.weights.size() - 1);
          },
      },
      dist);
}

void validate(const ProfileFamily& fam) {
  std::visit(overloaded{
                 [](const family::Constant& c) {
                   if (!(c.a >= 0.0) || !std::isfinite(c.a))
                     throw std::invalid_argument("constant profile needs a >= 0");
                 },
                 [](const family::Power& p) {
                   if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
                     throw std::invalid_argument("power profile needs alpha > 0");
                 },
                 [](const family::LinLog& l) {
                   if (!(l.beta >= 0.0) || !std::isfinite(l.beta))
                     throw std::invalid_argument("linlog profile needs beta >= 0");
                 },
                 [](const family::NLogN&) {},
                 [](const family::Table& t) {
                   for (const auto& [x, f] : t.values)
                     if (!(f >= 0.0) || !std::isfinite(f))
                       throw std::invalid_argument("table profile values must be finite and >= 0");
                 },
                 [](const family::IidSample& s) {
                   std::visit(overloaded{
                                  [](const family::Geometric& g) {
                                    if (!(g.p > 0.0 && g.p <= 1.0))
                                      throw std::invalid_argument("geometric needs 0 < p <= 1");
                                  },
                                  [](const family::Poisson& p) {
                                    if (!(p.lambda >= 0.0) || p.lambda > 500.0)
                                      throw std::invalid_argument("poisson needs 0 <= lambda <= 500");
                                  },
                                  [](const family::Empirical& e) {
                                    if (e.weights.empty())
                                      throw std::invalid_argument("empirical needs weights");
                                    double total = 0.0;
                                    for (double w : e.weights) {
                                      if (!(w >= 0.0) || !std::isfinite(w))
                                        throw std::invalid_argument("empirical weights must be >= 0");
                                      total += w;
                                    }
                                    if (!(total > 0.0))
                                      throw std::invalid_argument("empirical weights sum to zero");
                                  },
                              },
                              s.distribution);
                 },
             },
             fam);
}

}  // namespace

Profile::Profile(ProfileFamily fam) : family_(std::move(fam)) {
  validate(family_);
  auto heights = std::make_shared<std::vector<std::int64_t>>(
      static_cast<std::size_t>(2 * kCacheRadius + 1));
  for (std::int64_t x = -kCacheRadius; x <= kCacheRadius; ++x) {
    (*heights)[static_cast<std::size_t>(x + kCacheRadius)] = compute_height(x);
  }
  center_ = heights->data() + kCacheRadius;
  heights_ = std::move(heights);
}

double Profile::value(std::int64_t x) const {
  return std::visit(
      overloaded{
          [](const family::Constant& c) { return c.a; },
          [&](const family::Power& p) { return x == 0 ? 0.0 : std::pow(abs_x(x), p.alpha); },
          [&](const family::LinLog& l) {
            const double ax = abs_x(x);
            const double lg = std::log(std::max(ax, 1.0));
            return l.beta == 0.0 ? ax : ax * std::pow(lg, l.beta);
          },
          [&](const family::NLogN&) {
            const double ax = abs_x(x);
            return ax * std::log(std::max(ax, 1.0));
          },
          [&](const family::Table& t) {
            auto it = t.values.find(x);
            return it == t.values.end() ? 0.0 : it->second;
          },
          [&](const family::IidSample& s) {
            return sample_height(s.distribution, site_uniform(s.profile_seed, x));
          },
      },
      family_);
}

std::int64_t Profile::compute_height(std::int64_t x) const {
  const double f = std::floor(value(x) + kFloorSlack);
  if (!(f < static_cast<double>(kMaxHeight))) return kMaxHeight;
  return static_cast<std::int64_t>(f);
}

bool Profile::symmetric_monotone() const {
  return std::holds_alternative<family::Constant>(family_) ||
         std::holds_alternative<family::Power>(family_) ||
         std::holds_alternative<family::LinLog>(family_) ||
         std::holds_alternative<family::NLogN>(family_);
}

std::string Profile::family_name() const {
  return std::visit(overloaded{
                        [](const family::Constant&) { return std::string("constant"); },
                        [](const family::Power&) { return std::string("power"); },
                        [](const family::LinLog&) { return std::string("linlog"); },
                        [](const family::NLogN&) { return std::string("nlogn"); },
                        [](const family::Table&) { return std::string("table"); },
                        [](const family::IidSample&) { return std::string("iid"); },
                    },
                    family_);
}

std::int64_t tooth_height(const Profile& profile, std::int64_t x) {
  return profile.tooth_height(x);
}

bool is_vertex(const Profile& profile, const Vertex& v) {
  const std::int64_t h = profile.tooth_height(v.x);
  return v.y >= -h && v.y <= h;
}

int degree(const Profile& profile, const Vertex& v) {
  const std::int64_t h = profile.tooth_height(v.x);
  if (v.y == 0) return h >= 1 ? 4 : 2;
  return (v.y == h || v.y == -h) ? 1 : 2;
}

std::vector<Vertex> neighbors(const Profile& profile, const Vertex& v) {
  if (!is_vertex(profile, v)) {
    std::ostringstream os;
    os << "(" << v.x << "," << v.y << ") is not a vertex: tooth height at " << v.x << " is "
       << profile.tooth_height(v.x);
    throw std::domain_error(os.str());
  }
  const std::int64_t h = profile.tooth_height(v.x);
  if (v.y == 0) {
    std::vector<Vertex> out{{v.x - 1, 0}, {v.x + 1, 0}};
    if (h >= 1) {
      out.push_back({v.x, 1});
      out.push_back({v.x, -1});
    }
    return out;
  }
  const std::int64_t toward = v.y > 0 ? v.y - 1 : v.y + 1;
  const std::int64_t away = v.y > 0 ? v.y + 1 : v.y - 1;
  std::vector<Vertex> out{{v.x, toward}};
  if (away >= -h && away <= h) out.push_back({v.x, away});
  return out;
}

double breve_f(const Profile& profile, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("breve_f needs n >= 0");
  if (profile.symmetric_monotone()) {
    return std::max(1.0, profile.value(n));
  }
  double m = 1.0;
  for (std::int64_t i = -n; i <= n; ++i) m = std::max(m, profile.value(i));
  return m;
}

double reciprocal_partial_sum(const Profile& profile, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("reciprocal_partial_sum needs N >= 1");
  const bool fast = profile.symmetric_monotone();
  double running = std::max(1.0, profile.value(0));
  long double sum = 0.0L;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (fast) {
      running = std::max(1.0, profile.value(n));
    } else {
      running = std::max({running, profile.value(n), profile.value(-n)});
    }
    sum += 1.0L / static_cast<long double>(running);
  }
  return static_cast<double>(sum);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::InfiniteCollision_Thm1_1:
      return "InfiniteCollision_Thm1_1";
    case Verdict::FiniteCollision_Thm4_1:
      return "FiniteCollision_Thm4_1";
    case Verdict::TripleCollision_Thm3_1:
      return "TripleCollision_Thm3_1";
    case Verdict::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

Classification classify_profile(const Profile& profile) {
  using V = Verdict;
  Classification c;
  auto set = [&](std::vector<V> vs, std::string witness) {
    c.verdict = vs.front();
    c.verdicts = std::move(vs);
    c.witness = std::move(witness);
  };
  std::visit(
      overloaded{
          [&](const family::Constant& k) {
            std::ostringstream os;
            os << "f = " << k.a << " is bounded, so sum 1/breve_f diverges; "
               << "sum_{|i|<=n} f(i) = O(n) gives triple collisions";
            set({V::InfiniteCollision_Thm1_1, V::TripleCollision_Thm3_1}, os.str());
          },
          [&](const family::Power& p) {
            std::ostringstream os;
            if (p.alpha <= 1.0) {
              os << "f(n) = |n|^" << p.alpha << " <= |n|, so breve_f(n) <= n and sum 1/breve_f diverges";
              set({V::InfiniteCollision_Thm1_1}, os.str());
            } else {
              os << "f(n) = |n|^" << p.alpha << " with alpha > 1: sum 1/breve_f converges and "
                 << "no sufficient condition here applies";
              set({V::Unknown}, os.str());
            }
          },
          [&](const family::LinLog& l) {
            std::ostringstream os;
            if (l.beta <= 1.0) {
              os << "f(n) = |n| log^" << l.beta << " |n| = O(n log n), so f(-n)+f(n) = O(n log n)";
              set({V::InfiniteCollision_Thm1_1}, os.str());
            } else if (l.beta > 2.0) {
              os << "f(n) = |n| log^" << l.beta << " |n| with beta > 2: finitely many collisions";
              set({V::FiniteCollision_Thm4_1}, os.str());
            } else {
              os << "f(n) = |n| log^" << l.beta << " |n| with 1 < beta <= 2: open; conjectured "
                 << "finite collision property";
              set({V::Unknown}, os.str());
            }
          },
          [&](const family::NLogN&) {
            set({V::InfiniteCollision_Thm1_1}, "f(-n)+f(n) = 2 n log n = O(n log n)");
          },
          [&](const family::Table&) {
            set({V::InfiniteCollision_Thm1_1, V::TripleCollision_Thm3_1},
                "finitely supported table: f is bounded and sum_{|i|<=n} f(i) = O(n)");
          },
          [&](const family::IidSample& s) {
            if (std::holds_alternative<family::Empirical>(s.distribution)) {
              set({V::TripleCollision_Thm3_1, V::InfiniteCollision_Thm1_1},
                  "i.i.d. heights with finite mean give triple collisions for almost every "
                  "profile; bounded support also makes breve_f bounded");
            } else {
              set({V::TripleCollision_Thm3_1},
                  "i.i.d. heights with finite mean give triple collisions for almost every "
                  "profile");
            }
          },
      },
      profile.family());
  return c;
}

std::size_t truncation_size(const Profile& profile, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("truncation radius must be >= 0");
  std::size_t count = 0;
  for (std::int64_t i = -n; i <= n; ++i) {
    count += static_cast<std::size_t>(2 * profile.tooth_height(i) + 1);
  }
  return count;
}

Truncation enumerate_truncation(const Profile& profile, std::int64_t n, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("enumerate_truncation needs n >= 1");
  Truncation t;
  t.count = truncation_size(profile, n);
  if (t.count > cap) {
    std::ostringstream os;
    os << "|V_" << n << "| = " << t.count << " exceeds cap " << cap;
    throw ResourceError(os.str());
  }
  t.vertices.reserve(t.count);
  for (std::int64_t x = -n; x <= n; ++x) {
    const std::int64_t h = profile.tooth_height(x);
    for (std::int64_t y = -h; y <= h; ++y) t.vertices.push_back({x, y});
  }
  return t;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
  if (!obj.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw std::invalid_argument(std::string("unknown field '") + it.key() + "' in " + where);
  }
}

double get_number(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number())
    throw std::invalid_argument(std::string("missing numeric field '") + key + "'");
  return obj.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const Profile& profile) {
  nlohmann::json j;
  j["family"] = profile.family_name();
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      overloaded{
          [&](const family::Constant& c) { params["a"] = c.a; },
          [&](const family::Power& p) { params["alpha"] = p.alpha; },
          [&](const family::LinLog& l) { params["beta"] = l.beta; },
          [&](const family::NLogN&) {},
          [&](const family::Table& t) {
            nlohmann::json values = nlohmann::json::array();
            for (const auto& [x, f] : t.values) values.push_back({x, f});
            params["values"] = values;
          },
          [&](const family::IidSample& s) {
            std::visit(overloaded{
                           [&](const family::Geometric& g) {
                             params["distribution"] = "geometric";
                             params["p"] = g.p;
                           },
                           [&](const family::Poisson& p) {
                             params["distribution"] = "poisson";
                             params["lambda"] = p.lambda;
                           },
                           [&](const family::Empirical& e) {
                             params["distribution"] = "empirical";
                             params["weights"] = e.weights;
                           },
                       },
                       s.distribution);
            j["profile_seed"] = s.profile_seed;
          },
      },
      profile.family());
  j["params"] = params;
  return j;
}

Profile profile_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"family", "params", "profile_seed"}, "profile");
  if (!j.contains("family") || !j.at("family").is_string())
    throw std::invalid_argument("profile needs a string 'family'");
  const std::string fam = j.at("family").get<std::string>();
  const nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (fam != "iid" && j.contains("profile_seed"))
    throw std::invalid_argument("profile_seed is only valid for the iid family");
  if (fam == "constant") {
    reject_unknown(params, {"a"}, "constant params");
    return Profile(family::Constant{get_number(params, "a")});
  }
  if (fam == "power") {
    reject_unknown(params, {"alpha"}, "power params");
    return Profile(family::Power{get_number(params, "alpha")});
  }
  if (fam == "linlog") {
    reject_unknown(params, {"beta"}, "linlog params");
    return Profile(family::LinLog{get_number(params, "beta")});
  }
  if (fam == "nlogn") {
    reject_unknown(params, {}, "nlogn params");
    return Profile(family::NLogN{});
  }
  if (fam == "table") {
    reject_unknown(params, {"values"}, "table params");
    if (!params.contains("values") || !params.at("values").is_array())
      throw std::invalid_argument("table profile needs 'values': [[x, f], ...]");
    family::Table t;
    for (const auto& pair : params.at("values")) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number())
        throw std::invalid_argument("table entries must be [integer x, number f]");
      t.values[pair[0].get<std::int64_t>()] = pair[1].get<double>();
    }
    return Profile(std::move(t));
  }
  if (fam == "iid") {
    if (!j.contains("profile_seed") || !j.at("profile_seed").is_number_unsigned())
      throw std::invalid_argument("iid profile needs an unsigned 'profile_seed'");
    const auto seed = j.at("profile_seed").get<std::uint64_t>();
    if (!params.contains("distribution") || !params.at("distribution").is_string())
      throw std::invalid_argument("iid profile needs params.distribution");
    const std::string dist = params.at("distribution").get<std::string>();
    if (dist == "geometric") {
      reject_unknown(params, {"distribution", "p"}, "geometric params");
      return Profile(family::IidSample{family::Geometric{get_number(params, "p")}, seed});
    }
    if (dist == "poisson") {
      reject_unknown(params, {"distribution", "lambda"}, "poisson params");
      return Profile(family::IidSample{family::Poisson{get_number(params, "lambda")}, seed});
    }
    if (dist == "empirical") {
      reject_unknown(params, {"distribution", "weights"}, "empirical params");
      if (!params.contains("weights") || !params.at("weights").is_array())
        throw std::invalid_argument("empirical distribution needs 'weights'");
      return Profile(family::IidSample{
          family::Empirical{params.at("weights").get<std::vector<double>>()}, seed});
    }
    throw std::invalid_argument("unknown distribution '" + dist + "'");
  }
  throw std::invalid_argument("unknown profile family '" + fam + "'");
}

}  // namespace combwalk
