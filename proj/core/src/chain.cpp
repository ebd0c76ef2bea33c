#include "combwalk/chain.hpp"

#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "combwalk/errors.hpp"

namespace combwalk {

double FiniteChain::row_total(std::size_t i) const {
  long double total = 0.0L;
  for (const auto& e : rows[i]) total += e.w.value();
  for (const auto& [label, probs] : exits) total += probs[i].value();
  return static_cast<double>(total);
}

void FiniteChain::add_exit(const std::string& label, std::size_t i, Weight w) {
  auto& probs = exits[label];
  if (probs.size() < rows.size()) probs.resize(rows.size(), Weight{0, 1});
  Weight& cur = probs[i];
  if (cur.num == 0) {
    cur = w;
  } else {
    Rational sum = cur.exact() + w.exact();
    cur = Weight{static_cast<std::int64_t>(numerator(sum)), static_cast<std::int64_t>(denominator(sum))};
  }
}

std::int32_t CombChain::at(const Vertex& v) const {
  auto it = index.find(v);
  if (it == index.end()) throw std::out_of_range("vertex not a state of this chain");
  return it->second;
}

namespace {

CombChain chain_over(const Profile& profile, std::vector<Vertex> vertices,
                     const std::string& exit_label,
                     const auto& is_exit /* (from, to) -> bool */) {
  CombChain cc;
  cc.vertices = std::move(vertices);
  for (std::size_t i = 0; i < cc.vertices.size(); ++i)
    cc.index.emplace(cc.vertices[i], static_cast<std::int32_t>(i));
  cc.chain.rows.resize(cc.vertices.size());
  cc.chain.exits[exit_label].assign(cc.vertices.size(), Weight{0, 1});
  cc.degrees.resize(cc.vertices.size());
  for (std::size_t i = 0; i < cc.vertices.size(); ++i) {
    const Vertex& v = cc.vertices[i];
    const auto nbrs = neighbors(profile, v);
    const auto deg = static_cast<std::int64_t>(nbrs.size());
    cc.degrees[i] = static_cast<int>(deg);
    for (const auto& u : nbrs) {
      if (is_exit(v, u)) {
        cc.chain.add_exit(exit_label, i, Weight{1, deg});
      } else {
        cc.chain.rows[i].push_back({cc.index.at(u), Weight{1, deg}});
      }
    }
  }
  return cc;
}

}  // namespace

CombChain truncated_comb_chain(const Profile& profile, std::int64_t L, std::size_t budget) {
  auto trunc = enumerate_truncation(profile, L, budget);
  return chain_over(profile, std::move(trunc.vertices), "exit",
                    [L](const Vertex&, const Vertex& u) { return u.x > L || u.x < -L; });
}

CombChain column_chain(const Profile& profile, std::int64_t x) {
  std::vector<Vertex> vs;
  const std::int64_t h = profile.tooth_height(x);
  for (std::int64_t y = -h; y <= h; ++y) vs.push_back({x, y});
  return chain_over(profile, std::move(vs), "horizontal",
                    [](const Vertex& v, const Vertex& u) { return u.x != v.x; });
}

FiniteChain interval_chain(std::int64_t b) {
  if (b < 2) throw std::invalid_argument("interval_chain needs b >= 2");
  FiniteChain c;
  const auto n = static_cast<std::size_t>(b - 1);
  c.rows.resize(n);
  c.exits["low"].assign(n, Weight{0, 1});
  c.exits["high"].assign(n, Weight{0, 1});
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t y = static_cast<std::int64_t>(i) + 1;
    if (y - 1 == 0) {
      c.add_exit("low", i, Weight{1, 2});
    } else {
      c.rows[i].push_back({static_cast<std::int32_t>(i - 1), Weight{1, 2}});
    }
    if (y + 1 == b) {
      c.add_exit("high", i, Weight{1, 2});
    } else {
      c.rows[i].push_back({static_cast<std::int32_t>(i + 1), Weight{1, 2}});
    }
  }
  return c;
}

void require_absorbing_reachable(const FiniteChain& chain) {
  const std::size_t n = chain.size();
  std::vector<std::vector<std::int32_t>> reverse(n);
  std::vector<char> good(n, 0);
  std::deque<std::int32_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : chain.rows[i]) reverse[static_cast<std::size_t>(e.to)].push_back(static_cast<std::int32_t>(i));
    for (const auto& [label, probs] : chain.exits) {
      if (probs[i].num != 0 && !good[i]) {
        good[i] = 1;
        queue.push_back(static_cast<std::int32_t>(i));
      }
    }
  }
  while (!queue.empty()) {
    const auto j = static_cast<std::size_t>(queue.front());
    queue.pop_front();
    for (auto i : reverse[j]) {
      if (!good[static_cast<std::size_t>(i)]) {
        good[static_cast<std::size_t>(i)] = 1;
        queue.push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!good[i]) {
      std::ostringstream os;
      os << "transient state " << i << " cannot reach an absorbing set; I - Q is singular";
      throw SingularityError(os.str());
    }
  }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat i_minus_q(const FiniteChain& chain, bool transpose) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    for (const auto& e : chain.rows[i]) {
      if (transpose) {
        trip.emplace_back(e.to, static_cast<int>(i), -e.w.value());
      } else {
        trip.emplace_back(static_cast<int>(i), e.to, -e.w.value());
      }
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

std::vector<double> solve_sparse(const FiniteChain& chain, const std::vector<double>& rhs,
                                 bool transpose) {
  if (rhs.size() != chain.size()) throw std::invalid_argument("rhs size mismatch");
  require_absorbing_reachable(chain);
  const SpMat A = i_minus_q(chain, transpose);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SingularityError("sparse LU factorization failed");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = lu.solve(b);
  // one round of iterative refinement
  const Eigen::VectorXd r = b - A * x;
  x += lu.solve(r);
  return {x.data(), x.data() + x.size()};
}

}  // namespace

std::vector<double> solve_absorbing(const FiniteChain& chain, const std::vector<double>& rhs) {
  return solve_sparse(chain, rhs, false);
}

std::vector<double> solve_visits(const FiniteChain& chain, const std::vector<double>& init) {
  return solve_sparse(chain, init, true);
}

std::vector<Rational> solve_absorbing_exact(const FiniteChain& chain,
                                            const std::vector<Rational>& rhs, std::size_t budget) {
  const std::size_t n = chain.size();
  if (n > budget) {
    std::ostringstream os;
    os << "rational solve over " << n << " states exceeds budget " << budget;
    throw ResourceError(os.str());
  }
  if (rhs.size() != n) throw std::invalid_argument("rhs size mismatch");
  require_absorbing_reachable(chain);

  // Sparse Gaussian elimination on I - Q in natural order. I - Q is a
  // nonsingular M-matrix here, so every pivot is positive without pivoting.
  std::vector<std::map<std::int32_t, Rational>> A(n);
  std::vector<std::set<std::int32_t>> col_rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    A[i][static_cast<std::int32_t>(i)] += 1;
    for (const auto& e : chain.rows[i]) A[i][e.to] -= e.w.exact();
    for (const auto& [c, v] : A[i]) col_rows[static_cast<std::size_t>(c)].insert(static_cast<std::int32_t>(i));
  }
  std::vector<Rational> b = rhs;
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<std::int32_t>(k);
    const Rational pivot = A[k].at(kk);
    if (pivot == 0) throw SingularityError("zero pivot in rational elimination");
    for (auto it = col_rows[k].upper_bound(kk); it != col_rows[k].end(); ++it) {
      const auto i = static_cast<std::size_t>(*it);
      auto f_it = A[i].find(kk);
      if (f_it == A[i].end() || f_it->second == 0) continue;
      const Rational factor = f_it->second / pivot;
      for (auto kt = A[k].lower_bound(kk); kt != A[k].end(); ++kt) {
        auto [slot, inserted] = A[i].try_emplace(kt->first, 0);
        slot->second -= factor * kt->second;
        if (inserted) col_rows[static_cast<std::size_t>(kt->first)].insert(static_cast<std::int32_t>(i));
      }
      b[i] -= factor * b[k];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational acc = b[k];
    for (auto it = A[k].upper_bound(static_cast<std::int32_t>(k)); it != A[k].end(); ++it)
      acc -= it->second * x[static_cast<std::size_t>(it->first)];
    x[k] = acc / A[k].at(static_cast<std::int32_t>(k));
  }
  return x;
}

double residual(const FiniteChain& chain, const std::vector<double>& x, const std::vector<double>& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    long double r = x[i];
    for (const auto& e : chain.rows[i]) r -= e.w.value() * x[static_cast<std::size_t>(e.to)];
    worst = std::max(worst, std::fabs(static_cast<double>(r - rhs[i])));
  }
  return worst;
}

}  // namespace combwalk
