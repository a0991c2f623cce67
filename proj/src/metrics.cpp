#include "pm/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <queue>
#include <set>
#include <thread>

namespace pm {

namespace {

/// Hopcroft-Karp on a bipartite graph with equal sides.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(std::size_t n) : n_(n), adj_(n) {}

  void add_edge(std::size_t u, std::size_t v) { adj_[u].push_back(v); }

  std::size_t run() {
    match_left_.assign(n_, kNone);
    match_right_.assign(n_, kNone);
    std::size_t size = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < n_; ++u) {
        if (match_left_[u] == kNone && dfs(u)) ++size;
      }
    }
    return size;
  }

  std::size_t mate_of_left(std::size_t u) const { return match_left_[u]; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    level_.assign(n_, kNone);
    for (std::size_t u = 0; u < n_; ++u) {
      if (match_left_[u] == kNone) {
        level_[u] = 0;
        q.push(u);
      }
    }
    bool found = false;
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (auto v : adj_[u]) {
        auto w = match_right_[v];
        if (w == kNone) {
          found = true;
        } else if (level_[w] == kNone) {
          level_[w] = level_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t u) {
    for (auto v : adj_[u]) {
      auto w = match_right_[v];
      if (w == kNone || (level_[w] == level_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    level_[u] = kNone;
    return false;
  }

  std::size_t n_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_left_, match_right_, level_;
};

// Left side: bars of d1, then diagonal copies for bars of d2.
// Right side: bars of d2, then diagonal copies for bars of d1.
struct EdgeCost {
  std::size_t left, right;
  ExtRational cost;
};

std::vector<EdgeCost> bottleneck_edges(const std::vector<Bar>& a, const std::vector<Bar>& b) {
  const std::size_t n1 = a.size(), n2 = b.size();
  std::vector<EdgeCost> edges;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) edges.push_back({i, j, matching_cost(a[i], b[j])});
    edges.push_back({i, n2 + i, diagonal_cost(a[i])});
  }
  for (std::size_t j = 0; j < n2; ++j) {
    edges.push_back({n1 + j, j, diagonal_cost(b[j])});
    for (std::size_t i = 0; i < n1; ++i) edges.push_back({n1 + j, n2 + i, ExtRational(0)});
  }
  return edges;
}

std::optional<BipartiteMatcher> perfect_matching_at(const std::vector<EdgeCost>& edges, std::size_t n,
                                                    const ExtRational& threshold) {
  BipartiteMatcher m(n);
  for (const auto& e : edges) {
    if (e.cost <= threshold) m.add_edge(e.left, e.right);
  }
  if (m.run() != n) return std::nullopt;
  return m;
}

}  // namespace

ExtRational matching_cost(const Bar& a, const Bar& b) {
  return std::max(ExtRational(abs(a.birth - b.birth)), abs_difference(a.death, b.death));
}

ExtRational diagonal_cost(const Bar& a) {
  if (a.death.is_infinite()) return ExtRational::infinity();
  return ExtRational((a.death.value() - a.birth) / 2);
}

ExtRational matching_cost(const Matching& m) {
  ExtRational c(0);
  for (const auto& [a, b] : m.pairs) c = std::max(c, matching_cost(a, b));
  for (const auto& a : m.unmatched_first) c = std::max(c, diagonal_cost(a));
  for (const auto& b : m.unmatched_second) c = std::max(c, diagonal_cost(b));
  return c;
}

BottleneckResult bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
  const auto a = d1.bars();
  const auto b = d2.bars();
  const std::size_t n = a.size() + b.size();
  const auto edges = bottleneck_edges(a, b);

  std::set<Rational> finite_costs{Rational(0)};
  for (const auto& e : edges) {
    if (e.cost.is_finite()) finite_costs.insert(e.cost.value());
  }
  std::vector<Rational> candidates(finite_costs.begin(), finite_costs.end());

  ExtRational distance = ExtRational::infinity();
  std::optional<BipartiteMatcher> best;
  if (perfect_matching_at(edges, n, candidates.back())) {
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (perfect_matching_at(edges, n, candidates[mid])) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    distance = candidates[lo];
  }
  best = perfect_matching_at(edges, n, distance);

  Matching matching;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto j = best->mate_of_left(i);
    if (j < b.size()) {
      matching.pairs.emplace_back(a[i], b[j]);
    } else {
      matching.unmatched_first.push_back(a[i]);
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (best->mate_of_left(a.size() + j) == j) matching.unmatched_second.push_back(b[j]);
  }
  return {distance, std::move(matching)};
}

ExtRational interleaving_distance(const GridModule& u, const GridModule& v) {
  if (u.prime() != v.prime()) throw std::invalid_argument("interleaving_distance: prime mismatch");
  return bottleneck_distance(barcode(u), barcode(v));
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("PM_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<Residue> concat(const std::vector<Residue>& a, const std::vector<Residue>& b) {
  std::vector<Residue> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<Residue> digits_of(std::uint64_t index, std::size_t n, std::uint32_t p) {
  std::vector<Residue> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = static_cast<Residue>(index % p);
    index /= p;
  }
  return d;
}

ModuleMorphism combination(const std::vector<ModuleMorphism>& basis, const std::vector<Residue>& coeffs,
                           const GridModule& u, const GridModule& v, const Rational& e) {
  ModuleMorphism out = ModuleMorphism::zero(u, v, e);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (coeffs[i] != 0) out = out + basis[i].scaled(coeffs[i]);
  }
  return out;
}

}  // namespace

std::optional<Interleaving> interleaving_oracle(const GridModule& u, const GridModule& v, const Rational& e,
                                                const OracleOptions& opts) {
  if (u.prime() != v.prime()) throw std::invalid_argument("interleaving_oracle: prime mismatch");
  if (e < 0) throw std::invalid_argument("interleaving_oracle: negative e");
  if (semantically_equal(u, v)) {
    auto shift = [&](const Rational& s) { return u.map_between(s, s + e); };
    return Interleaving{ModuleMorphism(u, v, e, shift), ModuleMorphism(v, u, e, shift)};
  }
  const std::uint32_t p = u.prime();
  const auto phi_basis = hom_basis(u, v, e);
  const auto psi_basis = hom_basis(v, u, e);
  const std::size_t n = phi_basis.size(), m = psi_basis.size();

  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > opts.budget / p) {
      throw BudgetExceeded("Hom(U, V T_e) has dimension " + std::to_string(n) + ", over the enumeration budget");
    }
    total *= p;
  }
  if (total > opts.budget) throw BudgetExceeded("enumeration budget exceeded");

  const auto rhs_vec = concat(sigma(u, 2 * e).flatten(), sigma(v, 2 * e).flatten());
  // Column contributions: cols[i][k] = flatten((C_k T_e) B_i) ++ flatten((B_i T_e) C_k).
  std::vector<std::vector<std::vector<Residue>>> cols(n, std::vector<std::vector<Residue>>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      cols[i][k] = concat(compose(phi_basis[i], psi_basis[k]).flatten(), compose(psi_basis[k], phi_basis[i]).flatten());
    }
  }
  const std::size_t len = rhs_vec.size();
  const Matrix rhs(p, len, 1, rhs_vec);

  auto try_index = [&](std::uint64_t index) -> std::optional<Matrix> {
    const auto x = digits_of(index, n, p);
    std::vector<Residue> flat(len * m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = cols[i][k];
        for (std::size_t r = 0; r < len; ++r) {
          auto& dst = flat[r * m + k];
          dst = static_cast<Residue>((dst + static_cast<std::uint64_t>(x[i]) * c[r]) % p);
        }
      }
    }
    return solve(Matrix(p, len, m, std::move(flat)), rhs);
  };

  const unsigned threads = static_cast<unsigned>(
      std::min<std::uint64_t>(total, opts.threads ? opts.threads : default_thread_count()));
  std::atomic<std::uint64_t> best{total};
  auto worker = [&](unsigned t) {
    for (std::uint64_t idx = t; idx < total && idx < best.load(); idx += threads) {
      if (try_index(idx)) {
        auto cur = best.load();
        while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
        }
        return;
      }
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (best.load() == total) return std::nullopt;

  const auto x = digits_of(best.load(), n, p);
  const auto y = try_index(best.load());
  std::vector<Residue> ycoef(m);
  for (std::size_t k = 0; k < m; ++k) ycoef[k] = (*y)(k, 0);
  return Interleaving{combination(phi_basis, x, u, v, e), combination(psi_basis, ycoef, v, u, e)};
}

std::vector<Rational> oracle_candidates(const GridModule& u, const GridModule& v) {
  std::vector<Rational> values = merge_grids(u.grid(), v.grid());
  std::set<Rational> out{Rational(0)};
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      Rational d = values[j] - values[i];
      out.insert(d);
      out.insert(d / 2);
    }
  }
  return {out.begin(), out.end()};
}

ExtRational oracle_distance(const GridModule& u, const GridModule& v, const OracleOptions& opts) {
  const auto candidates = oracle_candidates(u, v);
  auto feasible = [&](const Rational& e) { return interleaving_oracle(u, v, e, opts).has_value(); };
  if (!feasible(candidates.back())) return ExtRational::infinity();
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return ExtRational(candidates[lo]);
}

}  // namespace pm
