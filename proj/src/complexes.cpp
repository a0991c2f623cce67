#include "pm/complexes.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pm {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certificate:
      return "certificate";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

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

struct SearchBudgetExhausted {};

// Exhaustive search for a coherent system at pairwise distance 2e.
//
// Every constraint is (Phi_jk T) Phi_ij = rhs with rhs either the shift map of
// U_i (pair, k = i) or (U_k sigma) Phi_ik (triangle). Splitting the vertices
// into S and T and leaving the morphisms S -> T unknown makes every
// constraint affine in the unknowns once the other morphisms are fixed: a
// product of two unknowns would need a morphism out of T into S.
class CoherentSearch {
 public:
  CoherentSearch(const std::vector<GridModule>& modules, const Rational& e, std::uint64_t budget)
      : mods_(modules), n_(modules.size()), p_(modules.front().prime()), shift_(2 * e), budget_(budget) {
    basis_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j) basis_[id(i, j)] = hom_basis(mods_[i], mods_[j], shift_);
      }
    }
    build_constraints();
    choose_split();
  }

  std::uint64_t nodes() const { return nodes_; }

  /// Coefficients of every Phi_ij, or nullopt after exhausting the search.
  /// Throws SearchBudgetExhausted.
  std::optional<std::vector<std::vector<Residue>>> run() {
    coef_.assign(n_ * n_, {});
    if (dfs(0)) return coef_;
    return std::nullopt;
  }

  ModuleMorphism morphism(std::size_t i, std::size_t j, const std::vector<Residue>& c) const {
    return combination(basis_[id(i, j)], c, mods_[i], mods_[j], shift_);
  }

 private:
  struct Bilinear {
    std::size_t first, second;  // edge ids; composite (second T) first
    std::vector<std::vector<Residue>> table;  // [a * dim(second) + b]
  };
  struct Constraint {
    std::vector<Residue> constant;  // minus the pair shift map, or empty
    Bilinear lhs;
    std::ptrdiff_t linear_edge = -1;  // triangle: Phi_ik
    std::vector<std::vector<Residue>> linear_table;
    std::size_t length = 0;
    std::vector<std::size_t> edges;
  };

  std::size_t id(std::size_t i, std::size_t j) const { return i * n_ + j; }
  std::size_t dim(std::size_t edge) const { return basis_[edge].size(); }

  void build_constraints() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i == j) continue;
        for (std::size_t k = 0; k < n_; ++k) {
          if (k == j) continue;
          Constraint c;
          c.lhs.first = id(i, j);
          c.lhs.second = id(j, k);
          for (const auto& a : basis_[c.lhs.first]) {
            for (const auto& b : basis_[c.lhs.second]) c.lhs.table.push_back(compose(a, b).flatten());
          }
          c.edges = {c.lhs.first, c.lhs.second};
          if (k == i) {
            c.constant = sigma(mods_[i], 2 * shift_).flatten();
            for (auto& x : c.constant) x = static_cast<Residue>((p_ - x) % p_);
          } else {
            c.linear_edge = static_cast<std::ptrdiff_t>(id(i, k));
            const auto s = sigma(mods_[k], shift_);
            for (const auto& a : basis_[id(i, k)]) c.linear_table.push_back(compose(a, s).flatten());
            c.edges.push_back(id(i, k));
          }
          c.length = ModuleMorphism::zero(mods_[i], mods_[k], 2 * shift_).flatten().size();
          constraints_.push_back(std::move(c));
        }
      }
    }
  }

  void choose_split() {
    std::size_t total = 0;
    for (std::size_t e = 0; e < n_ * n_; ++e) total += dim(e);
    std::size_t best = total + 1;
    std::uint64_t best_mask = 1;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n_); ++mask) {
      std::size_t unknown = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (((mask >> i) & 1) && !((mask >> j) & 1)) unknown += dim(id(i, j));
        }
      }
      if (total - unknown < best) {
        best = total - unknown;
        best_mask = mask;
      }
    }
    unknown_.assign(n_ * n_, false);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j && ((best_mask >> i) & 1) && !((best_mask >> j) & 1)) unknown_[id(i, j)] = true;
      }
    }
    // Enumerate the two directions of each pair together so pair constraints prune early.
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (!unknown_[id(i, j)]) order_.push_back(id(i, j));
        if (!unknown_[id(j, i)]) order_.push_back(id(j, i));
      }
    }
    std::vector<std::size_t> depth_of(n_ * n_, 0);
    for (std::size_t d = 0; d < order_.size(); ++d) depth_of[order_[d]] = d;
    check_at_.assign(order_.size(), {});
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
      const auto& edges = constraints_[c].edges;
      if (std::any_of(edges.begin(), edges.end(), [&](std::size_t e) { return unknown_[e]; })) {
        leaf_.push_back(c);
      } else {
        std::size_t d = 0;
        for (auto e : edges) d = std::max(d, depth_of[e]);
        check_at_[d].push_back(c);
      }
    }
  }

  void accumulate(std::vector<Residue>& acc, const std::vector<Residue>& v, std::uint64_t s) const {
    if (s % p_ == 0) return;
    for (std::size_t r = 0; r < acc.size(); ++r) acc[r] = static_cast<Residue>((acc[r] + s * v[r]) % p_);
  }

  // Affine form of a constraint in the unknown coefficients: constant part
  // and one column per unknown coefficient (in variable order).
  void affine(const Constraint& c, std::vector<Residue>& constant, std::vector<std::vector<Residue>>& columns) const {
    constant.assign(c.length, 0);
    if (!c.constant.empty()) constant = c.constant;
    const auto e1 = c.lhs.first, e2 = c.lhs.second;
    const std::size_t d2 = dim(e2);
    if (!unknown_[e1] && !unknown_[e2]) {
      for (std::size_t a = 0; a < dim(e1); ++a) {
        for (std::size_t b = 0; b < d2; ++b) accumulate(constant, c.lhs.table[a * d2 + b], coef_[e1][a] * coef_[e2][b]);
      }
    } else if (unknown_[e1]) {
      for (std::size_t a = 0; a < dim(e1); ++a) {
        std::vector<Residue> col(c.length, 0);
        for (std::size_t b = 0; b < d2; ++b) accumulate(col, c.lhs.table[a * d2 + b], coef_[e2][b]);
        add_column(columns, var_offset_[e1] + a, col);
      }
    } else {
      for (std::size_t b = 0; b < d2; ++b) {
        std::vector<Residue> col(c.length, 0);
        for (std::size_t a = 0; a < dim(e1); ++a) accumulate(col, c.lhs.table[a * d2 + b], coef_[e1][a]);
        add_column(columns, var_offset_[e2] + b, col);
      }
    }
    if (c.linear_edge >= 0) {
      const auto e = static_cast<std::size_t>(c.linear_edge);
      for (std::size_t a = 0; a < dim(e); ++a) {
        if (unknown_[e]) {
          std::vector<Residue> col(c.length, 0);
          accumulate(col, c.linear_table[a], p_ - 1);
          add_column(columns, var_offset_[e] + a, col);
        } else {
          accumulate(constant, c.linear_table[a], static_cast<std::uint64_t>(p_ - 1) * coef_[e][a]);
        }
      }
    }
  }

  void add_column(std::vector<std::vector<Residue>>& columns, std::size_t var, const std::vector<Residue>& col) const {
    auto& dst = columns[var];
    if (dst.empty()) dst.assign(col.size(), 0);
    for (std::size_t r = 0; r < col.size(); ++r) dst[r] = static_cast<Residue>((dst[r] + col[r]) % p_);
  }

  bool satisfied(std::size_t c) const {
    std::vector<Residue> constant;
    std::vector<std::vector<Residue>> none;
    affine(constraints_[c], constant, none);
    return std::all_of(constant.begin(), constant.end(), [](Residue r) { return r == 0; });
  }

  bool leaf() {
    var_offset_.assign(n_ * n_, 0);
    std::size_t vars = 0;
    for (std::size_t e = 0; e < n_ * n_; ++e) {
      if (unknown_[e]) {
        var_offset_[e] = vars;
        vars += dim(e);
      }
    }
    std::size_t rows = 0;
    for (auto c : leaf_) rows += constraints_[c].length;
    Matrix m(p_, rows, vars), rhs(p_, rows, 1);
    std::size_t r0 = 0;
    for (auto c : leaf_) {
      std::vector<Residue> constant;
      std::vector<std::vector<Residue>> columns(vars);
      affine(constraints_[c], constant, columns);
      for (std::size_t r = 0; r < constant.size(); ++r) {
        rhs.set(r0 + r, 0, (p_ - constant[r]) % p_);
        for (std::size_t v = 0; v < vars; ++v) {
          if (!columns[v].empty()) m.set(r0 + r, v, columns[v][r]);
        }
      }
      r0 += constraints_[c].length;
    }
    auto sol = solve(m, rhs);
    if (!sol) return false;
    for (std::size_t e = 0; e < n_ * n_; ++e) {
      if (!unknown_[e]) continue;
      coef_[e].assign(dim(e), 0);
      for (std::size_t a = 0; a < dim(e); ++a) coef_[e][a] = (*sol)(var_offset_[e] + a, 0);
    }
    return true;
  }

  bool dfs(std::size_t depth) {
    if (++nodes_ > budget_) throw SearchBudgetExhausted{};
    if (depth == order_.size()) return leaf();
    const auto e = order_[depth];
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < dim(e); ++k) total *= p_;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      coef_[e] = digits_of(idx, dim(e), p_);
      bool ok = true;
      for (auto c : check_at_[depth]) {
        if (!satisfied(c)) {
          ok = false;
          break;
        }
      }
      if (ok && dfs(depth + 1)) return true;
      if (nodes_ > budget_) throw SearchBudgetExhausted{};
    }
    return false;
  }

  const std::vector<GridModule>& mods_;
  std::size_t n_;
  std::uint32_t p_;
  Rational shift_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::vector<ModuleMorphism>> basis_;
  std::vector<Constraint> constraints_;
  std::vector<bool> unknown_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> check_at_;
  std::vector<std::size_t> leaf_;
  std::vector<std::size_t> var_offset_;
  std::vector<std::vector<Residue>> coef_;
};

CechCertificate certify(const std::vector<GridModule>& modules, const PairMorphisms& phis, const Rational& e,
                        KanMode mode) {
  CechCertificate cert;
  auto star = star_interpolation(modules, phis, e, mode);
  const std::size_t n = modules.size();
  CoherentSystem::MorphismMap map(phis.begin(), phis.end());
  cert.system = CoherentSystem(equilateral_space(n, e), modules, std::move(map));
  cert.center = star.center;
  for (std::size_t i = 0; i < n; ++i) {
    Interleaving il{star.extended.arrow(i, n), star.extended.arrow(n, i)};
    if (!verify_interleaving(il.phi, il.psi, e)) throw std::logic_error("center is not interleaved with a vertex");
    cert.center_interleavings.push_back(std::move(il));
  }
  return cert;
}

// Some U_k e-interleaved with every other module: compose through it.
std::optional<PairMorphisms> witness_system(const std::vector<GridModule>& modules, const Rational& e,
                                            const OracleOptions& oracle) {
  const std::size_t n = modules.size();
  for (std::size_t k = 0; k < n; ++k) {
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      if (j != k && interleaving_distance(modules[j], modules[k]) > ExtRational(e)) ok = false;
    }
    if (!ok) continue;
    std::vector<ModuleMorphism> to_center(n), from_center(n);
    for (std::size_t j = 0; j < n && ok; ++j) {
      if (j == k) {
        to_center[j] = from_center[j] = sigma(modules[k], e);
        continue;
      }
      try {
        auto il = interleaving_oracle(modules[j], modules[k], e, oracle);
        if (!il) {
          ok = false;
        } else {
          to_center[j] = il->phi;
          from_center[j] = il->psi;
        }
      } catch (const BudgetExceeded&) {
        ok = false;
      }
    }
    if (!ok) continue;
    PairMorphisms phis;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) phis.emplace(std::make_pair(i, j), compose(to_center[i], from_center[j]));
      }
    }
    return phis;
  }
  return std::nullopt;
}

CechResult membership_in_order(const std::vector<GridModule>& modules, const Rational& e, const CechOptions& opts) {
  CechResult out;
  const std::size_t n = modules.size();
  if (n == 0) throw std::invalid_argument("cech_membership: empty simplex");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto d = interleaving_distance(modules[i], modules[j]);
      if (d > ExtRational(2 * e)) {
        out.verdict = Verdict::Refuted;
        out.reason = "vertices " + std::to_string(i) + " and " + std::to_string(j) + " are at distance " +
                     to_string(d) + " > 2e";
        return out;
      }
    }
  }
  std::optional<PairMorphisms> phis;
  if (n == 1) phis = PairMorphisms{};
  if (!phis && opts.witness_shortcut) {
    phis = witness_system(modules, e, opts.oracle);
    if (phis) out.reason = "a vertex is a common witness";
  }
  if (!phis) {
    try {
      CoherentSearch search(modules, e, opts.budget);
      auto coef = search.run();
      out.nodes = search.nodes();
      if (!coef) {
        out.verdict = Verdict::Refuted;
        out.reason = "exhaustive search found no coherent system";
        return out;
      }
      phis = PairMorphisms{};
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) phis->emplace(std::make_pair(i, j), search.morphism(i, j, (*coef)[i * n + j]));
        }
      }
      out.reason = "coherent system found by search";
    } catch (const SearchBudgetExhausted&) {
      out.verdict = Verdict::Unknown;
      out.reason = "search budget exhausted";
      out.nodes = opts.budget;
      return out;
    }
  }
  out.verdict = Verdict::Certificate;
  out.certificate = certify(modules, *phis, e, opts.mode);
  if (!verify_coherent(out.certificate->system).coherent) throw std::logic_error("certificate system is not coherent");
  return out;
}

}  // namespace

CechResult cech_membership(const std::vector<GridModule>& modules, const Rational& e, const CechOptions& opts) {
  if (e < 0) throw std::invalid_argument("cech_membership: negative scale");
  if (opts.order.empty()) return membership_in_order(modules, e, opts);
  const std::size_t n = modules.size();
  std::vector<std::size_t> sorted = opts.order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(n);
  std::iota(iota.begin(), iota.end(), 0);
  if (sorted != iota) throw std::invalid_argument("cech_membership: order is not a permutation");
  std::vector<GridModule> permuted;
  for (auto k : opts.order) permuted.push_back(modules[k]);
  CechOptions inner = opts;
  inner.order.clear();
  auto res = membership_in_order(permuted, e, inner);
  if (res.certificate) {
    // Relabel back to the caller's vertex order.
    PairMorphisms phis;
    for (const auto& [key, phi] : res.certificate->system.morphisms()) {
      phis.emplace(std::make_pair(opts.order[key.first], opts.order[key.second]), phi);
    }
    res.certificate = certify(modules, phis, e, opts.mode);
  }
  return res;
}

bool ModuleComplex::contains(const Simplex& s) const {
  return std::find(simplices.begin(), simplices.end(), s) != simplices.end();
}

bool ModuleComplex::downward_closed() const {
  for (const auto& s : simplices) {
    if (s.size() < 2) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex face;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != drop) face.push_back(s[i]);
      }
      if (!contains(face)) return false;
    }
  }
  return true;
}

std::size_t default_max_dim(std::size_t n) { return n == 0 ? 0 : std::min<std::size_t>(n - 1, 3); }

namespace {

// All subsets of {0..n-1} of size 1..max_size, by size then lexicographically.
std::vector<Simplex> candidate_simplices(std::size_t n, std::size_t max_size) {
  std::vector<Simplex> out;
  for (std::size_t k = 1; k <= std::min(n, max_size); ++k) {
    Simplex s(k);
    std::iota(s.begin(), s.end(), 0);
    while (true) {
      out.push_back(s);
      std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k) - 1;
      while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + static_cast<std::size_t>(i)) --i;
      if (i < 0) break;
      ++s[static_cast<std::size_t>(i)];
      for (auto j = static_cast<std::size_t>(i) + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
  }
  return out;
}

bool facets_present(const ModuleComplex& c, const Simplex& s) {
  for (std::size_t drop = 0; drop < s.size(); ++drop) {
    Simplex face;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != drop) face.push_back(s[i]);
    }
    if (!c.contains(face)) return false;
  }
  return true;
}

}  // namespace

ModuleComplex rips_complex(const std::vector<GridModule>& modules, const Rational& e, std::optional<std::size_t> max_dim) {
  const std::size_t n = modules.size();
  const std::size_t md = max_dim.value_or(default_max_dim(n));
  std::vector<std::vector<char>> edge(n, std::vector<char>(n, 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      edge[i][j] = edge[j][i] = interleaving_distance(modules[i], modules[j]) <= ExtRational(e);
    }
  }
  ModuleComplex c;
  c.scale = e;
  for (const auto& s : candidate_simplices(n, md + 1)) {
    bool clique = true;
    for (std::size_t a = 0; a < s.size() && clique; ++a) {
      for (std::size_t b = a + 1; b < s.size() && clique; ++b) clique = edge[s[a]][s[b]];
    }
    if (clique) c.simplices.push_back(s);
  }
  return c;
}

ModuleComplex cech_complex(const std::vector<GridModule>& modules, const Rational& e, std::optional<std::size_t> max_dim,
                           const CechOptions& opts) {
  const std::size_t n = modules.size();
  const std::size_t md = max_dim.value_or(default_max_dim(n));
  ModuleComplex c;
  c.scale = e;
  for (const auto& s : candidate_simplices(n, md + 1)) {
    if (s.size() == 1) {
      c.simplices.push_back(s);
      continue;
    }
    if (!facets_present(c, s)) continue;
    std::vector<GridModule> verts;
    for (auto i : s) verts.push_back(modules[i]);
    auto res = cech_membership(verts, e, opts);
    if (res.verdict == Verdict::Certificate) {
      c.simplices.push_back(s);
      c.certificates.emplace(s, std::move(*res.certificate));
    } else if (res.verdict == Verdict::Unknown) {
      c.unknown.push_back(s);
    }
  }
  return c;
}

SandwichReport sandwich_check(const std::vector<GridModule>& modules, const Rational& e,
                              std::optional<std::size_t> max_dim, const CechOptions& opts) {
  SandwichReport r;
  r.cech_e = cech_complex(modules, e, max_dim, opts);
  r.rips_2e = rips_complex(modules, 2 * e, max_dim);
  r.cech_2e = cech_complex(modules, 2 * e, max_dim, opts);
  for (const auto& s : r.cech_e.simplices) {
    if (!r.rips_2e.contains(s)) r.cech_not_in_rips.push_back(s);
  }
  for (const auto& s : r.rips_2e.simplices) {
    if (!r.cech_2e.contains(s)) r.rips_not_in_cech.push_back(s);
  }
  return r;
}

}  // namespace pm
