#include "pm/coherent.hpp"

#include <algorithm>
#include <stdexcept>

namespace pm {

CoherentSystem::CoherentSystem(FiniteMetricSpace space, std::vector<GridModule> modules, MorphismMap morphisms)
    : space_(std::move(space)), modules_(std::move(modules)), morphisms_(std::move(morphisms)) {
  if (modules_.size() != space_.size()) throw std::invalid_argument("coherent system: one module per point required");
  if (!modules_.empty()) prime_ = modules_.front().prime();
  for (const auto& u : modules_) {
    if (u.prime() != prime_) throw std::invalid_argument("coherent system: modules over different primes");
  }
  for (const auto& [key, phi] : morphisms_) {
    const auto [a, b] = key;
    if (a >= space_.size() || b >= space_.size()) throw std::invalid_argument("coherent system: morphism index out of range");
    if (a == b) throw std::invalid_argument("coherent system: morphism from a point to itself");
    const auto& d = space_.distance(a, b);
    const std::string name = space_.label(a) + "->" + space_.label(b);
    if (d.is_infinite()) throw std::invalid_argument("coherent system: morphism " + name + " across infinite distance");
    if (phi.shift() != d.value()) throw std::invalid_argument("coherent system: morphism " + name + " has the wrong shift");
    if (!semantically_equal(phi.source(), modules_[a]) || !semantically_equal(phi.target(), modules_[b])) {
      throw std::invalid_argument("coherent system: morphism " + name + " has the wrong endpoints");
    }
  }
  for (std::size_t a = 0; a < space_.size(); ++a) {
    for (std::size_t b = 0; b < space_.size(); ++b) {
      if (a != b && space_.distance(a, b).is_finite() && !morphisms_.count({a, b})) {
        throw std::invalid_argument("coherent system: missing morphism " + space_.label(a) + "->" + space_.label(b));
      }
    }
  }
}

ModuleMorphism CoherentSystem::arrow(std::size_t a, std::size_t b) const {
  if (a == b) return identity_morphism(modules_.at(a));
  auto it = morphisms_.find({a, b});
  if (it == morphisms_.end()) throw std::out_of_range("no morphism between points at infinite distance");
  return it->second;
}

CoherentSystem common_source_system(const FiniteMetricSpace& space, const GridModule& v) {
  CoherentSystem::MorphismMap phis;
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (std::size_t b = 0; b < space.size(); ++b) {
      const auto& d = space.distance(a, b);
      if (a != b && d.is_finite()) phis.emplace(std::make_pair(a, b), sigma(v, d.value()));
    }
  }
  return CoherentSystem(space, std::vector<GridModule>(space.size(), v), std::move(phis));
}

CoherenceReport verify_coherent(const CoherentSystem& s) {
  CoherenceReport report;
  const auto& sp = s.space();
  auto fail = [&](std::string kind, std::vector<std::size_t> pts, std::string msg) {
    report.coherent = false;
    report.violations.push_back({std::move(kind), std::move(pts), std::move(msg)});
  };
  for (const auto& [key, phi] : s.morphisms()) {
    if (!verify_morphism(phi)) {
      fail("morphism", {key.first, key.second}, "Phi_" + sp.label(key.first) + "," + sp.label(key.second) +
                                                     " is not natural");
    }
  }
  const std::size_t n = sp.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || sp.distance(a, b).is_infinite()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == b || sp.distance(b, c).is_infinite()) continue;
        const Rational delta = sp.distance(a, b).value() + sp.distance(b, c).value() - sp.distance(a, c).value();
        const auto lhs = compose(s.arrow(a, b), s.arrow(b, c));
        const auto rhs = compose(s.arrow(a, c), sigma(s.module(c), delta));
        if (!morphisms_equal(lhs, rhs)) {
          if (a == c) {
            fail("pair", {a, b}, "Phi_" + sp.label(b) + "," + sp.label(a) + " after Phi_" + sp.label(a) + "," +
                                     sp.label(b) + " is not the shift map of " + sp.label(a));
          } else {
            fail("triangle", {a, b, c}, "Phi_" + sp.label(b) + "," + sp.label(c) + " after Phi_" + sp.label(a) + "," +
                                            sp.label(b) + " differs from Phi_" + sp.label(a) + "," + sp.label(c) +
                                            " followed by the shift map");
          }
        }
      }
    }
  }
  return report;
}

SpacetimeFunctor::SpacetimeFunctor(SpacetimePoset poset, std::uint32_t prime, std::vector<std::size_t> dims,
                                   std::map<std::pair<std::size_t, std::size_t>, Matrix> arrows)
    : poset_(std::move(poset)), prime_(prime), dims_(std::move(dims)), arrows_(std::move(arrows)) {
  const std::size_t n = poset_.element_count();
  if (dims_.size() != n) throw std::invalid_argument("spacetime functor: one dimension per element required");
  std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rel[i][j] = poset_.leq(poset_.element(i), poset_.element(j));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!rel[i][j]) continue;
      auto it = arrows_.find({i, j});
      if (it == arrows_.end()) throw std::invalid_argument("spacetime functor: missing arrow");
      if (it->second.rows() != dims_[j] || it->second.cols() != dims_[i]) {
        throw std::invalid_argument("spacetime functor: arrow has the wrong shape");
      }
      if (i == j) continue;
      bool generating = true;
      if (!rel[j][i]) {
        for (std::size_t k = 0; k < n && generating; ++k) {
          if (rel[i][k] && rel[k][j] && !rel[k][i] && !rel[j][k]) generating = false;
        }
      }
      if (generating) generating_.emplace_back(i, j);
    }
  }
}

const Matrix& SpacetimeFunctor::arrow(std::size_t i, std::size_t j) const {
  auto it = arrows_.find({i, j});
  if (it == arrows_.end()) throw std::out_of_range("spacetime functor: elements are not related");
  return it->second;
}

bool verify_functor(const SpacetimeFunctor& g) {
  const auto& p = g.poset();
  const std::size_t n = p.element_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(g.arrow(i, i) == Matrix::identity(g.prime(), g.dim(i)))) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!p.leq(p.element(i), p.element(j))) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (!p.leq(p.element(j), p.element(k))) continue;
        if (!(g.arrow(j, k) * g.arrow(i, j) == g.arrow(i, k))) return false;
      }
    }
  }
  return true;
}

SpacetimeFunctor system_to_functor(const CoherentSystem& s, const std::vector<Rational>& grid) {
  const auto report = verify_coherent(s);
  if (!report.coherent) throw std::invalid_argument("system_to_functor: " + report.violations.front().message);
  SpacetimePoset poset(s.space(), grid);
  for (const auto& u : s.modules()) {
    for (const auto& t : u.grid()) {
      if (!std::binary_search(poset.grid().begin(), poset.grid().end(), t)) {
        throw std::invalid_argument("system_to_functor: grid misses critical value " + to_string(t));
      }
    }
  }
  const std::size_t n = poset.element_count();
  std::vector<std::size_t> dims(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto e = poset.element(i);
    dims[i] = s.module(e.point).dim_at(e.time);
  }
  std::map<std::pair<std::size_t, std::size_t>, ModuleMorphism> arrows_ab;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> arrows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = poset.element(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto y = poset.element(j);
      if (!poset.leq(x, y)) continue;
      const Rational d = s.space().distance(x.point, y.point).value();
      auto key = std::make_pair(x.point, y.point);
      auto it = arrows_ab.find(key);
      if (it == arrows_ab.end()) it = arrows_ab.emplace(key, s.arrow(x.point, y.point)).first;
      arrows.emplace(std::make_pair(i, j),
                     s.module(y.point).map_between(x.time + d, y.time) * it->second.component_at(x.time));
    }
  }
  return SpacetimeFunctor(std::move(poset), s.prime(), std::move(dims), std::move(arrows));
}

namespace {

std::size_t element_index(const SpacetimePoset& p, std::size_t point, std::size_t cell) {
  return point * p.grid().size() + cell;
}

}  // namespace

std::vector<GridModule> theta(const SpacetimeFunctor& g) {
  const auto& p = g.poset();
  const auto& grid = p.grid();
  std::vector<GridModule> out;
  for (std::size_t a = 0; a < p.space().size(); ++a) {
    std::vector<std::size_t> dims;
    std::vector<Matrix> maps;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      dims.push_back(g.dim(element_index(p, a, c)));
      if (c > 0) maps.push_back(g.arrow(element_index(p, a, c - 1), element_index(p, a, c)));
    }
    out.push_back(compress(GridModule(g.prime(), grid, std::move(dims), std::move(maps))));
  }
  return out;
}

CoherentSystem functor_to_system(const SpacetimeFunctor& g) {
  const auto& p = g.poset();
  const auto& grid = p.grid();
  const auto& space = p.space();
  auto modules = theta(g);
  auto on_grid = [&](const Rational& t) { return std::binary_search(grid.begin(), grid.end(), t); };
  auto cell = [&](const Rational& t) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
  };
  CoherentSystem::MorphismMap phis;
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (std::size_t b = 0; b < space.size(); ++b) {
      if (a == b || space.distance(a, b).is_infinite()) continue;
      const Rational d = space.distance(a, b).value();
      auto fn = [&](const Rational& s) -> Matrix {
        const std::size_t target_dim = modules[b].dim_at(s + d);
        if (grid.empty() || s < grid.front()) return Matrix::zeros(g.prime(), target_dim, 0);
        if (!on_grid(s) || !on_grid(s + d)) {
          throw std::invalid_argument("functor_to_system: grid is not closed under the distance " + to_string(d));
        }
        return g.arrow(element_index(p, a, cell(s)), element_index(p, b, cell(s + d)));
      };
      phis.emplace(std::make_pair(a, b), ModuleMorphism(modules[a], modules[b], d, fn));
    }
  }
  return CoherentSystem(space, std::move(modules), std::move(phis));
}

namespace {

struct Embedding {
  std::vector<ExtRational> to_query;  // d(a, x) for each point a of the functor's space
};

Embedding embed(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x) {
  const auto& a_space = g.poset().space();
  std::vector<std::size_t> idx;
  for (const auto& l : a_space.labels()) idx.push_back(m.index_of(l));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (m.distance(idx[i], idx[j]) != a_space.distance(i, j)) {
        throw std::invalid_argument("the functor's space is not a subspace of the query space");
      }
    }
  }
  const std::size_t xi = m.index_of(x);
  Embedding e;
  for (auto i : idx) e.to_query.push_back(m.distance(i, xi));
  return e;
}

void finish_offsets(const SpacetimeFunctor& g, PointwisePresentation& out, std::size_t& total) {
  total = 0;
  for (auto el : out.elements) {
    out.offsets.push_back(total);
    total += g.dim(el);
  }
}

}  // namespace

PointwisePresentation lan_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                             const Rational& t) {
  const auto& p = g.poset();
  const auto& grid = p.grid();
  const auto emb = embed(g, m, x);
  PointwisePresentation out;
  for (std::size_t a = 0; a < emb.to_query.size(); ++a) {
    const auto& d = emb.to_query[a];
    if (d.is_infinite()) continue;
    const Rational top = t - d.value();
    if (!grid.empty() && top >= grid.front() && top <= grid.back() && !std::binary_search(grid.begin(), grid.end(), top)) {
      throw std::invalid_argument("lan_at: grid is not closed for the query (missing " + to_string(top) + ")");
    }
  }
  for (std::size_t i = 0; i < p.element_count(); ++i) {
    const auto el = p.element(i);
    const auto& d = emb.to_query[el.point];
    if (d.is_finite() && el.time + d.value() <= t) out.elements.push_back(i);
  }
  std::size_t total = 0;
  finish_offsets(g, out, total);
  auto pos = [&](std::size_t el) -> std::ptrdiff_t {
    auto it = std::lower_bound(out.elements.begin(), out.elements.end(), el);
    if (it == out.elements.end() || *it != el) return -1;
    return it - out.elements.begin();
  };
  // Relations: for each generating arrow i -> j inside the down-set, G(i->j) v - v.
  std::vector<Matrix> columns;
  for (const auto& [i, j] : g.generating_pairs()) {
    auto pi = pos(i), pj = pos(j);
    if (pi < 0 || pj < 0 || g.dim(i) == 0) continue;
    Matrix block(g.prime(), total, g.dim(i));
    block.set_block(out.offsets[static_cast<std::size_t>(pj)], 0, g.arrow(i, j));
    block.set_block(out.offsets[static_cast<std::size_t>(pi)], 0, Matrix::identity(g.prime(), g.dim(i)).negated());
    columns.push_back(std::move(block));
  }
  Matrix rel(g.prime(), total, 0);
  for (const auto& c : columns) rel = hstack(rel, c);
  auto coker = cokernel_presentation(rel);
  out.dim = coker.dim;
  out.map = std::move(coker.proj);
  return out;
}

PointwisePresentation ran_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                             const Rational& t) {
  const auto& p = g.poset();
  const auto& grid = p.grid();
  const auto emb = embed(g, m, x);
  PointwisePresentation out;
  for (std::size_t a = 0; a < emb.to_query.size(); ++a) {
    const auto& d = emb.to_query[a];
    if (d.is_infinite()) continue;
    if (!std::binary_search(grid.begin(), grid.end(), t + d.value())) {
      throw std::invalid_argument("ran_at: grid is not closed for the query (missing " + to_string(t + d.value()) + ")");
    }
  }
  for (std::size_t i = 0; i < p.element_count(); ++i) {
    const auto el = p.element(i);
    const auto& d = emb.to_query[el.point];
    if (d.is_finite() && t + d.value() <= el.time) out.elements.push_back(i);
  }
  std::size_t total = 0;
  finish_offsets(g, out, total);
  auto pos = [&](std::size_t el) -> std::ptrdiff_t {
    auto it = std::lower_bound(out.elements.begin(), out.elements.end(), el);
    if (it == out.elements.end() || *it != el) return -1;
    return it - out.elements.begin();
  };
  // Constraints: G(i->j) v_i = v_j for each generating arrow inside the up-set.
  Matrix cons(g.prime(), 0, total);
  for (const auto& [i, j] : g.generating_pairs()) {
    auto pi = pos(i), pj = pos(j);
    if (pi < 0 || pj < 0 || g.dim(j) == 0) continue;
    Matrix block(g.prime(), g.dim(j), total);
    block.set_block(0, out.offsets[static_cast<std::size_t>(pi)], g.arrow(i, j));
    block.set_block(0, out.offsets[static_cast<std::size_t>(pj)], Matrix::identity(g.prime(), g.dim(j)).negated());
    cons = vstack(cons, block);
  }
  out.map = kernel_basis(cons);
  out.dim = out.map.cols();
  return out;
}

ImagePresentation image_extension_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                                     const Rational& t) {
  const auto lan = lan_at(g, m, x, t);
  const auto ran = ran_at(g, m, x, t);
  const std::size_t lan_total = lan.map.cols();
  const std::size_t ran_total = ran.map.rows();
  Matrix k(g.prime(), ran_total, lan_total);
  for (std::size_t di = 0; di < lan.elements.size(); ++di) {
    for (std::size_t ui = 0; ui < ran.elements.size(); ++ui) {
      k.set_block(ran.offsets[ui], lan.offsets[di], g.arrow(lan.elements[di], ran.elements[ui]));
    }
  }
  auto k_in_ran = solve(ran.map, k);
  if (!k_in_ran) throw std::logic_error("image_extension_at: cocone does not land in the limit");
  ImagePresentation out;
  out.lan_dim = lan.dim;
  out.ran_dim = ran.dim;
  out.comparison = induced_map_on_quotients(lan.map, *k_in_ran, Matrix::identity(g.prime(), ran.dim));
  out.basis = image_basis(out.comparison);
  return out;
}

}  // namespace pm
