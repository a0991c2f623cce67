#include "pm/spacetime.hpp"

#include <algorithm>
#include <set>

namespace pm {

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<ExtRational>> dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const std::size_t n = labels_.size();
  if (dist_.size() != n) throw std::invalid_argument("metric: distance table has wrong number of rows");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != n) throw std::invalid_argument("metric: duplicate point label");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_[i].size() != n) throw std::invalid_argument("metric: distance table is not square");
    if (dist_[i][i] != ExtRational(0)) throw std::invalid_argument("metric: nonzero self-distance at " + labels_[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist_[i][j] < ExtRational(0)) throw std::invalid_argument("metric: negative distance");
      if (dist_[i][j] != dist_[j][i]) {
        throw std::invalid_argument("metric: asymmetric distance between " + labels_[i] + " and " + labels_[j]);
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (dist_[i][k] > dist_[i][j] + dist_[j][k]) {
          throw std::invalid_argument("metric: triangle inequality fails for " + labels_[i] + ", " + labels_[j] +
                                      ", " + labels_[k]);
        }
      }
    }
  }
}

std::size_t FiniteMetricSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::out_of_range("unknown point '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool FiniteMetricSpace::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& points) const {
  std::vector<std::string> labels;
  std::vector<std::vector<ExtRational>> dist;
  for (auto i : points) {
    labels.push_back(label(i));
    dist.emplace_back();
    for (auto j : points) dist.back().push_back(distance(i, j));
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

SpacetimePoset::SpacetimePoset(FiniteMetricSpace space, std::vector<Rational> grid) : space_(std::move(space)) {
  std::set<Rational> g(grid.begin(), grid.end());
  grid_.assign(g.begin(), g.end());
}

SpacetimePoint SpacetimePoset::element(std::size_t index) const {
  return {index / grid_.size(), grid_.at(index % grid_.size())};
}

std::size_t SpacetimePoset::index_of(const SpacetimePoint& p) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), p.time);
  if (it == grid_.end() || *it != p.time) throw std::out_of_range("time not on the spacetime grid");
  if (p.point >= space_.size()) throw std::out_of_range("point outside the space");
  return p.point * grid_.size() + static_cast<std::size_t>(it - grid_.begin());
}

bool SpacetimePoset::leq(const SpacetimePoint& a, const SpacetimePoint& b) const {
  if (a.point >= space_.size() || b.point >= space_.size()) throw std::out_of_range("point outside the space");
  return space_.distance(a.point, b.point) <= ExtRational(b.time - a.time);
}

bool order(const SpacetimePoset& p, const std::string& x, const Rational& s, const std::string& y, const Rational& t) {
  return p.leq({p.space().index_of(x), s}, {p.space().index_of(y), t});
}

std::vector<Rational> grid_closure(const std::vector<Rational>& grid, const FiniteMetricSpace& space,
                                   const std::vector<std::size_t>& anchors, const std::vector<std::size_t>& queries) {
  std::set<Rational> out(grid.begin(), grid.end());
  for (const auto& t : grid) {
    for (auto a : anchors) {
      for (auto x : queries) {
        const auto& d = space.distance(a, x);
        if (d.is_infinite()) continue;
        out.insert(t + d.value());
        out.insert(t - d.value());
      }
    }
  }
  return {out.begin(), out.end()};
}

SpacetimeMap map_spacetime(const std::vector<std::size_t>& f, const FiniteMetricSpace& m, const FiniteMetricSpace& n,
                           const std::vector<Rational>& grid) {
  if (f.size() != m.size()) throw std::invalid_argument("map_spacetime: map is not defined on every point");
  for (auto y : f) {
    if (y >= n.size()) throw std::out_of_range("map_spacetime: image outside the target space");
  }
  for (std::size_t x = 0; x < m.size(); ++x) {
    for (std::size_t y = 0; y < m.size(); ++y) {
      if (n.distance(f[x], f[y]) > m.distance(x, y)) {
        throw NotLipschitz(x, y, "map is not 1-Lipschitz on (" + m.label(x) + ", " + m.label(y) + ")");
      }
    }
  }
  SpacetimeMap out{SpacetimePoset(m, grid), SpacetimePoset(n, grid), f};
  const auto& src = out.source;
  for (std::size_t i = 0; i < src.element_count(); ++i) {
    for (std::size_t j = 0; j < src.element_count(); ++j) {
      auto a = src.element(i), b = src.element(j);
      if (src.leq(a, b) && !out.target.leq(out(a), out(b))) {
        throw std::logic_error("map_spacetime: order not preserved");
      }
    }
  }
  return out;
}

SpacetimeMap compose_maps(const SpacetimeMap& f, const SpacetimeMap& g) {
  if (!(f.target == g.source)) throw std::invalid_argument("compose_maps: spacetimes do not match");
  std::vector<std::size_t> h;
  for (auto x : f.point_map) h.push_back(g.point_map[x]);
  return {f.source, g.target, std::move(h)};
}

WorldLine::WorldLine(SpacetimePoset poset, std::size_t before_first, std::vector<std::size_t> values)
    : poset_(std::move(poset)), before_(before_first), values_(std::move(values)) {
  if (values_.size() != poset_.grid().size()) throw std::invalid_argument("world line: one value per grid cell");
  const auto n = poset_.space().size();
  if (before_ >= n) throw std::out_of_range("world line: point outside the space");
  std::size_t prev = before_;
  for (auto v : values_) {
    if (v >= n) throw std::out_of_range("world line: point outside the space");
    // An instantaneous move is order preserving only within distance 0.
    if (poset_.space().distance(prev, v) != ExtRational(0)) {
      throw std::invalid_argument("world line: jump between points at positive distance");
    }
    prev = v;
  }
}

std::size_t WorldLine::value_at(const Rational& s) const {
  const auto& g = poset_.grid();
  auto it = std::upper_bound(g.begin(), g.end(), s);
  if (it == g.begin()) return before_;
  return values_[static_cast<std::size_t>(it - g.begin()) - 1];
}

WorldLine eta(const SpacetimePoset& poset, std::size_t x) {
  if (x >= poset.space().size()) throw std::out_of_range("eta: unknown point");
  return WorldLine(poset, x, std::vector<std::size_t>(poset.grid().size(), x));
}

WorldLine eta(const SpacetimePoset& poset, const std::string& x) { return eta(poset, poset.space().index_of(x)); }

WorldLine map_worldline(const SpacetimeMap& f, const WorldLine& w) {
  if (!(w.poset() == f.source)) throw std::invalid_argument("map_worldline: world line lives elsewhere");
  std::vector<std::size_t> values;
  for (auto v : w.values()) values.push_back(f.point_map[v]);
  return WorldLine(f.target, f.point_map[w.before_first()], std::move(values));
}

namespace {

// d(w1(s), w2(s + e)) <= e for all s. Both sides are constant between
// consecutive points of grid ∪ (grid - e), so one sample per piece suffices.
bool one_way(const WorldLine& w1, const WorldLine& w2, const Rational& e) {
  const auto& space = w1.poset().space();
  std::set<Rational> pts;
  for (const auto& g : w1.poset().grid()) {
    pts.insert(g);
    pts.insert(g - e);
  }
  std::vector<Rational> samples(pts.begin(), pts.end());
  if (!samples.empty()) samples.push_back(samples.front() - 1);
  if (samples.empty()) samples.push_back(Rational(0));
  for (const auto& s : samples) {
    if (space.distance(w1.value_at(s), w2.value_at(s + e)) > ExtRational(e)) return false;
  }
  return true;
}

}  // namespace

ExtRational worldline_interleaving_distance(const WorldLine& w1, const WorldLine& w2) {
  if (!(w1.poset() == w2.poset())) throw std::invalid_argument("worldline_interleaving_distance: poset mismatch");
  const auto& space = w1.poset().space();
  const auto& grid = w1.poset().grid();
  std::set<Rational> candidates{Rational(0)};
  for (std::size_t p = 0; p < space.size(); ++p) {
    for (std::size_t q = 0; q < space.size(); ++q) {
      const auto& d = space.distance(p, q);
      if (d.is_infinite()) continue;
      candidates.insert(d.value());
      for (const auto& gi : grid) {
        for (const auto& gj : grid) {
          if (d.value() - (gi - gj) >= 0) candidates.insert(d.value() - (gi - gj));
        }
      }
    }
  }
  for (const auto& gi : grid) {
    for (const auto& gj : grid) {
      if (gi > gj) candidates.insert(gi - gj);
    }
  }
  std::vector<Rational> c(candidates.begin(), candidates.end());
  auto feasible = [&](const Rational& e) { return one_way(w1, w2, e) && one_way(w2, w1, e); };
  if (!feasible(c.back())) return ExtRational::infinity();
  std::size_t lo = 0, hi = c.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(c[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return ExtRational(c[lo]);
}

}  // namespace pm
