#pragma once

// Finite metric spaces (with +inf distances and zero distances between
// distinct points allowed), their discretized spacetime posets and world
// lines.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pm/rational.hpp"

namespace pm {

class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  /// Throws std::invalid_argument unless dist is square, symmetric, zero on
  /// the diagonal, nonnegative and satisfies the triangle inequality.
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<ExtRational>> dist);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  /// Throws std::out_of_range for an unknown label.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const;
  const ExtRational& distance(std::size_t i, std::size_t j) const { return dist_.at(i).at(j); }
  const ExtRational& distance(const std::string& a, const std::string& b) const {
    return distance(index_of(a), index_of(b));
  }
  const std::vector<std::vector<ExtRational>>& matrix() const { return dist_; }

  /// The subspace on the given points, in the given order.
  FiniteMetricSpace subspace(const std::vector<std::size_t>& points) const;

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<ExtRational>> dist_;
};

/// Thrown by map_spacetime when the point map expands some distance.
class NotLipschitz : public std::invalid_argument {
 public:
  NotLipschitz(std::size_t x, std::size_t y, const std::string& what)
      : std::invalid_argument(what), first(x), second(y) {}
  std::size_t first, second;
};

struct SpacetimePoint {
  std::size_t point = 0;
  Rational time{0};
  friend bool operator==(const SpacetimePoint&, const SpacetimePoint&) = default;
};

/// M x Gamma with (x,s) <= (y,t) iff d(x,y) <= t - s.
class SpacetimePoset {
 public:
  SpacetimePoset() = default;
  /// Gamma is sorted and deduplicated.
  SpacetimePoset(FiniteMetricSpace space, std::vector<Rational> grid);

  const FiniteMetricSpace& space() const { return space_; }
  const std::vector<Rational>& grid() const { return grid_; }
  std::size_t element_count() const { return space_.size() * grid_.size(); }
  SpacetimePoint element(std::size_t index) const;
  std::size_t index_of(const SpacetimePoint& p) const;

  /// Throws std::out_of_range for points outside the space.
  bool leq(const SpacetimePoint& a, const SpacetimePoint& b) const;

  friend bool operator==(const SpacetimePoset&, const SpacetimePoset&) = default;

 private:
  FiniteMetricSpace space_;
  std::vector<Rational> grid_;
};

/// order((x,s), (y,t)) by label.
bool order(const SpacetimePoset& p, const std::string& x, const Rational& s, const std::string& y, const Rational& t);

/// The grid plus t + d(a,x) and t - d(a,x) for every t in it, every a in
/// anchors and every x in queries (finite distances only).
std::vector<Rational> grid_closure(const std::vector<Rational>& grid, const FiniteMetricSpace& space,
                                   const std::vector<std::size_t>& anchors, const std::vector<std::size_t>& queries);

/// (x, s) -> (f(x), s) between spacetimes sharing a time grid.
struct SpacetimeMap {
  SpacetimePoset source;
  SpacetimePoset target;
  std::vector<std::size_t> point_map;

  SpacetimePoint operator()(const SpacetimePoint& p) const { return {point_map.at(p.point), p.time}; }
};

/// Throws NotLipschitz (with a witness pair) unless f is 1-Lipschitz, then
/// checks order preservation on all related pairs of M x Gamma.
SpacetimeMap map_spacetime(const std::vector<std::size_t>& f, const FiniteMetricSpace& m, const FiniteMetricSpace& n,
                           const std::vector<Rational>& grid);

/// g o f. Throws if the middle spaces differ.
SpacetimeMap compose_maps(const SpacetimeMap& f, const SpacetimeMap& g);

/// A step function s -> (value(s), s); before_first holds for s < grid[0].
class WorldLine {
 public:
  WorldLine() = default;
  /// values has one entry per grid cell.
  WorldLine(SpacetimePoset poset, std::size_t before_first, std::vector<std::size_t> values);

  const SpacetimePoset& poset() const { return poset_; }
  std::size_t before_first() const { return before_; }
  const std::vector<std::size_t>& values() const { return values_; }
  std::size_t value_at(const Rational& s) const;

  friend bool operator==(const WorldLine&, const WorldLine&) = default;

 private:
  SpacetimePoset poset_;
  std::size_t before_ = 0;
  std::vector<std::size_t> values_;
};

/// The constant world line at x. Throws for an unknown point.
WorldLine eta(const SpacetimePoset& poset, std::size_t x);
WorldLine eta(const SpacetimePoset& poset, const std::string& x);

/// Post-composition with a spacetime map.
WorldLine map_worldline(const SpacetimeMap& f, const WorldLine& w);

/// Least e >= 0 with d(w1(s), w2(s+e)) <= e and d(w2(s), w1(s+e)) <= e for all s.
/// Throws on poset mismatch.
ExtRational worldline_interleaving_distance(const WorldLine& w1, const WorldLine& w2);

}  // namespace pm
