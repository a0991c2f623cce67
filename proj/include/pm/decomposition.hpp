#pragma once

#include <cstddef>
#include <vector>

#include "pm/module.hpp"
#include "pm/rational.hpp"

namespace pm {

/// A half-open bar [birth, death).
struct Bar {
  Rational birth{0};
  ExtRational death;

  friend bool operator==(const Bar&, const Bar&) = default;
  friend bool operator<(const Bar& a, const Bar& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  }
};

struct DiagramPoint {
  Rational birth{0};
  ExtRational death;
  std::size_t mult = 1;

  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

/// Multiset of bars. Stored sorted with equal points merged, so == is
/// multiset equality.
class PersistenceDiagram {
 public:
  PersistenceDiagram() = default;
  /// Throws std::invalid_argument if some birth >= death or mult == 0.
  explicit PersistenceDiagram(std::vector<DiagramPoint> points);

  const std::vector<DiagramPoint>& points() const { return points_; }
  /// One Bar per unit of multiplicity.
  std::vector<Bar> bars() const;
  std::size_t total_multiplicity() const;
  bool empty() const { return points_.empty(); }

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;

 private:
  std::vector<DiagramPoint> points_;
};

/// r(i, j) = rank U(t_i -> t_j) for i <= j over the module's grid.
struct RankInvariant {
  std::vector<Rational> grid;
  std::vector<std::vector<std::size_t>> r;  // r[i][j - i]

  std::size_t at(std::size_t i, std::size_t j) const { return r[i][j - i]; }
  friend bool operator==(const RankInvariant&, const RankInvariant&) = default;
};

RankInvariant rank_invariant(const GridModule& u);

/// Interval decomposition by Möbius inversion of the rank invariant.
/// Throws std::logic_error if a multiplicity comes out negative.
PersistenceDiagram barcode(const GridModule& u);

/// Direct sum of interval modules realizing the diagram.
GridModule module_from_diagram(const PersistenceDiagram& dgm, std::uint32_t prime);

}  // namespace pm
