#pragma once

// Pointwise Kan extensions of coherent systems along A -> M, computed over
// the continuous time axis, and the interpolation constructions built on them.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pm/coherent.hpp"

namespace pm {

enum class KanMode { Lan, Ran, Image };

/// "lan", "ran" or "image". Throws std::invalid_argument.
KanMode parse_kan_mode(const std::string& s);
std::string to_string(KanMode mode);

/// The extension of a coherent system on A to a metric space M containing A
/// (matched by labels). Values at (x, t) for x in M and any rational t are
/// computed exactly from the cofinal (Lan) or coinitial (Ran) elements of
/// each chain {a} x R, so no time grid is needed. For x in A the chosen
/// coordinates make the value equal to U_x(t) on the nose.
class KanExtension {
 public:
  /// Throws std::invalid_argument if the system is incoherent or A is not a
  /// subspace of M.
  KanExtension(CoherentSystem system, FiniteMetricSpace m, KanMode mode);
  ~KanExtension();
  KanExtension(KanExtension&&) noexcept;
  KanExtension& operator=(KanExtension&&) noexcept;

  const CoherentSystem& system() const;
  const FiniteMetricSpace& space() const;
  KanMode mode() const;

  std::size_t dim(std::size_t x, const Rational& t);
  /// The structure map (x, s) -> (y, t). Throws unless d(x, y) <= t - s.
  Matrix arrow(std::size_t x, const Rational& s, std::size_t y, const Rational& t);

  /// Times where the value at x can change.
  std::vector<Rational> critical_times(std::size_t x) const;
  /// t -> value at (x, t) as a grid module.
  GridModule module_at(std::size_t x);
  /// The extended coherent system on M.
  CoherentSystem extended();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// The extension of s to M in the given mode.
CoherentSystem extend(const CoherentSystem& s, const FiniteMetricSpace& m, KanMode mode = KanMode::Image);

/// A one-parameter family U_r, r in positions, joining two interleaved modules.
struct SegmentFamily {
  std::vector<Rational> positions;
  std::vector<std::string> labels;
  CoherentSystem system;  // on the positions with the line metric

  std::size_t index_of(const Rational& r) const;
  const GridModule& module(std::size_t i) const { return system.module(i); }
  /// U_{r_i} -> U_{r_j} T_{|r_j - r_i|}.
  ModuleMorphism morphism(std::size_t i, std::size_t j) const { return system.arrow(i, j); }
};

/// Requires (phi, psi) to be an e-interleaving between u0 and ue and every
/// sample to lie in [0, e]. Throws std::invalid_argument otherwise.
SegmentFamily segment_interpolation(const GridModule& u0, const GridModule& ue, const ModuleMorphism& phi,
                                    const ModuleMorphism& psi, const Rational& e, const std::vector<Rational>& samples,
                                    KanMode mode = KanMode::Image);

/// Equilateral space v0..v{n-1} at pairwise distance 2e.
FiniteMetricSpace equilateral_space(std::size_t n, const Rational& e);

/// phis[{i,j}] : U_i -> U_j T_{2e}.
using PairMorphisms = std::map<std::pair<std::size_t, std::size_t>, ModuleMorphism>;

struct StarResult {
  GridModule center;
  CoherentSystem extended;  // on v0..v{n-1} plus "center"
};

/// Value of the extension at a point at distance e from every vertex.
/// Throws std::invalid_argument if the system is incoherent.
StarResult star_interpolation(const std::vector<GridModule>& modules, const PairMorphisms& phis, const Rational& e,
                              KanMode mode = KanMode::Image);

enum class SimplexPlacement {
  /// d(w, w') = e (max_i (w - w')_i - min_i (w - w')_i), exact.
  Range,
  /// sqrt(2) e |w - w'|_2, exact when rational, otherwise rounded up to a
  /// multiple of 1 / precision.
  Euclidean,
};

struct SimplexOptions {
  KanMode mode = KanMode::Image;
  SimplexPlacement placement = SimplexPlacement::Range;
  std::int64_t precision = 1000;
};

/// Metric on the vertices v0.. (weights e_i) plus the query points q0...
/// Throws if weights are invalid or the rounded metric fails the triangle inequality.
FiniteMetricSpace simplex_space(std::size_t n, const Rational& e, const std::vector<std::vector<Rational>>& weights,
                                const SimplexOptions& opts = {});

std::vector<GridModule> simplex_interpolation(const std::vector<GridModule>& modules, const PairMorphisms& phis,
                                              const Rational& e, const std::vector<std::vector<Rational>>& weights,
                                              const SimplexOptions& opts = {});

}  // namespace pm
