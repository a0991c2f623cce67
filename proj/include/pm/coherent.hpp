#pragma once

// Coherent systems of modules over a finite metric space, and the functors
// on the discretized spacetime that they present.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pm/linalg.hpp"
#include "pm/module.hpp"
#include "pm/spacetime.hpp"

namespace pm {

/// Modules U_a for a in A and morphisms Phi_ab : U_a -> U_b T_{d(a,b)} for
/// a != b at finite distance.
class CoherentSystem {
 public:
  using MorphismMap = std::map<std::pair<std::size_t, std::size_t>, ModuleMorphism>;

  CoherentSystem() = default;
  /// Checks shapes only (endpoints, shifts, one morphism per finite pair);
  /// coherence is checked by verify_coherent. Throws std::invalid_argument.
  CoherentSystem(FiniteMetricSpace space, std::vector<GridModule> modules, MorphismMap morphisms);

  const FiniteMetricSpace& space() const { return space_; }
  const std::vector<GridModule>& modules() const { return modules_; }
  const GridModule& module(std::size_t a) const { return modules_.at(a); }
  const MorphismMap& morphisms() const { return morphisms_; }
  std::uint32_t prime() const { return prime_; }

  /// Phi_ab, or the identity when a == b. Throws if d(a,b) is infinite.
  ModuleMorphism arrow(std::size_t a, std::size_t b) const;

 private:
  FiniteMetricSpace space_;
  std::vector<GridModule> modules_;
  MorphismMap morphisms_;
  std::uint32_t prime_ = 2;
};

/// U_a = V and Phi_ab = sigma(V, d(a,b)) for every pair.
CoherentSystem common_source_system(const FiniteMetricSpace& space, const GridModule& v);

struct CoherenceViolation {
  std::string kind;  // "morphism", "pair" or "triangle"
  std::vector<std::size_t> points;
  std::string message;
};

struct CoherenceReport {
  bool coherent = true;
  std::vector<CoherenceViolation> violations;
};

/// For all a != b != c (a == c allowed) at finite distances:
///   (Phi_bc T_{d(a,b)}) Phi_ab = (U_c sigma_delta T_{d(a,c)}) Phi_ac,
/// delta = d(a,b) + d(b,c) - d(a,c). With a == c this is the pair condition.
CoherenceReport verify_coherent(const CoherentSystem& s);

/// A functor on the thin poset A x Gamma, stored densely: a dimension per
/// element and a matrix for every related pair.
class SpacetimeFunctor {
 public:
  SpacetimeFunctor() = default;
  SpacetimeFunctor(SpacetimePoset poset, std::uint32_t prime, std::vector<std::size_t> dims,
                   std::map<std::pair<std::size_t, std::size_t>, Matrix> arrows);

  const SpacetimePoset& poset() const { return poset_; }
  std::uint32_t prime() const { return prime_; }
  std::size_t dim(std::size_t element) const { return dims_.at(element); }
  /// G(i <= j). Throws std::out_of_range if i and j are unrelated.
  const Matrix& arrow(std::size_t i, std::size_t j) const;
  /// Pairs i < j with nothing strictly between them, plus pairs inside an
  /// equivalence class (points at distance 0).
  const std::vector<std::pair<std::size_t, std::size_t>>& generating_pairs() const { return generating_; }

 private:
  SpacetimePoset poset_;
  std::uint32_t prime_ = 2;
  std::vector<std::size_t> dims_;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> arrows_;
  std::vector<std::pair<std::size_t, std::size_t>> generating_;
};

/// Path independence: G(j <= k) G(i <= j) = G(i <= k) for all related triples.
bool verify_functor(const SpacetimeFunctor& g);

/// G(a,t) = U_a(t) and G((a,s) <= (b,t)) = U_b(s + d(a,b) <= t) Phi_ab(s).
/// Throws if the system is incoherent or the grid misses a module critical value.
SpacetimeFunctor system_to_functor(const CoherentSystem& s, const std::vector<Rational>& grid);

/// The module t -> G(a,t) for every a.
std::vector<GridModule> theta(const SpacetimeFunctor& g);

/// Inverse of system_to_functor. Needs g + d(a,b) and g - d(a,b) on the grid
/// for every module critical value g; throws otherwise.
CoherentSystem functor_to_system(const SpacetimeFunctor& g);

/// A vector space given as a quotient (colimits) or a subspace (limits) of
/// the direct sum of G over some elements.
struct PointwisePresentation {
  std::size_t dim = 0;
  /// Colimit: dim x total surjection. Limit: total x dim inclusion.
  Matrix map;
  std::vector<std::size_t> elements;
  std::vector<std::size_t> offsets;
};

/// Colimit of G over {(a,s) <= (x,t)}; x is a label of m, and every point of
/// the functor's space must appear in m with the same distances.
PointwisePresentation lan_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                             const Rational& t);
/// Limit of G over {(x,t) <= (a,s)}.
PointwisePresentation ran_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                             const Rational& t);

struct ImagePresentation {
  std::size_t lan_dim = 0;
  std::size_t ran_dim = 0;
  /// The canonical map Lan -> Ran.
  Matrix comparison;
  /// Columns: a basis of its image, in Ran coordinates.
  Matrix basis;
  std::size_t dim() const { return basis.cols(); }
};

ImagePresentation image_extension_at(const SpacetimeFunctor& g, const FiniteMetricSpace& m, const std::string& x,
                                     const Rational& t);

}  // namespace pm
