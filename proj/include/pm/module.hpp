#pragma once

// Persistence modules presented on a finite rational grid, shifted morphisms
// between them, and interleavings.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pm/linalg.hpp"
#include "pm/rational.hpp"

namespace pm {

/// A functor R -> Vect_p given by finite data. With grid t_1 < ... < t_k,
/// U(t) = 0 for t < t_1, U(t) = F_p^{d_i} on [t_i, t_{i+1}) and F_p^{d_k} for
/// t >= t_k. maps[i] : U(t_i) -> U(t_{i+1}); the internal map within a cell is
/// the identity.
class GridModule {
 public:
  GridModule() = default;
  /// Throws std::invalid_argument if the data is malformed.
  GridModule(std::uint32_t prime, std::vector<Rational> grid, std::vector<std::size_t> dims,
             std::vector<Matrix> maps);

  static GridModule zero(std::uint32_t prime) { return GridModule(prime, {}, {}, {}); }

  std::uint32_t prime() const { return prime_; }
  const std::vector<Rational>& grid() const { return grid_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<Matrix>& maps() const { return maps_; }
  std::size_t size() const { return grid_.size(); }
  bool is_zero_presentation() const { return grid_.empty(); }

  /// Index of the cell containing t, or -1 when t precedes the grid.
  std::ptrdiff_t cell_of(const Rational& t) const;
  std::size_t dim_at(const Rational& t) const;
  std::size_t cell_dim(std::ptrdiff_t cell) const { return cell < 0 ? 0 : dims_[static_cast<std::size_t>(cell)]; }

  /// Composite maps[j-1] ... maps[i] for cells i <= j (cell -1 is the zero space).
  Matrix cell_map(std::ptrdiff_t from, std::ptrdiff_t to) const;
  /// The structure map U(s <= t). Throws if s > t.
  Matrix map_between(const Rational& s, const Rational& t) const;

  friend bool operator==(const GridModule&, const GridModule&) = default;

 private:
  std::uint32_t prime_ = 2;
  std::vector<Rational> grid_;
  std::vector<std::size_t> dims_;
  std::vector<Matrix> maps_;
};

/// I[b, d) over F_p; d may be infinite. Throws if b >= d.
GridModule interval_module(std::uint32_t prime, const Rational& birth, const ExtRational& death);

/// U T_e, i.e. (U T_e)(a) = U(a + e). Any sign of e is accepted.
GridModule shift_module(const GridModule& u, const Rational& e);

/// Block-diagonal sum on the union grid. Throws on prime mismatch.
GridModule direct_sum(const GridModule& u, const GridModule& v);

/// Same module re-presented on a grid containing grid(u). Throws otherwise.
GridModule restrict_to_grid(const GridModule& u, const std::vector<Rational>& grid);

/// Drops grid points that carry no change: leading zero cells and cells
/// entered through an identity map of equal dimension.
GridModule compress(const GridModule& u);

/// Equal as functors R -> Vect (same dimensions and structure matrices at
/// every t), regardless of the presenting grids.
bool semantically_equal(const GridModule& u, const GridModule& v);

std::vector<Rational> merge_grids(const std::vector<Rational>& a, const std::vector<Rational>& b);

/// A morphism U -> V T_e, stored by its components on the refinement
/// grid(U) ∪ (grid(V) - e); the component at s is U(s) -> V(s + e).
class ModuleMorphism {
 public:
  using ComponentFn = std::function<Matrix(const Rational&)>;

  ModuleMorphism() = default;
  /// Components sampled from fn at each refinement point.
  ModuleMorphism(GridModule source, GridModule target, Rational shift, const ComponentFn& fn);
  /// Components given explicitly on the canonical refinement.
  ModuleMorphism(GridModule source, GridModule target, Rational shift, std::vector<Matrix> components);

  static std::vector<Rational> canonical_refinement(const GridModule& u, const GridModule& v,
                                                    const Rational& shift);
  static ModuleMorphism zero(const GridModule& u, const GridModule& v, const Rational& shift);

  const GridModule& source() const { return source_; }
  const GridModule& target() const { return target_; }
  const Rational& shift() const { return shift_; }
  const std::vector<Rational>& refinement() const { return refinement_; }
  const std::vector<Matrix>& components() const { return components_; }

  /// Component U(s) -> V(s + shift) at any real s.
  Matrix component_at(const Rational& s) const;

  /// All component entries concatenated in refinement order.
  std::vector<Residue> flatten() const;

  bool is_zero() const;

  ModuleMorphism operator+(const ModuleMorphism& other) const;
  ModuleMorphism scaled(Residue s) const;

 private:
  GridModule source_;
  GridModule target_;
  Rational shift_{0};
  std::vector<Rational> refinement_;
  std::vector<Matrix> components_;
};

/// Same shift, semantically equal endpoints and equal components everywhere.
bool morphisms_equal(const ModuleMorphism& a, const ModuleMorphism& b);

/// Canonical U -> U T_e with component U(s <= s + e). Throws if e < 0.
ModuleMorphism sigma(const GridModule& u, const Rational& e);
inline ModuleMorphism identity_morphism(const GridModule& u) { return sigma(u, Rational(0)); }

/// (psi T_e) o phi : U -> W T_{e+f} for phi : U -> V T_e and psi : V -> W T_f.
/// Throws std::invalid_argument if target(phi) and source(psi) differ.
ModuleMorphism compose(const ModuleMorphism& phi, const ModuleMorphism& psi);

/// All naturality squares commute and component shapes are right.
bool verify_morphism(const ModuleMorphism& phi);

/// Basis of Hom(U, V T_e).
std::vector<ModuleMorphism> hom_basis(const GridModule& u, const GridModule& v, const Rational& e);

/// Checks (psi T_e) phi = U sigma_{2e} and (phi T_e) psi = V sigma_{2e}.
/// Throws std::invalid_argument on shift or endpoint mismatch.
bool verify_interleaving(const ModuleMorphism& phi, const ModuleMorphism& psi, const Rational& e);

}  // namespace pm
