#include "pm/module.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pm {

GridModule::GridModule(std::uint32_t prime, std::vector<Rational> grid, std::vector<std::size_t> dims,
                       std::vector<Matrix> maps)
    : prime_(prime), grid_(std::move(grid)), dims_(std::move(dims)), maps_(std::move(maps)) {
  if (!is_prime(prime_)) throw std::invalid_argument("module prime " + std::to_string(prime_) + " is not prime");
  if (dims_.size() != grid_.size()) throw std::invalid_argument("module dims length differs from grid length");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i - 1] < grid_[i])) throw std::invalid_argument("module grid is not strictly increasing");
  }
  const std::size_t expected = grid_.empty() ? 0 : grid_.size() - 1;
  if (maps_.size() != expected) {
    throw std::invalid_argument("module has " + std::to_string(maps_.size()) + " maps, expected " +
                                std::to_string(expected));
  }
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& m = maps_[i];
    if (m.prime() != prime_) throw std::invalid_argument("module map over a different prime");
    if (m.rows() != dims_[i + 1] || m.cols() != dims_[i]) {
      throw std::invalid_argument("module map " + std::to_string(i) + " has shape " + std::to_string(m.rows()) +
                                  "x" + std::to_string(m.cols()) + ", expected " + std::to_string(dims_[i + 1]) +
                                  "x" + std::to_string(dims_[i]));
    }
  }
}

std::ptrdiff_t GridModule::cell_of(const Rational& t) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  return static_cast<std::ptrdiff_t>(it - grid_.begin()) - 1;
}

std::size_t GridModule::dim_at(const Rational& t) const { return cell_dim(cell_of(t)); }

Matrix GridModule::cell_map(std::ptrdiff_t from, std::ptrdiff_t to) const {
  if (from > to) throw std::invalid_argument("cell_map: decreasing cells");
  if (from < 0) return Matrix::zeros(prime_, cell_dim(to), 0);
  Matrix acc = Matrix::identity(prime_, dims_[static_cast<std::size_t>(from)]);
  for (auto i = from; i < to; ++i) acc = maps_[static_cast<std::size_t>(i)] * acc;
  return acc;
}

Matrix GridModule::map_between(const Rational& s, const Rational& t) const {
  if (t < s) throw std::invalid_argument("map_between: s > t");
  return cell_map(cell_of(s), cell_of(t));
}

GridModule interval_module(std::uint32_t prime, const Rational& birth, const ExtRational& death) {
  if (death <= ExtRational(birth)) throw std::invalid_argument("interval_module requires birth < death");
  if (death.is_infinite()) return GridModule(prime, {birth}, {1}, {});
  return GridModule(prime, {birth, death.value()}, {1, 0}, {Matrix::zeros(prime, 0, 1)});
}

GridModule shift_module(const GridModule& u, const Rational& e) {
  std::vector<Rational> grid = u.grid();
  for (auto& t : grid) t -= e;
  return GridModule(u.prime(), std::move(grid), u.dims(), u.maps());
}

std::vector<Rational> merge_grids(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GridModule restrict_to_grid(const GridModule& u, const std::vector<Rational>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("restrict_to_grid: grid not strictly increasing");
  }
  for (const auto& t : u.grid()) {
    if (!std::binary_search(grid.begin(), grid.end(), t)) {
      throw std::invalid_argument("restrict_to_grid: target grid misses critical value " + to_string(t));
    }
  }
  std::vector<std::size_t> dims;
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dims.push_back(u.dim_at(grid[i]));
    if (i > 0) maps.push_back(u.map_between(grid[i - 1], grid[i]));
  }
  return GridModule(u.prime(), grid, std::move(dims), std::move(maps));
}

GridModule direct_sum(const GridModule& u, const GridModule& v) {
  if (u.prime() != v.prime()) throw std::invalid_argument("direct_sum: prime mismatch");
  auto grid = merge_grids(u.grid(), v.grid());
  auto ur = restrict_to_grid(u, grid);
  auto vr = restrict_to_grid(v, grid);
  std::vector<std::size_t> dims;
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dims.push_back(ur.dims()[i] + vr.dims()[i]);
    if (i > 0) {
      std::vector<Matrix> blocks{ur.maps()[i - 1], vr.maps()[i - 1]};
      maps.push_back(block_diagonal(blocks));
    }
  }
  return GridModule(u.prime(), std::move(grid), std::move(dims), std::move(maps));
}

GridModule compress(const GridModule& u) {
  std::vector<std::ptrdiff_t> kept;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto cell = static_cast<std::ptrdiff_t>(i);
    if (kept.empty()) {
      if (u.dims()[i] != 0) kept.push_back(cell);
      continue;
    }
    const auto last = kept.back();
    if (u.cell_dim(last) == u.dims()[i] && u.cell_map(last, cell) == Matrix::identity(u.prime(), u.dims()[i])) {
      continue;
    }
    kept.push_back(cell);
  }
  std::vector<Rational> grid;
  std::vector<std::size_t> dims;
  std::vector<Matrix> maps;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    grid.push_back(u.grid()[static_cast<std::size_t>(kept[j])]);
    dims.push_back(u.cell_dim(kept[j]));
    if (j > 0) maps.push_back(u.cell_map(kept[j - 1], kept[j]));
  }
  return GridModule(u.prime(), std::move(grid), std::move(dims), std::move(maps));
}

bool semantically_equal(const GridModule& u, const GridModule& v) {
  if (u.prime() != v.prime()) return false;
  auto grid = merge_grids(u.grid(), v.grid());
  return restrict_to_grid(u, grid) == restrict_to_grid(v, grid);
}

// ---------------------------------------------------------------------------

std::vector<Rational> ModuleMorphism::canonical_refinement(const GridModule& u, const GridModule& v,
                                                           const Rational& shift) {
  return merge_grids(u.grid(), shift_module(v, shift).grid());
}

ModuleMorphism::ModuleMorphism(GridModule source, GridModule target, Rational shift, const ComponentFn& fn)
    : source_(std::move(source)), target_(std::move(target)), shift_(shift) {
  if (source_.prime() != target_.prime()) throw std::invalid_argument("morphism between modules over different primes");
  refinement_ = canonical_refinement(source_, target_, shift_);
  components_.reserve(refinement_.size());
  for (const auto& s : refinement_) {
    Matrix c = fn(s);
    if (c.rows() != target_.dim_at(s + shift_) || c.cols() != source_.dim_at(s)) {
      throw std::invalid_argument("morphism component at " + to_string(s) + " has wrong shape");
    }
    components_.push_back(std::move(c));
  }
}

ModuleMorphism::ModuleMorphism(GridModule source, GridModule target, Rational shift, std::vector<Matrix> components)
    : source_(std::move(source)), target_(std::move(target)), shift_(shift), components_(std::move(components)) {
  if (source_.prime() != target_.prime()) throw std::invalid_argument("morphism between modules over different primes");
  refinement_ = canonical_refinement(source_, target_, shift_);
  if (components_.size() != refinement_.size()) {
    throw std::invalid_argument("morphism needs one component per refinement cell");
  }
  for (std::size_t i = 0; i < refinement_.size(); ++i) {
    const auto& s = refinement_[i];
    if (components_[i].rows() != target_.dim_at(s + shift_) || components_[i].cols() != source_.dim_at(s)) {
      throw std::invalid_argument("morphism component at " + to_string(s) + " has wrong shape");
    }
  }
}

ModuleMorphism ModuleMorphism::zero(const GridModule& u, const GridModule& v, const Rational& shift) {
  return ModuleMorphism(u, v, shift, [&](const Rational& s) {
    return Matrix::zeros(u.prime(), v.dim_at(s + shift), u.dim_at(s));
  });
}

Matrix ModuleMorphism::component_at(const Rational& s) const {
  auto it = std::upper_bound(refinement_.begin(), refinement_.end(), s);
  if (it == refinement_.begin()) return Matrix::zeros(source_.prime(), target_.dim_at(s + shift_), 0);
  return components_[static_cast<std::size_t>(it - refinement_.begin()) - 1];
}

std::vector<Residue> ModuleMorphism::flatten() const {
  std::vector<Residue> out;
  for (const auto& c : components_) out.insert(out.end(), c.entries().begin(), c.entries().end());
  return out;
}

bool ModuleMorphism::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](const Matrix& m) { return m.is_zero(); });
}

ModuleMorphism ModuleMorphism::operator+(const ModuleMorphism& other) const {
  if (!(source_ == other.source_) || !(target_ == other.target_) || shift_ != other.shift_) {
    throw std::invalid_argument("adding morphisms with different endpoints");
  }
  ModuleMorphism out = *this;
  for (std::size_t i = 0; i < components_.size(); ++i) out.components_[i].add_scaled(other.components_[i], 1);
  return out;
}

ModuleMorphism ModuleMorphism::scaled(Residue s) const {
  ModuleMorphism out = *this;
  for (auto& c : out.components_) c = c.scaled(s);
  return out;
}

bool morphisms_equal(const ModuleMorphism& a, const ModuleMorphism& b) {
  if (a.shift() != b.shift()) return false;
  if (!semantically_equal(a.source(), b.source()) || !semantically_equal(a.target(), b.target())) return false;
  for (const auto& s : merge_grids(a.refinement(), b.refinement())) {
    if (!(a.component_at(s) == b.component_at(s))) return false;
  }
  return true;
}

ModuleMorphism sigma(const GridModule& u, const Rational& e) {
  if (e < 0) throw std::invalid_argument("sigma requires e >= 0");
  return ModuleMorphism(u, u, e, [&](const Rational& s) { return u.map_between(s, s + e); });
}

ModuleMorphism compose(const ModuleMorphism& phi, const ModuleMorphism& psi) {
  if (!semantically_equal(phi.target(), psi.source())) {
    throw std::invalid_argument("compose: target of the first morphism is not the source of the second");
  }
  const Rational e = phi.shift();
  return ModuleMorphism(phi.source(), psi.target(), e + psi.shift(), [&](const Rational& s) {
    return psi.component_at(s + e) * phi.component_at(s);
  });
}

bool verify_morphism(const ModuleMorphism& phi) {
  const auto& u = phi.source();
  const auto& v = phi.target();
  const auto& r = phi.refinement();
  const Rational e = phi.shift();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    Matrix lhs = phi.components()[i + 1] * u.map_between(r[i], r[i + 1]);
    Matrix rhs = v.map_between(r[i] + e, r[i + 1] + e) * phi.components()[i];
    if (!(lhs == rhs)) return false;
  }
  return true;
}

std::vector<ModuleMorphism> hom_basis(const GridModule& u, const GridModule& v, const Rational& e) {
  if (u.prime() != v.prime()) throw std::invalid_argument("hom_basis: prime mismatch");
  const std::uint32_t p = u.prime();
  const auto refinement = ModuleMorphism::canonical_refinement(u, v, e);
  const std::size_t n = refinement.size();
  std::vector<std::size_t> du(n), dv(n), offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    du[i] = u.dim_at(refinement[i]);
    dv[i] = v.dim_at(refinement[i] + e);
    offset[i + 1] = offset[i] + du[i] * dv[i];
  }
  const std::size_t vars = offset[n];

  // One row per entry of comp[i+1] A_i - B_i comp[i].
  std::vector<std::vector<Residue>> rows;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Matrix a = u.map_between(refinement[i], refinement[i + 1]);
    Matrix b = v.map_between(refinement[i] + e, refinement[i + 1] + e);
    for (std::size_t r = 0; r < dv[i + 1]; ++r) {
      for (std::size_t c = 0; c < du[i]; ++c) {
        std::vector<Residue> row(vars, 0);
        for (std::size_t k = 0; k < du[i + 1]; ++k) {
          auto& x = row[offset[i + 1] + r * du[i + 1] + k];
          x = (x + a(k, c)) % p;
        }
        for (std::size_t k = 0; k < dv[i]; ++k) {
          auto& x = row[offset[i] + k * du[i] + c];
          x = (x + (p - b(r, k)) % p) % p;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  std::vector<Residue> flat;
  for (auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  Matrix system(p, rows.size(), vars, std::move(flat));
  Matrix kernel = kernel_basis(system);

  std::vector<ModuleMorphism> basis;
  for (std::size_t k = 0; k < kernel.cols(); ++k) {
    std::vector<Matrix> comps;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix c(p, dv[i], du[i]);
      for (std::size_t r = 0; r < dv[i]; ++r) {
        for (std::size_t cc = 0; cc < du[i]; ++cc) c.set(r, cc, kernel(offset[i] + r * du[i] + cc, k));
      }
      comps.push_back(std::move(c));
    }
    basis.emplace_back(u, v, e, std::move(comps));
  }
  return basis;
}

bool verify_interleaving(const ModuleMorphism& phi, const ModuleMorphism& psi, const Rational& e) {
  if (phi.shift() != e || psi.shift() != e) throw std::invalid_argument("verify_interleaving: shift mismatch");
  if (!semantically_equal(phi.source(), psi.target()) || !semantically_equal(phi.target(), psi.source())) {
    throw std::invalid_argument("verify_interleaving: morphisms do not go between the same modules");
  }
  return morphisms_equal(compose(phi, psi), sigma(phi.source(), 2 * e)) &&
         morphisms_equal(compose(psi, phi), sigma(psi.source(), 2 * e));
}

}  // namespace pm
