#include "doctest.h"
#include "support/generators.hpp"

using namespace pm;
using namespace pm::testing;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
GridModule I(Rational b, ExtRational d) { return interval_module(2, b, d); }
const ExtRational kInf = ExtRational::infinity();

}  // namespace

TEST_CASE("interval modules") {
  auto a = I(q(0), q(2));
  CHECK(a.grid() == std::vector<Rational>{q(0), q(2)});
  CHECK(a.dims() == std::vector<std::size_t>{1, 0});
  auto b = I(q(0), kInf);
  CHECK(b.grid() == std::vector<Rational>{q(0)});
  CHECK(b.dims() == std::vector<std::size_t>{1});
  auto c = I(q(1, 2), q(3, 2));
  CHECK(c.grid() == std::vector<Rational>{q(1, 2), q(3, 2)});
  CHECK(c.dims() == std::vector<std::size_t>{1, 0});
  CHECK_THROWS_AS(I(q(2), q(2)), std::invalid_argument);
  CHECK(c.dim_at(q(0)) == 0);
  CHECK(c.dim_at(q(1)) == 1);
  CHECK(c.dim_at(q(3, 2)) == 0);
}

TEST_CASE("shifts") {
  auto u = I(q(0), q(4));
  CHECK(shift_module(u, q(1)) == I(q(-1), q(3)));
  CHECK(shift_module(u, q(0)) == u);
  CHECK(shift_module(shift_module(u, q(1)), q(-1)) == u);
}

TEST_CASE("sigma") {
  auto u = I(q(0), q(4));
  CHECK(morphisms_equal(sigma(u, q(0)), identity_morphism(u)));
  CHECK(sigma(I(q(0), q(2)), q(2)).is_zero());
  CHECK(sigma(u, q(2)).component_at(q(0)) == Matrix::identity(2, 1));
  CHECK(sigma(u, q(2)).component_at(q(3)).rows() == 0);
  CHECK_THROWS(sigma(u, q(-1)));
}

TEST_CASE("composition") {
  Rng rng(21);
  auto u = random_module(rng);
  auto id = identity_morphism(u);
  CHECK(morphisms_equal(compose(id, id), id));
  auto phi = sigma(u, q(1));
  CHECK(compose(phi, ModuleMorphism::zero(u, u, q(2))).is_zero());
  for (int trial = 0; trial < 50; ++trial) {
    auto v = random_module(rng);
    const Rational a(uniform(rng, 0, 6), 2), b(uniform(rng, 0, 6), 2);
    CHECK(morphisms_equal(compose(sigma(v, a), sigma(v, b)), sigma(v, a + b)));
  }
}

TEST_CASE("naturality check") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_module(rng);
    CHECK(verify_morphism(sigma(u, Rational(uniform(rng, 0, 8), 2))));
  }
  auto a = I(q(0), q(4)), b = I(q(1), q(5));
  CHECK(verify_morphism(ModuleMorphism::zero(a, b, q(0))));
  // Nonzero only on [1,2): the square from 1 to 2 does not commute.
  auto bad = ModuleMorphism(a, b, q(0), [&](const Rational& s) {
    Matrix m(2, b.dim_at(s), a.dim_at(s));
    if (s >= q(1) && s < q(2)) m.set(0, 0, 1);
    return m;
  });
  CHECK_FALSE(verify_morphism(bad));
}

TEST_CASE("hom spaces") {
  CHECK(hom_basis(I(q(0), q(4)), I(q(0), q(4)), q(0)).size() == 1);
  CHECK(hom_basis(I(q(0), q(1)), I(q(2), q(3)), q(0)).empty());
  CHECK(hom_basis(GridModule::zero(2), I(q(0), q(4)), q(1)).empty());
  // Hom(I[a,b), I[c,d) T_e) is one-dimensional iff c - e <= a < d - e <= b.
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational a(uniform(rng, 0, 8), 2), c(uniform(rng, 0, 8), 2), e(uniform(rng, 0, 4), 2);
    const Rational b = a + Rational(uniform(rng, 1, 6), 2), d = c + Rational(uniform(rng, 1, 6), 2);
    const bool expected = c - e <= a && a < d - e && d - e <= b;
    auto basis = hom_basis(I(a, b), I(c, d), e);
    CHECK(basis.size() == (expected ? 1u : 0u));
    for (const auto& phi : basis) CHECK(verify_morphism(phi));
  }
  // Every basis element is natural, and the basis is independent.
  for (int trial = 0; trial < 30; ++trial) {
    auto u = random_module(rng, 2, 4, 2), v = random_module(rng, 2, 4, 2);
    auto basis = hom_basis(u, v, Rational(uniform(rng, 0, 4), 2));
    if (basis.empty()) continue;
    const std::size_t len = basis[0].flatten().size();
    Matrix cols(2, len, basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      CHECK(verify_morphism(basis[k]));
      auto f = basis[k].flatten();
      for (std::size_t i = 0; i < len; ++i) cols.set(i, k, f[i]);
    }
    CHECK(rank(cols) == basis.size());
  }
}

TEST_CASE("interleaving check") {
  auto u = I(q(0), q(4));
  CHECK(verify_interleaving(identity_morphism(u), identity_morphism(u), q(0)));
  auto z = GridModule::zero(2);
  auto short_bar = I(q(0), q(2));
  CHECK(verify_interleaving(ModuleMorphism::zero(short_bar, z, q(1)), ModuleMorphism::zero(z, short_bar, q(1)), q(1)));
  CHECK_FALSE(verify_interleaving(ModuleMorphism::zero(u, z, q(1)), ModuleMorphism::zero(z, u, q(1)), q(1)));
}

TEST_CASE("direct sums and grids") {
  Rng rng(24);
  auto u = random_module(rng);
  auto s = direct_sum(u, GridModule::zero(2));
  CHECK(semantically_equal(s, u));

  auto r = restrict_to_grid(I(q(0), q(2)), {q(0), q(1), q(2)});
  CHECK(r.dims() == std::vector<std::size_t>{1, 1, 0});
  CHECK(r.maps()[0] == Matrix::identity(2, 1));
  CHECK(r.maps()[1].rows() == 0);
  CHECK_THROWS(restrict_to_grid(I(q(0), q(2)), {q(0), q(1)}));

  auto ds = direct_sum(I(q(0), q(2)), I(q(1), q(3)));
  const std::vector<std::pair<Rational, std::size_t>> expected{
      {q(-1), 0}, {q(0), 1}, {q(1, 2), 1}, {q(1), 2}, {q(3, 2), 2}, {q(2), 1}, {q(5, 2), 1}, {q(3), 0}, {q(9), 0}};
  for (const auto& [t, d] : expected) CHECK(ds.dim_at(t) == d);
}

TEST_CASE("regridding and compression keep pointwise values") {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    auto u = random_module(rng, trial % 2 ? 3 : 2);
    std::vector<Rational> extra = u.grid();
    for (int k = 0; k < 4; ++k) extra.push_back(Rational(uniform(rng, -2, 20), 2));
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    auto r = restrict_to_grid(u, extra);
    auto c = compress(u);
    CHECK(semantically_equal(r, u));
    CHECK(semantically_equal(c, u));
    CHECK(c.size() <= u.size());
    for (int k = 0; k < 10; ++k) {
      Rational s(uniform(rng, -2, 20), 2), t(uniform(rng, -2, 20), 2);
      if (t < s) std::swap(s, t);
      CHECK(r.dim_at(s) == u.dim_at(s));
      CHECK(rank(r.map_between(s, t)) == rank(u.map_between(s, t)));
      CHECK(rank(c.map_between(s, t)) == rank(u.map_between(s, t)));
    }
  }
}

TEST_CASE("malformed modules are rejected") {
  CHECK_THROWS_AS(GridModule(2, {q(1), q(0)}, {1, 1}, {Matrix::identity(2, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(GridModule(2, {q(0), q(1)}, {1, 2}, {Matrix::identity(2, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(GridModule(2, {q(0)}, {1, 1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(GridModule(4, {q(0)}, {1}, {}), std::invalid_argument);
}
