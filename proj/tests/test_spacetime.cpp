#include "doctest.h"
#include "pm/spacetime.hpp"
#include "support/generators.hpp"

using namespace pm;
using namespace pm::testing;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
const ExtRational kInf = ExtRational::infinity();

FiniteMetricSpace two_points(ExtRational d, const std::string& a = "x", const std::string& b = "y") {
  return FiniteMetricSpace({a, b}, {{ExtRational(0), d}, {d, ExtRational(0)}});
}

}  // namespace

TEST_CASE("metric validation") {
  CHECK_NOTHROW(two_points(kInf));
  CHECK_NOTHROW(two_points(ExtRational(0)));
  CHECK_THROWS_AS(FiniteMetricSpace({"x", "y"}, {{ExtRational(0), ExtRational(1)}, {ExtRational(2), ExtRational(0)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteMetricSpace({"x"}, {{ExtRational(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteMetricSpace({"x", "x"}, {{ExtRational(0), ExtRational(1)}, {ExtRational(1), ExtRational(0)}}),
                  std::invalid_argument);
  const ExtRational z(0), one(1), three(3);
  CHECK_THROWS_AS(FiniteMetricSpace({"a", "b", "c"}, {{z, one, three}, {one, z, one}, {three, one, z}}),
                  std::invalid_argument);
  auto m = two_points(one);
  CHECK(m.index_of("y") == 1);
  CHECK_THROWS_AS(m.index_of("z"), std::out_of_range);
}

TEST_CASE("spacetime order") {
  SpacetimePoset p(two_points(ExtRational(1)), {q(0), q(1, 2), q(1)});
  CHECK(order(p, "x", q(0), "x", q(0)));
  CHECK(order(p, "x", q(0), "y", q(1)));
  CHECK_FALSE(order(p, "x", q(0), "y", q(1, 2)));
  CHECK_FALSE(order(p, "x", q(1), "x", q(0)));
}

TEST_CASE("preorder laws on random spacetimes") {
  Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const bool zeros = trial % 2 == 0;
    auto m = random_metric(rng, static_cast<std::size_t>(uniform(rng, 1, 4)), true, zeros);
    SpacetimePoset p(m, {q(0), q(1, 2), q(1), q(2), q(7, 2)});
    const std::size_t n = p.element_count();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p.leq(p.element(i), p.element(i)));
      for (std::size_t j = 0; j < n; ++j) {
        const bool ij = p.leq(p.element(i), p.element(j)), ji = p.leq(p.element(j), p.element(i));
        if (!zeros && ij && ji) CHECK(i == j);
        if (!ij) continue;
        for (std::size_t k = 0; k < n; ++k) {
          if (p.leq(p.element(j), p.element(k))) CHECK(p.leq(p.element(i), p.element(k)));
        }
      }
    }
  }
}

TEST_CASE("spacetime maps") {
  auto m = two_points(ExtRational(1));
  const std::vector<Rational> grid{q(0), q(1)};
  auto id = map_spacetime({0, 1}, m, m, grid);
  for (std::size_t i = 0; i < id.source.element_count(); ++i) {
    CHECK(id(id.source.element(i)) == id.source.element(i));
  }
  CHECK_NOTHROW(map_spacetime({0, 0}, m, m, grid));
  try {
    map_spacetime({0, 1}, m, two_points(ExtRational(2)), grid);
    FAIL("expanding map accepted");
  } catch (const NotLipschitz& e) {
    CHECK(((e.first == 0 && e.second == 1) || (e.first == 1 && e.second == 0)));
  }
}

TEST_CASE("constant world lines") {
  auto m = two_points(ExtRational(3));
  SpacetimePoset p(m, {q(0), q(1)});
  auto x = eta(p, "x");
  CHECK(x.before_first() == 0);
  for (auto v : x.values()) CHECK(v == 0);
  CHECK(x.value_at(q(-5)) == 0);
  CHECK_FALSE(eta(p, "x") == eta(p, "y"));
  CHECK(worldline_interleaving_distance(x, x) == ExtRational(0));
  CHECK(worldline_interleaving_distance(x, eta(p, "y")) == ExtRational(3));
  SpacetimePoset far(two_points(kInf), {q(0)});
  CHECK(worldline_interleaving_distance(eta(far, 0), eta(far, 1)) == kInf);
  CHECK_THROWS(eta(p, "z"));
}

TEST_CASE("moving world lines") {
  // A jump is only order preserving between points at distance 0.
  auto far = two_points(ExtRational(2));
  CHECK_THROWS_AS(WorldLine(SpacetimePoset(far, {q(0), q(1)}), 0, {0, 1}), std::invalid_argument);
  const ExtRational z(0), two(2);
  FiniteMetricSpace m({"x", "x'", "y"}, {{z, z, two}, {z, z, two}, {two, two, z}});
  SpacetimePoset p(m, {q(0), q(1)});
  WorldLine w(p, 0, {0, 1});
  CHECK(worldline_interleaving_distance(w, w) == ExtRational(0));
  CHECK(worldline_interleaving_distance(w, eta(p, "x")) == ExtRational(0));
  CHECK(worldline_interleaving_distance(w, eta(p, "y")) == two);
}

TEST_CASE("eta is natural and isometric") {
  Rng rng(52);
  const std::vector<Rational> grid{q(0), q(1), q(5, 2)};
  for (int trial = 0; trial < 30; ++trial) {
    auto lm = random_lipschitz_map(rng, static_cast<std::size_t>(uniform(rng, 1, 5)),
                                   static_cast<std::size_t>(uniform(rng, 1, 5)));
    auto f = map_spacetime(lm.f, lm.source, lm.target, grid);
    for (std::size_t x = 0; x < lm.source.size(); ++x) {
      CHECK(map_worldline(f, eta(f.source, x)) == eta(f.target, lm.f[x]));
      for (std::size_t y = 0; y < lm.source.size(); ++y) {
        CHECK(worldline_interleaving_distance(eta(f.source, x), eta(f.source, y)) == lm.source.distance(x, y));
      }
    }
    // Composing with the collapse onto one point collapses everything.
    auto collapse = map_spacetime(std::vector<std::size_t>(lm.target.size(), 0), lm.target,
                                  lm.target.subspace({0}), grid);
    CHECK(compose_maps(f, collapse).point_map == std::vector<std::size_t>(lm.f.size(), 0));
  }
}

TEST_CASE("grid closure") {
  auto m = two_points(ExtRational(1));
  auto g = grid_closure({q(0), q(2)}, m, {0}, {1});
  CHECK(g == std::vector<Rational>{q(-1), q(0), q(1), q(2), q(3)});
}
