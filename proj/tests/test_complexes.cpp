#include "doctest.h"
#include "pm/complexes.hpp"
#include "support/generators.hpp"

using namespace pm;
using namespace pm::testing;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
GridModule I(Rational b, ExtRational d) { return interval_module(2, b, d); }

// Whether some coherent system on the modules at pairwise distance 2e exists,
// by enumerating every choice of morphisms over F_2. Returns nullopt when
// the enumeration would exceed 2^max_bits.
std::optional<bool> brute_force_coherent(const std::vector<GridModule>& mods, const Rational& e, int max_bits = 18) {
  const std::size_t n = mods.size();
  const Rational d = 2 * e;
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  std::vector<std::vector<ModuleMorphism>> bases;
  std::size_t bits = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      keys.emplace_back(a, b);
      bases.push_back(hom_basis(mods[a], mods[b], d));
      bits += bases.back().size();
    }
  }
  if (bits > static_cast<std::size_t>(max_bits)) return std::nullopt;
  std::vector<std::string> labels;
  std::vector<std::vector<ExtRational>> dist(n, std::vector<ExtRational>(n, ExtRational(d)));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    dist[i][i] = ExtRational(0);
  }
  FiniteMetricSpace space(labels, dist);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    CoherentSystem::MorphismMap phis;
    std::size_t bit = 0;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      auto [a, b] = keys[k];
      auto phi = ModuleMorphism::zero(mods[a], mods[b], d);
      for (const auto& h : bases[k]) {
        if ((mask >> bit++) & 1) phi = phi + h;
      }
      phis.emplace(keys[k], phi);
    }
    if (verify_coherent(CoherentSystem(space, mods, phis)).coherent) return true;
  }
  return false;
}

void check_certificate(const CechResult& r, const std::vector<GridModule>& mods, const Rational& e) {
  REQUIRE(r.certificate);
  CHECK(verify_coherent(r.certificate->system).coherent);
  REQUIRE(r.certificate->center_interleavings.size() == mods.size());
  for (std::size_t i = 0; i < mods.size(); ++i) {
    const auto& w = r.certificate->center_interleavings[i];
    CHECK(semantically_equal(w.phi.source(), mods[i]));
    CHECK(semantically_equal(w.phi.target(), r.certificate->center));
    CHECK(verify_interleaving(w.phi, w.psi, e));
  }
}

bool subset(const std::vector<Simplex>& a, const ModuleComplex& b) {
  return std::all_of(a.begin(), a.end(), [&](const Simplex& s) { return b.contains(s); });
}

}  // namespace

TEST_CASE("the three-module example") {
  auto mods = counterexample_triple();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) CHECK(interleaving_distance(mods[i], mods[j]) == ExtRational(1));
  }
  auto low = cech_membership(mods, q(3, 4));
  CHECK(low.verdict == Verdict::Refuted);
  CHECK_FALSE(low.certificate);
  // Independent confirmation: no coherent choice of morphisms at all.
  auto brute = brute_force_coherent(mods, q(3, 4));
  REQUIRE(brute.has_value());
  CHECK_FALSE(*brute);
  auto high = cech_membership(mods, q(1));
  CHECK(high.verdict == Verdict::Certificate);
  check_certificate(high, mods, q(1));

  // Every relabelling gives the same verdicts, with or without the shortcut.
  std::vector<std::size_t> order{0, 1, 2};
  do {
    for (bool shortcut : {true, false}) {
      CechOptions opts;
      opts.order = order;
      opts.witness_shortcut = shortcut;
      CHECK(cech_membership(mods, q(3, 4), opts).verdict == Verdict::Refuted);
      auto r = cech_membership(mods, q(1), opts);
      CHECK(r.verdict == Verdict::Certificate);
      if (r.certificate) check_certificate(r, mods, q(1));
    }
  } while (std::next_permutation(order.begin(), order.end()));

  // Below scale 1 the edges are there but the triangle is not.
  auto cech = cech_complex(mods, q(3, 4));
  CHECK(cech.contains({0, 1}));
  CHECK(cech.contains({1, 2}));
  CHECK(cech.contains({0, 2}));
  CHECK_FALSE(cech.contains({0, 1, 2}));
  CHECK(cech.unknown.empty());
  CHECK(rips_complex(mods, q(1)).contains({0, 1, 2}));

  auto rep = sandwich_check(mods, q(1, 2));
  CHECK(rep.holds());
  CHECK(rep.rips_2e.contains({0, 1, 2}));
  CHECK_FALSE(rep.cech_e.contains({0, 1, 2}));
  CHECK(rep.cech_2e.contains({0, 1, 2}));
}

TEST_CASE("a tiny budget yields Unknown") {
  auto mods = counterexample_triple();
  CechOptions opts;
  opts.budget = 1;
  opts.witness_shortcut = false;
  auto r = cech_membership(mods, q(3, 4), opts);
  CHECK(r.verdict == Verdict::Unknown);
}

TEST_CASE("search verdicts agree with brute force on random triples") {
  Rng rng(91);
  int compared = 0, certified = 0, refuted = 0;
  for (int trial = 0; trial < 400 && compared < 40; ++trial) {
    std::vector<GridModule> mods;
    for (int i = 0; i < 3; ++i) mods.push_back(trial % 2 ? random_interval_sum(rng, 2, 2) : random_module(rng, 2, 3, 2));
    const Rational e(uniform(rng, 1, 4), 4);
    auto brute = brute_force_coherent(mods, e, 14);
    if (!brute) continue;
    ++compared;
    CechOptions opts;
    opts.witness_shortcut = false;
    auto r = cech_membership(mods, e, opts);
    REQUIRE(r.verdict != Verdict::Unknown);
    CHECK((r.verdict == Verdict::Certificate) == *brute);
    if (r.verdict == Verdict::Certificate) {
      ++certified;
      check_certificate(r, mods, e);
    } else {
      ++refuted;
    }
    CHECK(cech_membership(mods, e).verdict == r.verdict);
  }
  CHECK(compared >= 40);
  CHECK(certified > 0);
  CHECK(refuted > 0);
}

TEST_CASE("equal modules") {
  Rng rng(92);
  auto u = random_module(rng, 2, 4, 2);
  std::vector<GridModule> mods(4, u);
  for (auto e : {q(0), q(1, 2), q(2)}) {
    auto r = cech_membership(mods, e);
    REQUIRE(r.verdict == Verdict::Certificate);
    for (const auto& [key, phi] : r.certificate->system.morphisms()) CHECK(morphisms_equal(phi, sigma(u, 2 * e)));
    auto rips = rips_complex(mods, e), cech = cech_complex(mods, e);
    CHECK(rips.simplices.size() == 15);  // every subset of size 1..4
    CHECK(cech.simplices.size() == 15);
  }
}

TEST_CASE("Rips complex of shifted bars") {
  std::vector<GridModule> mods{I(q(0), q(4)), I(q(1), q(5)), I(q(2), q(6))};
  auto r1 = rips_complex(mods, q(1));
  CHECK(r1.simplices == std::vector<Simplex>{{0}, {1}, {2}, {0, 1}, {1, 2}});
  auto r2 = rips_complex(mods, q(2));
  CHECK(r2.contains({0, 1, 2}));
  CHECK(r2.simplices.size() == 7);
  CHECK(rips_complex({GridModule::zero(2)}, q(0)).simplices == std::vector<Simplex>{{0}});
}

TEST_CASE("edge cases") {
  auto empty = sandwich_check({}, q(1));
  CHECK(empty.holds());
  CHECK(empty.cech_e.simplices.empty());
  CHECK(empty.rips_2e.simplices.empty());
  auto single = cech_complex({I(q(0), q(1))}, q(0));
  CHECK(single.simplices == std::vector<Simplex>{{0}});
  CHECK(default_max_dim(1) == 0);
  CHECK(default_max_dim(3) == 2);
  CHECK(default_max_dim(9) == 3);
  auto capped = rips_complex(std::vector<GridModule>(3, I(q(0), q(1))), q(0), 1);
  CHECK_FALSE(capped.contains({0, 1, 2}));
  CHECK(capped.contains({0, 2}));
}

TEST_CASE("complex invariants on random collections") {
  Rng rng(93);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<GridModule> mods;
    const auto n = static_cast<std::size_t>(uniform(rng, 2, 4));
    for (std::size_t i = 0; i < n; ++i) mods.push_back(random_interval_sum(rng, 2, 2));
    std::optional<ModuleComplex> prev_rips, prev_cech;
    for (auto e : {q(1, 4), q(1, 2), q(1), q(2)}) {
      auto rips = rips_complex(mods, e);
      auto cech = cech_complex(mods, e);
      CHECK(rips.downward_closed());
      CHECK(cech.downward_closed());
      CHECK(cech.unknown.empty());
      if (prev_rips) {
        CHECK(subset(prev_rips->simplices, rips));
        CHECK(subset(prev_cech->simplices, cech));
      }
      for (const auto& [s, cert] : cech.certificates) {
        std::vector<GridModule> sub;
        for (auto i : s) sub.push_back(mods[i]);
        CechResult r;
        r.verdict = Verdict::Certificate;
        r.certificate = cert;
        check_certificate(r, sub, e);
      }
      auto rep = sandwich_check(mods, e);
      CHECK(rep.holds());
      prev_rips = rips;
      prev_cech = cech;
    }
  }
}
