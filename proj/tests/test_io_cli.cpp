#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "pm/cli.hpp"
#include "pm/io.hpp"
#include "support/generators.hpp"

using namespace pm;
using namespace pm::testing;
using pm::io::Json;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
GridModule I(Rational b, ExtRational d) { return interval_module(2, b, d); }

struct TempDir {
  std::filesystem::path root;
  TempDir() {
    static int counter = 0;
    root = std::filesystem::temp_directory_path() /
           ("pm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(root);
  }
  ~TempDir() { std::filesystem::remove_all(root); }
  std::string write(const std::string& name, const std::string& text) const {
    auto path = (root / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string write_json(const std::string& name, const Json& j) const { return write(name, j.dump()); }
};

struct Run {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Run pmtool(std::vector<std::string> args) {
  args.insert(args.begin(), "pmtool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

FiniteMetricSpace equilateral(std::size_t n, const Rational& d) {
  std::vector<std::string> labels;
  std::vector<std::vector<ExtRational>> dist(n, std::vector<ExtRational>(n, ExtRational(d)));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("p" + std::to_string(i));
    dist[i][i] = ExtRational(0);
  }
  return FiniteMetricSpace(labels, dist);
}

}  // namespace

TEST_CASE("rational encoding") {
  CHECK(io::rational_to_json(q(3)) == Json("3"));
  CHECK(io::rational_to_json(q(-1, 2)) == Json("-1/2"));
  CHECK(io::rational_to_json(ExtRational::infinity()) == Json("inf"));
  CHECK(io::rational_from_json(Json("6/4")) == q(3, 2));
  CHECK(io::rational_from_json(Json(7)) == q(7));
  CHECK(io::ext_rational_from_json(Json("inf")).is_infinite());
  CHECK_THROWS_AS(io::rational_from_json(Json("inf")), std::invalid_argument);
  CHECK_THROWS_AS(io::rational_from_json(Json("1/0")), std::invalid_argument);
  CHECK_THROWS_AS(io::rational_from_json(Json("x")), std::invalid_argument);
  CHECK_THROWS_AS(io::rational_from_json(Json(0.5)), std::invalid_argument);
}

TEST_CASE("JSON roundtrips") {
  Rng rng(111);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t p = std::vector<std::uint32_t>{2, 3, 5}[trial % 3];
    auto u = random_module(rng, p);
    auto back = io::module_from_json(Json::parse(io::module_to_json(u).dump()));
    CHECK(back.prime() == p);
    CHECK(back.grid() == u.grid());
    CHECK(back.dims() == u.dims());
    CHECK(back.maps() == u.maps());

    auto d = random_diagram(rng);
    CHECK(io::diagram_from_json(io::diagram_to_json(d)) == d);

    auto m = random_metric(rng, 4, true, true);
    auto mb = io::metric_from_json(io::metric_to_json(m));
    CHECK(mb.labels() == m.labels());
    CHECK(mb.matrix() == m.matrix());

    auto v = random_module(rng, p);
    const Rational e(uniform(rng, 0, 4), 2);
    auto phi = ModuleMorphism::zero(u, v, e);
    for (const auto& h : hom_basis(u, v, e)) {
      if (uniform(rng, 0, 1)) phi = phi + h;
    }
    CHECK(morphisms_equal(io::morphism_from_json(io::morphism_to_json(phi), u, v), phi));
  }
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_coherent_system(rng, random_metric(rng, 3, trial % 2 == 0, trial % 3 == 0));
    auto back = io::system_from_json(Json::parse(io::system_to_json(s).dump()));
    REQUIRE(back.space().size() == s.space().size());
    for (std::size_t a = 0; a < s.space().size(); ++a) CHECK(semantically_equal(back.module(a), s.module(a)));
    for (const auto& [key, phi] : s.morphisms()) CHECK(morphisms_equal(back.arrow(key.first, key.second), phi));
  }
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(io::module_from_json(Json::parse(R"({"grid":["1","0"],"dims":[1,1],"maps":[[[1]]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::module_from_json(Json::parse(R"({"grid":["0","1"],"dims":[1,1],"maps":[[[1,0]]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::module_from_json(Json::parse(R"({"p":4,"grid":["0"],"dims":[1],"maps":[]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::module_from_json(Json::parse(R"({"grid":["0"],"dims":[-1],"maps":[]})")),
                  std::exception);
  CHECK_THROWS_AS(io::metric_from_json(Json::parse(R"({"points":["a","b"],"dist":[["0","1"],["2","0"]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::diagram_from_json(Json::parse(R"({"points":[{"birth":"2","death":"1"}]})")),
                  std::invalid_argument);
}

TEST_CASE("complex output lists simplices and certificates") {
  auto c = cech_complex({I(q(0), q(4)), I(q(1), q(5))}, q(1, 2));
  auto j = io::complex_to_json(c);
  CHECK(j["scale"] == Json("1/2"));
  CHECK(j["simplices"] == Json::parse("[[0],[1],[0,1]]"));
  CHECK(j["unknown"].empty());
  CHECK(j["certificates"].size() == c.certificates.size());
}

TEST_CASE("cli: barcode, distance and oracle") {
  TempDir dir;
  auto a = dir.write("a.json", R"({"grid":["0","4"],"dims":[1,0],"maps":[[]]})");
  auto b = dir.write_json("b.json", io::module_to_json(I(q(1), q(5))));

  auto r = pmtool({"barcode", a});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "{\"points\":[{\"birth\":\"0\",\"death\":\"4\",\"mult\":1}]}\n");

  r = pmtool({"distance", a, b});
  CHECK(r.code == cli::kOk);
  CHECK(r.json() == Json::parse(R"({"distance":"1"})"));

  auto both = dir.write_json("both.json", Json{{"modules", {io::module_to_json(I(q(0), q(4))), io::module_to_json(I(q(1), q(5)))}}});
  CHECK(pmtool({"distance", "-i", both}).json() == Json::parse(R"({"distance":"1"})"));

  r = pmtool({"oracle", a, b});
  CHECK(r.code == cli::kOk);
  CHECK(r.json()["distance"] == Json("1"));
  r = pmtool({"oracle", a, b, "--e", "1/2"});
  CHECK(r.json()["interleaved"] == false);
  r = pmtool({"oracle", a, b, "--e", "1"});
  REQUIRE(r.json()["interleaved"] == true);
  auto phi = io::morphism_from_json(r.json()["phi"], I(q(0), q(4)), I(q(1), q(5)));
  auto psi = io::morphism_from_json(r.json()["psi"], I(q(1), q(5)), I(q(0), q(4)));
  CHECK(verify_interleaving(phi, psi, q(1)));

  // Same input, same bytes.
  CHECK(pmtool({"oracle", a, b, "--e", "1"}).out == r.out);

  auto out = (dir.root / "result.json").string();
  CHECK(pmtool({"barcode", a, "-o", out}).code == cli::kOk);
  CHECK(io::read_file(out) == Json::parse(R"({"points":[{"birth":"0","death":"4","mult":1}]})"));
}

TEST_CASE("cli: metric and system commands") {
  TempDir dir;
  auto u = I(q(0), q(10));

  auto metric = dir.write("m.json", R"({"points":["a","b","c"],"dist":[["0","1","inf"],["1","0","inf"],["inf","inf","0"]]})");
  auto r = pmtool({"eta-check", metric, "--grid", "0,1,2"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["isometric"] == true);
  CHECK(r.json()["pairs"].size() == 3);

  auto good = common_source_system(equilateral(3, q(2)), u);
  auto sys = dir.write_json("sys.json", io::system_to_json(good));
  r = pmtool({"coherence", sys});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "{\"coherent\":true}\n");

  auto broken = io::system_to_json(good);
  broken["morphisms"]["p0->p1"] = io::morphism_to_json(ModuleMorphism::zero(u, u, q(2)));
  r = pmtool({"coherence", dir.write_json("bad.json", broken)});
  CHECK(r.code == cli::kOk);
  CHECK(r.json()["coherent"] == false);
  CHECK_FALSE(r.json()["violations"].empty());

  r = pmtool({"interpolate-star", sys, "--e", "1"});
  REQUIRE(r.code == cli::kOk);
  auto center = io::module_from_json(r.json()["center"]);
  CHECK(interleaving_distance(center, u) <= ExtRational(1));
  CHECK(pmtool({"interpolate-star", sys, "--e", "2"}).code == cli::kInputError);

  const ExtRational z(0), one(1), two(2);
  FiniteMetricSpace big({"p0", "p1", "x"}, {{z, two, one}, {two, z, one}, {one, one, z}});
  auto two_point = dir.write_json("two.json", io::system_to_json(common_source_system(big.subspace({0, 1}), u)));
  auto target = dir.write_json("big.json", io::metric_to_json(big));
  r = pmtool({"extend", two_point, "--target", target, "--mode", "image"});
  REQUIRE(r.code == cli::kOk);
  auto extended = io::system_from_json(r.json());
  CHECK(extended.space().size() == 3);
  CHECK(verify_coherent(extended).coherent);
  CHECK(pmtool({"extend", two_point}).code == cli::kInputError);
  CHECK(pmtool({"extend", two_point, "--target", target, "--mode", "sideways"}).code == cli::kInputError);
}

TEST_CASE("cli: interpolation and complexes") {
  TempDir dir;
  auto u = I(q(0), q(4)), v = I(q(1), q(5));
  auto a = dir.write_json("a.json", io::module_to_json(u));
  auto b = dir.write_json("b.json", io::module_to_json(v));
  auto il = interleaving_oracle(u, v, q(1));
  REQUIRE(il);
  auto phi = dir.write_json("phi.json", io::morphism_to_json(il->phi));
  auto psi = dir.write_json("psi.json", io::morphism_to_json(il->psi));
  auto r = pmtool({"interpolate-segment", a, b, "--phi", phi, "--psi", psi, "--e", "1", "--samples", "0,1/2,1"});
  REQUIRE(r.code == cli::kOk);
  auto fam = r.json()["family"];
  REQUIRE(fam.size() == 3);
  CHECK(semantically_equal(io::module_from_json(fam[0]["module"]), u));
  CHECK(semantically_equal(io::module_from_json(fam[2]["module"]), v));
  CHECK(barcode(io::module_from_json(fam[1]["module"])) == barcode(I(q(1, 2), q(9, 2))));
  CHECK(pmtool({"interpolate-segment", a, b, "--e", "1"}).code == cli::kInputError);

  std::vector<Json> triple;
  for (const auto& m : counterexample_triple()) triple.push_back(io::module_to_json(m));
  auto mods = dir.write_json("triple.json", Json(triple));
  r = pmtool({"rips", mods, "--e", "1"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["simplices"].back() == Json::parse("[0,1,2]"));
  r = pmtool({"cech", mods, "--e", "3/4"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["simplices"] == Json::parse("[[0],[1],[2],[0,1],[0,2],[1,2]]"));
  r = pmtool({"cech", mods, "--e", "3/4", "--max-dim", "1"});
  CHECK(r.json()["simplices"].size() == 6);
  r = pmtool({"sandwich", mods, "--e", "1/2"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["holds"] == true);

  // Too small a budget leaves the triangle undecided.
  r = pmtool({"cech", mods, "--e", "3/4", "--budget", "1"});
  CHECK(r.code == cli::kUndecided);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli: input errors") {
  TempDir dir;
  auto a = dir.write_json("a.json", io::module_to_json(I(q(0), q(4))));
  auto garbage = dir.write("g.json", "{ not json");
  auto wrong = dir.write("w.json", R"({"grid":["0"],"dims":[2],"maps":[[[1]]]})");
  CHECK(pmtool({}).code == cli::kInputError);
  CHECK(pmtool({"frobnicate"}).code == cli::kInputError);
  CHECK(pmtool({"barcode", (dir.root / "missing.json").string()}).code == cli::kInputError);
  CHECK(pmtool({"barcode", garbage}).code == cli::kInputError);
  CHECK(pmtool({"barcode", wrong}).code == cli::kInputError);
  CHECK(pmtool({"barcode", a, a}).code == cli::kInputError);
  CHECK(pmtool({"distance", a}).code == cli::kInputError);
  CHECK(pmtool({"barcode", a, "--p", "4"}).code == cli::kInputError);
  CHECK(pmtool({"rips", a}).code == cli::kInputError);
  CHECK(pmtool({"rips", a, "--e", "one"}).code == cli::kInputError);
  auto r = pmtool({"barcode", garbage});
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
}
