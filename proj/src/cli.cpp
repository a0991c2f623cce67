#include "pm/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "pm/coherent.hpp"
#include "pm/complexes.hpp"
#include "pm/decomposition.hpp"
#include "pm/io.hpp"
#include "pm/kan.hpp"
#include "pm/metrics.hpp"
#include "pm/spacetime.hpp"

namespace pm::cli {

namespace {

using io::Json;

struct Options {
  std::uint32_t prime = 2;
  std::string e = "0";
  std::string mode = "image";
  std::uint64_t budget = std::uint64_t{1} << 20;
  int max_dim = -1;
  std::string samples;
  std::string input;
  std::vector<std::string> inputs;
  std::string output;
  std::string target;
  std::string phi;
  std::string psi;
  std::vector<std::string> grid;
};

// Thrown for a successful run whose mathematical answer is undecided.
struct Undecided {
  Json result;
  std::string reason;
};

std::vector<std::string> all_inputs(const Options& o) {
  std::vector<std::string> files;
  if (!o.input.empty()) files.push_back(o.input);
  files.insert(files.end(), o.inputs.begin(), o.inputs.end());
  return files;
}

std::string single_input(const Options& o) {
  auto files = all_inputs(o);
  if (files.size() != 1) throw std::invalid_argument("expected exactly one input file");
  return files.front();
}

GridModule load_module(const std::string& path, const Options& o) {
  return io::module_from_json(io::read_file(path), o.prime);
}

// Either several module files, or one file holding an array of modules or
// {"modules": [...]}.
std::vector<GridModule> load_modules(const Options& o) {
  auto files = all_inputs(o);
  std::vector<GridModule> out;
  if (files.size() == 1) {
    auto j = io::read_file(files.front());
    if (j.is_object() && j.contains("modules")) j = j["modules"];
    if (j.is_array()) {
      for (const auto& m : j) out.push_back(io::module_from_json(m, o.prime));
      return out;
    }
    out.push_back(io::module_from_json(j, o.prime));
    return out;
  }
  for (const auto& f : files) out.push_back(load_module(f, o));
  return out;
}

std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rational(item));
  }
  return out;
}

std::optional<std::size_t> max_dim_of(const Options& o) {
  if (o.max_dim < 0) return std::nullopt;
  return static_cast<std::size_t>(o.max_dim);
}

CechOptions cech_options(const Options& o) {
  CechOptions c;
  c.budget = o.budget;
  c.mode = parse_kan_mode(o.mode);
  c.oracle.budget = o.budget;
  return c;
}

Json cmd_barcode(const Options& o) { return io::diagram_to_json(barcode(load_module(single_input(o), o))); }

Json cmd_distance(const Options& o) {
  auto mods = load_modules(o);
  if (mods.size() != 2) throw std::invalid_argument("distance needs two modules");
  Json j;
  j["distance"] = io::rational_to_json(interleaving_distance(mods[0], mods[1]));
  return j;
}

Json cmd_oracle(const Options& o, bool has_e) {
  auto mods = load_modules(o);
  if (mods.size() != 2) throw std::invalid_argument("oracle needs two modules");
  OracleOptions opts;
  opts.budget = o.budget;
  Json j;
  if (!has_e) {
    j["distance"] = io::rational_to_json(oracle_distance(mods[0], mods[1], opts));
    return j;
  }
  const Rational e = parse_rational(o.e);
  auto il = interleaving_oracle(mods[0], mods[1], e, opts);
  j["e"] = io::rational_to_json(e);
  j["interleaved"] = il.has_value();
  if (il) {
    j["phi"] = io::morphism_to_json(il->phi);
    j["psi"] = io::morphism_to_json(il->psi);
  }
  return j;
}

Json cmd_eta_check(const Options& o) {
  auto space = io::metric_from_json(io::read_file(single_input(o)));
  std::vector<Rational> grid;
  for (const auto& g : o.grid) {
    for (const auto& r : parse_list(g)) grid.push_back(r);
  }
  if (grid.empty()) grid = {Rational(0)};
  SpacetimePoset poset(space, grid);
  Json j;
  j["pairs"] = Json::array();
  bool iso = true;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      auto d = worldline_interleaving_distance(eta(poset, x), eta(poset, y));
      iso = iso && d == space.distance(x, y);
      Json p;
      p["x"] = space.label(x);
      p["y"] = space.label(y);
      p["distance"] = io::rational_to_json(space.distance(x, y));
      p["worldline_distance"] = io::rational_to_json(d);
      j["pairs"].push_back(std::move(p));
    }
  }
  j["isometric"] = iso;
  return j;
}

Json cmd_coherence(const Options& o) {
  auto sys = io::system_from_json(io::read_file(single_input(o)), o.prime);
  auto report = verify_coherent(sys);
  Json j;
  j["coherent"] = report.coherent;
  if (!report.coherent) {
    j["violations"] = Json::array();
    for (const auto& v : report.violations) {
      Json vj;
      vj["kind"] = v.kind;
      vj["points"] = Json::array();
      for (auto p : v.points) vj["points"].push_back(sys.space().label(p));
      vj["message"] = v.message;
      j["violations"].push_back(std::move(vj));
    }
  }
  return j;
}

Json cmd_extend(const Options& o) {
  auto sys = io::system_from_json(io::read_file(single_input(o)), o.prime);
  if (o.target.empty()) throw std::invalid_argument("extend needs --target <metric.json>");
  auto m = io::metric_from_json(io::read_file(o.target));
  return io::system_to_json(extend(sys, m, parse_kan_mode(o.mode)));
}

Json cmd_segment(const Options& o) {
  auto mods = load_modules(o);
  if (mods.size() != 2) throw std::invalid_argument("interpolate-segment needs two modules");
  if (o.phi.empty() || o.psi.empty()) throw std::invalid_argument("interpolate-segment needs --phi and --psi");
  const Rational e = parse_rational(o.e);
  auto phi = io::morphism_from_json(io::read_file(o.phi), mods[0], mods[1]);
  auto psi = io::morphism_from_json(io::read_file(o.psi), mods[1], mods[0]);
  auto fam = segment_interpolation(mods[0], mods[1], phi, psi, e, parse_list(o.samples), parse_kan_mode(o.mode));
  Json j;
  j["family"] = Json::array();
  for (std::size_t i = 0; i < fam.positions.size(); ++i) {
    Json f;
    f["position"] = io::rational_to_json(fam.positions[i]);
    f["module"] = io::module_to_json(fam.module(i));
    j["family"].push_back(std::move(f));
  }
  j["system"] = io::system_to_json(fam.system);
  return j;
}

Json cmd_star(const Options& o) {
  auto sys = io::system_from_json(io::read_file(single_input(o)), o.prime);
  const Rational e = parse_rational(o.e);
  const std::size_t n = sys.space().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i != k && sys.space().distance(i, k) != ExtRational(2 * e)) {
        throw std::invalid_argument("interpolate-star needs all pairwise distances equal to 2e");
      }
    }
  }
  PairMorphisms phis(sys.morphisms().begin(), sys.morphisms().end());
  auto star = star_interpolation(sys.modules(), phis, e, parse_kan_mode(o.mode));
  Json j;
  j["center"] = io::module_to_json(star.center);
  return j;
}

Json cmd_rips(const Options& o) {
  return io::complex_to_json(rips_complex(load_modules(o), parse_rational(o.e), max_dim_of(o)));
}

Json cmd_cech(const Options& o) {
  auto c = cech_complex(load_modules(o), parse_rational(o.e), max_dim_of(o), cech_options(o));
  auto j = io::complex_to_json(c);
  if (!c.unknown.empty()) throw Undecided{j, "some simplices are undecided within the budget"};
  return j;
}

Json cmd_sandwich(const Options& o) {
  auto r = sandwich_check(load_modules(o), parse_rational(o.e), max_dim_of(o), cech_options(o));
  Json j;
  j["cech_e"] = io::complex_to_json(r.cech_e);
  j["rips_2e"] = io::complex_to_json(r.rips_2e);
  j["cech_2e"] = io::complex_to_json(r.cech_2e);
  j["cech_not_in_rips"] = r.cech_not_in_rips;
  j["rips_not_in_cech"] = r.rips_not_in_cech;
  j["holds"] = r.holds();
  if (r.has_unknown()) throw Undecided{j, "some simplices are undecided within the budget"};
  return j;
}

void emit(const Json& j, const Options& o, std::ostream& out) {
  if (o.output.empty()) {
    out << j.dump() << "\n";
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw std::invalid_argument("cannot write '" + o.output + "'");
  f << j.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persistence module toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", o.input, "Input JSON file");
    sub->add_option("inputs", o.inputs, "Input JSON files");
    sub->add_option("-o,--output", o.output, "Write the result here instead of stdout");
    sub->add_option("--p", o.prime, "Prime for modules that do not declare one");
  };
  auto* barcode_cmd = app.add_subcommand("barcode", "Persistence diagram of a module");
  auto* distance_cmd = app.add_subcommand("distance", "Interleaving distance of two modules");
  auto* oracle_cmd = app.add_subcommand("oracle", "Interleaving search over hom spaces");
  auto* eta_cmd = app.add_subcommand("eta-check", "Compare world-line distances with a metric");
  auto* coherence_cmd = app.add_subcommand("coherence", "Check a coherent system");
  auto* extend_cmd = app.add_subcommand("extend", "Extend a coherent system to a larger space");
  auto* segment_cmd = app.add_subcommand("interpolate-segment", "Interpolate between interleaved modules");
  auto* star_cmd = app.add_subcommand("interpolate-star", "Center of an equilateral coherent system");
  auto* rips_cmd = app.add_subcommand("rips", "Rips complex of modules");
  auto* cech_cmd = app.add_subcommand("cech", "Čech complex of modules");
  auto* sandwich_cmd = app.add_subcommand("sandwich", "Check Čech(e) ⊆ Rips(2e) ⊆ Čech(2e)");
  for (auto* sub : app.get_subcommands({})) common(sub);

  CLI::Option* oracle_e = oracle_cmd->add_option("--e", o.e, "Scale");
  for (auto* sub : {rips_cmd, cech_cmd, sandwich_cmd, segment_cmd, star_cmd}) {
    sub->add_option("--e", o.e, "Scale")->required();
  }
  for (auto* sub : {extend_cmd, segment_cmd, star_cmd, cech_cmd, sandwich_cmd}) {
    sub->add_option("--mode", o.mode, "lan, ran or image");
  }
  for (auto* sub : {oracle_cmd, cech_cmd, sandwich_cmd}) sub->add_option("--budget", o.budget, "Enumeration budget");
  for (auto* sub : {rips_cmd, cech_cmd, sandwich_cmd}) sub->add_option("--max-dim", o.max_dim, "Largest simplex dimension");
  extend_cmd->add_option("--target", o.target, "Metric JSON of the target space");
  segment_cmd->add_option("--samples", o.samples, "Comma-separated positions in [0, e]");
  segment_cmd->add_option("--phi", o.phi, "Morphism JSON, first module to second");
  segment_cmd->add_option("--psi", o.psi, "Morphism JSON, second module to first");
  eta_cmd->add_option("--grid", o.grid, "Comma-separated time grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (!is_prime(o.prime)) throw std::invalid_argument("--p must be prime");
    Json result;
    if (*barcode_cmd) result = cmd_barcode(o);
    if (*distance_cmd) result = cmd_distance(o);
    if (*oracle_cmd) result = cmd_oracle(o, oracle_e->count() > 0);
    if (*eta_cmd) result = cmd_eta_check(o);
    if (*coherence_cmd) result = cmd_coherence(o);
    if (*extend_cmd) result = cmd_extend(o);
    if (*segment_cmd) result = cmd_segment(o);
    if (*star_cmd) result = cmd_star(o);
    if (*rips_cmd) result = cmd_rips(o);
    if (*cech_cmd) result = cmd_cech(o);
    if (*sandwich_cmd) result = cmd_sandwich(o);
    emit(result, o, out);
    return kOk;
  } catch (const Undecided& u) {
    emit(u.result, o, out);
    err << "undecided: " << u.reason << "\n";
    return kUndecided;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kUndecided;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace pm::cli
