#include "pm/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pm::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected a JSON object with key '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing key '") + key + "'");
  return *it;
}

std::size_t count_from_json(const Json& j) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) bad("expected a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad("malformed JSON in '" + path + "': " + e.what());
  }
}

Json rational_to_json(const Rational& r) { return to_string(r); }
Json rational_to_json(const ExtRational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) bad("expected a rational as a string");
  return parse_rational(j.get<std::string>());
}

ExtRational ext_rational_from_json(const Json& j) {
  if (j.is_number_integer()) return ExtRational(j.get<std::int64_t>());
  if (!j.is_string()) bad("expected a rational or \"inf\" as a string");
  return parse_ext_rational(j.get<std::string>());
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, std::uint32_t prime, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) bad("expected a matrix as an array of rows");
  if (j.size() != rows) {
    bad("matrix has " + std::to_string(j.size()) + " rows, expected " + std::to_string(rows));
  }
  Matrix m(prime, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      bad("matrix row " + std::to_string(r) + " does not have " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number_integer()) bad("matrix entries must be integers");
      auto v = j[r][c].get<std::int64_t>();
      auto p = static_cast<std::int64_t>(prime);
      m.set(r, c, static_cast<Residue>(((v % p) + p) % p));
    }
  }
  return m;
}

Json module_to_json(const GridModule& u) {
  Json j;
  j["p"] = u.prime();
  j["grid"] = Json::array();
  for (const auto& t : u.grid()) j["grid"].push_back(rational_to_json(t));
  j["dims"] = u.dims();
  j["maps"] = Json::array();
  for (const auto& m : u.maps()) j["maps"].push_back(matrix_to_json(m));
  return j;
}

GridModule module_from_json(const Json& j, std::uint32_t default_prime) {
  std::uint32_t p = default_prime;
  if (j.is_object() && j.contains("p")) {
    if (!j["p"].is_number_unsigned()) bad("module prime must be a positive integer");
    p = j["p"].get<std::uint32_t>();
  }
  if (!is_prime(p)) bad("module prime " + std::to_string(p) + " is not prime");
  std::vector<Rational> grid;
  for (const auto& t : field(j, "grid")) grid.push_back(rational_from_json(t));
  std::vector<std::size_t> dims;
  for (const auto& d : field(j, "dims")) dims.push_back(count_from_json(d));
  if (dims.size() != grid.size()) bad("module dims length differs from grid length");
  const auto& maps_j = field(j, "maps");
  const std::size_t expected = grid.empty() ? 0 : grid.size() - 1;
  if (!maps_j.is_array() || maps_j.size() != expected) bad("module needs one map between consecutive grid points");
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) maps.push_back(matrix_from_json(maps_j[i], p, dims[i + 1], dims[i]));
  return GridModule(p, std::move(grid), std::move(dims), std::move(maps));
}

Json diagram_to_json(const PersistenceDiagram& d) {
  Json j;
  j["points"] = Json::array();
  for (const auto& pt : d.points()) {
    Json q;
    q["birth"] = rational_to_json(pt.birth);
    q["death"] = rational_to_json(pt.death);
    q["mult"] = pt.mult;
    j["points"].push_back(std::move(q));
  }
  return j;
}

PersistenceDiagram diagram_from_json(const Json& j) {
  std::vector<DiagramPoint> pts;
  for (const auto& q : field(j, "points")) {
    DiagramPoint pt;
    pt.birth = rational_from_json(field(q, "birth"));
    pt.death = ext_rational_from_json(field(q, "death"));
    pt.mult = q.contains("mult") ? count_from_json(q["mult"]) : 1;
    pts.push_back(pt);
  }
  return PersistenceDiagram(std::move(pts));
}

Json metric_to_json(const FiniteMetricSpace& m) {
  Json j;
  j["points"] = m.labels();
  j["dist"] = Json::array();
  for (const auto& row : m.matrix()) {
    Json r = Json::array();
    for (const auto& d : row) r.push_back(rational_to_json(d));
    j["dist"].push_back(std::move(r));
  }
  return j;
}

FiniteMetricSpace metric_from_json(const Json& j) {
  std::vector<std::string> labels;
  for (const auto& l : field(j, "points")) {
    if (!l.is_string()) bad("metric point labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  std::vector<std::vector<ExtRational>> dist;
  for (const auto& row : field(j, "dist")) {
    if (!row.is_array()) bad("metric rows must be arrays");
    dist.emplace_back();
    for (const auto& d : row) dist.back().push_back(ext_rational_from_json(d));
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

Json morphism_to_json(const ModuleMorphism& phi) {
  Json j;
  j["shift"] = rational_to_json(phi.shift());
  j["refinement"] = Json::array();
  for (const auto& s : phi.refinement()) j["refinement"].push_back(rational_to_json(s));
  j["components"] = Json::array();
  for (const auto& c : phi.components()) j["components"].push_back(matrix_to_json(c));
  return j;
}

ModuleMorphism morphism_from_json(const Json& j, const GridModule& source, const GridModule& target) {
  const Rational shift = rational_from_json(field(j, "shift"));
  if (shift < 0) bad("morphism shift must be nonnegative");
  std::vector<Rational> refinement;
  if (j.contains("refinement")) {
    for (const auto& s : j["refinement"]) refinement.push_back(rational_from_json(s));
  } else {
    refinement = ModuleMorphism::canonical_refinement(source, target, shift);
  }
  for (std::size_t i = 1; i < refinement.size(); ++i) {
    if (!(refinement[i - 1] < refinement[i])) bad("morphism refinement is not strictly increasing");
  }
  const auto& comps = field(j, "components");
  if (!comps.is_array() || comps.size() != refinement.size()) bad("morphism needs one component per refinement point");
  std::vector<Matrix> declared;
  for (std::size_t i = 0; i < refinement.size(); ++i) {
    declared.push_back(matrix_from_json(comps[i], source.prime(), target.dim_at(refinement[i] + shift),
                                        source.dim_at(refinement[i])));
  }
  auto fn = [&](const Rational& s) -> Matrix {
    auto it = std::upper_bound(refinement.begin(), refinement.end(), s);
    if (it == refinement.begin()) return Matrix::zeros(source.prime(), target.dim_at(s + shift), source.dim_at(s));
    return declared[static_cast<std::size_t>(it - refinement.begin()) - 1];
  };
  return ModuleMorphism(source, target, shift, fn);
}

Json system_to_json(const CoherentSystem& s) {
  Json j;
  const auto& sp = s.space();
  j["metric"] = metric_to_json(sp);
  j["modules"] = Json::object();
  for (std::size_t a = 0; a < sp.size(); ++a) j["modules"][sp.label(a)] = module_to_json(s.module(a));
  j["morphisms"] = Json::object();
  for (const auto& [key, phi] : s.morphisms()) {
    j["morphisms"][sp.label(key.first) + "->" + sp.label(key.second)] = morphism_to_json(phi);
  }
  return j;
}

CoherentSystem system_from_json(const Json& j, std::uint32_t default_prime) {
  auto space = metric_from_json(field(j, "metric"));
  const auto& mods_j = field(j, "modules");
  std::vector<GridModule> modules;
  for (const auto& l : space.labels()) {
    if (!mods_j.contains(l)) bad("missing module for point '" + l + "'");
    modules.push_back(module_from_json(mods_j[l], default_prime));
  }
  CoherentSystem::MorphismMap phis;
  if (j.contains("morphisms")) {
    for (const auto& [name, mj] : j["morphisms"].items()) {
      auto arrow = name.find("->");
      if (arrow == std::string::npos) bad("morphism key '" + name + "' is not of the form a->b");
      const auto a = space.index_of(name.substr(0, arrow));
      const auto b = space.index_of(name.substr(arrow + 2));
      phis.emplace(std::make_pair(a, b), morphism_from_json(mj, modules[a], modules[b]));
    }
  }
  return CoherentSystem(std::move(space), std::move(modules), std::move(phis));
}

Json simplex_to_json(const Simplex& s) { return Json(s); }

Json complex_to_json(const ModuleComplex& c) {
  Json j;
  j["scale"] = rational_to_json(c.scale);
  j["simplices"] = Json::array();
  for (const auto& s : c.simplices) j["simplices"].push_back(simplex_to_json(s));
  j["unknown"] = Json::array();
  for (const auto& s : c.unknown) j["unknown"].push_back(simplex_to_json(s));
  j["certificates"] = Json::object();
  for (const auto& [s, cert] : c.certificates) {
    std::ostringstream key;
    for (std::size_t i = 0; i < s.size(); ++i) key << (i ? "," : "") << s[i];
    Json cj;
    cj["center"] = module_to_json(cert.center);
    cj["system"] = system_to_json(cert.system);
    j["certificates"][key.str()] = std::move(cj);
  }
  return j;
}

}  // namespace pm::io
