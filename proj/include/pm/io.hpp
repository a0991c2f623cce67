#pragma once

// JSON readers and writers. Rationals are strings ("3", "-1/2", "inf");
// matrices are arrays of rows of integer residues. Objects are written with
// sorted keys so output is byte-for-byte reproducible.

#include <string>

#include <json.hpp>

#include "pm/coherent.hpp"
#include "pm/complexes.hpp"
#include "pm/decomposition.hpp"
#include "pm/module.hpp"
#include "pm/spacetime.hpp"

namespace pm::io {

using Json = nlohmann::json;

/// Reads and parses a file. Throws std::invalid_argument.
Json read_file(const std::string& path);

Json rational_to_json(const Rational& r);
Json rational_to_json(const ExtRational& r);
/// Accepts strings and integers. Throws std::invalid_argument.
Rational rational_from_json(const Json& j);
ExtRational ext_rational_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
/// Expects exactly rows x cols entries.
Matrix matrix_from_json(const Json& j, std::uint32_t prime, std::size_t rows, std::size_t cols);

Json module_to_json(const GridModule& u);
/// "p" defaults to default_prime when absent.
GridModule module_from_json(const Json& j, std::uint32_t default_prime = 2);

Json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const Json& j);

Json metric_to_json(const FiniteMetricSpace& m);
FiniteMetricSpace metric_from_json(const Json& j);

/// {"shift": .., "refinement": [..], "components": [..]}.
Json morphism_to_json(const ModuleMorphism& phi);
/// Components are read on the declared refinement (the canonical one when
/// absent) and extended to the right, cell by cell.
ModuleMorphism morphism_from_json(const Json& j, const GridModule& source, const GridModule& target);

Json system_to_json(const CoherentSystem& s);
CoherentSystem system_from_json(const Json& j, std::uint32_t default_prime = 2);

Json simplex_to_json(const Simplex& s);
Json complex_to_json(const ModuleComplex& c);

}  // namespace pm::io
