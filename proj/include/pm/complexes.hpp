#pragma once

// Rips and Čech complexes whose vertices are persistence modules.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pm/coherent.hpp"
#include "pm/kan.hpp"
#include "pm/metrics.hpp"

namespace pm {

/// Sorted vertex indices.
using Simplex = std::vector<std::size_t>;

enum class Verdict { Certificate, Refuted, Unknown };
std::string to_string(Verdict v);

struct CechCertificate {
  /// Coherent system on v0..v{n} at pairwise distance 2e.
  CoherentSystem system;
  /// Value of its extension at a point at distance e from every vertex.
  GridModule center;
  /// center_interleavings[i] : an e-interleaving between U_i and the center.
  std::vector<Interleaving> center_interleavings;
};

struct CechOptions {
  /// Maximum number of search nodes (partial assignments) in the exhaustive search.
  std::uint64_t budget = std::uint64_t{1} << 20;
  KanMode mode = KanMode::Image;
  /// Try a vertex that is e-interleaved with all others as the center first.
  bool witness_shortcut = true;
  /// Optional relabelling of the vertices before searching; the verdict does
  /// not depend on it.
  std::vector<std::size_t> order;
  OracleOptions oracle;
};

struct CechResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<CechCertificate> certificate;
  std::string reason;
  std::uint64_t nodes = 0;
};

/// Decides whether the modules admit a common e-interleaved center, by way
/// of coherent systems at pairwise distance 2e. Refuted is a proof over F_p:
/// either some pair is farther than 2e apart or the exhaustive search found
/// no coherent system. Unknown means the budget ran out.
CechResult cech_membership(const std::vector<GridModule>& modules, const Rational& e, const CechOptions& opts = {});

struct ModuleComplex {
  Rational scale{0};
  std::vector<Simplex> simplices;  // by size, then lexicographic
  std::vector<Simplex> unknown;
  std::map<Simplex, CechCertificate> certificates;

  bool contains(const Simplex& s) const;
  bool downward_closed() const;
};

/// n - 1 capped at 3 for n modules.
std::size_t default_max_dim(std::size_t n);

/// Edge {i,j} iff d_Int(U_i, U_j) <= e; higher simplices by the clique rule.
ModuleComplex rips_complex(const std::vector<GridModule>& modules, const Rational& e,
                           std::optional<std::size_t> max_dim = std::nullopt);

/// Simplices with a certified center. A simplex is tested only when all its
/// facets are present; undecided simplices are listed in unknown.
ModuleComplex cech_complex(const std::vector<GridModule>& modules, const Rational& e,
                           std::optional<std::size_t> max_dim = std::nullopt, const CechOptions& opts = {});

struct SandwichReport {
  ModuleComplex cech_e, rips_2e, cech_2e;
  std::vector<Simplex> cech_not_in_rips;
  std::vector<Simplex> rips_not_in_cech;
  bool holds() const { return cech_not_in_rips.empty() && rips_not_in_cech.empty(); }
  bool has_unknown() const { return !cech_e.unknown.empty() || !cech_2e.unknown.empty(); }
};

/// Checks Čech(e) ⊆ Rips(2e) ⊆ Čech(2e).
SandwichReport sandwich_check(const std::vector<GridModule>& modules, const Rational& e,
                              std::optional<std::size_t> max_dim = std::nullopt, const CechOptions& opts = {});

}  // namespace pm
