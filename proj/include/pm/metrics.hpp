#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pm/decomposition.hpp"
#include "pm/module.hpp"

namespace pm {

/// Thrown when an exhaustive search would exceed its enumeration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A partial matching between two diagrams; unmatched bars go to the diagonal.
struct Matching {
  std::vector<std::pair<Bar, Bar>> pairs;
  std::vector<Bar> unmatched_first;
  std::vector<Bar> unmatched_second;
};

/// max(|b - b'|, |d - d'|) with inf - inf = 0.
ExtRational matching_cost(const Bar& a, const Bar& b);
/// (d - b) / 2, infinite for essential bars.
ExtRational diagonal_cost(const Bar& a);
ExtRational matching_cost(const Matching& m);

struct BottleneckResult {
  ExtRational distance;
  Matching matching;
};

/// Exact bottleneck distance: binary search over candidate costs with a
/// Hopcroft-Karp perfect matching test at each threshold.
BottleneckResult bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2);
inline ExtRational bottleneck_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
  return bottleneck(d1, d2).distance;
}

/// d_Int via the isometry with the bottleneck distance. Throws on prime mismatch.
ExtRational interleaving_distance(const GridModule& u, const GridModule& v);

struct OracleOptions {
  /// Maximum number of candidate Phi (p^dim Hom(U, V T_e)).
  std::uint64_t budget = std::uint64_t{1} << 20;
  /// 0 picks PM_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

struct Interleaving {
  ModuleMorphism phi;  // U -> V T_e
  ModuleMorphism psi;  // V -> U T_e
};

/// Decides whether U and V are e-interleaved by enumerating Phi in
/// Hom(U, V T_e) and solving the (then linear) equations for Psi. The
/// witness returned is the first success in enumeration order, independent
/// of the thread count; equal modules get the structure maps U(s <= s + e)
/// without a search. Throws BudgetExceeded.
std::optional<Interleaving> interleaving_oracle(const GridModule& u, const GridModule& v, const Rational& e,
                                                const OracleOptions& opts = {});

/// Candidate values {0} ∪ {|g - g'|, |g - g'|/2} over the grids of u and v.
std::vector<Rational> oracle_candidates(const GridModule& u, const GridModule& v);

/// Smallest candidate e at which interleaving_oracle succeeds (binary search,
/// feasibility being monotone in e); infinite if none does.
ExtRational oracle_distance(const GridModule& u, const GridModule& v, const OracleOptions& opts = {});

unsigned default_thread_count();

}  // namespace pm
