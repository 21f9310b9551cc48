#pragma once

#include <functional>

#include "coarsetk/budget.hpp"
#include "coarsetk/space.hpp"

namespace coarsetk {

struct CliqueEnumStats {
  i64 cliques = 0;
  i64 expansions = 0;
  bool complete = true;  // false: budget ran out, enumeration stopped early
};

/// Enumerates all inclusion-maximal subsets of diameter <= r. Equivalent to
/// maximal cliques of the graph joining points at distance <= r. Dedicated
/// paths cover interval windows (1-d lattices), boxes (linf lattices),
/// blocks (ultrametric spaces), and products of component cliques
/// (max-metric products); everything else runs pivoted Bron-Kerbosch
/// against the work budget. Deterministic emission order throughout.
CliqueEnumStats for_each_max_rclique(const Space& s, const Rat& r,
                                     const std::function<void(const PointSet&)>& sink,
                                     i64 expansion_budget);

/// Same enumeration at an exact distance-value threshold (covers the
/// irrational values arising from Euclidean lattice geometry).
CliqueEnumStats for_each_max_rclique(const Space& s, const Dist& r,
                                     const std::function<void(const PointSet&)>& sink,
                                     i64 expansion_budget);

}  // namespace coarsetk
