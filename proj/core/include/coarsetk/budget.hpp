#pragma once

#include <cstdint>
#include <string>

#include "coarsetk/exact.hpp"

namespace coarsetk {

/// Work limits for the combinatorial kernels. A checker that exhausts its
/// budget degrades to a certified bound and flags the result instead of
/// running unbounded.
struct Budget {
  i64 clique_expansions = 1'000'000;  // maximal-clique search tree nodes
  i64 coloring_nodes = 100'000;       // decomposition backtracking nodes

  /// Applies the COARSETK_BUDGET environment override. Accepts either a
  /// single integer (applied to both limits) or "cliques=N,coloring=M".
  static Budget from_env();
  static Budget from_env(Budget base);
  static Budget parse(const std::string& text, Budget base);
};

/// Mutable work counter handed down a single computation.
struct WorkMeter {
  i64 limit = 0;
  i64 used = 0;
  bool spend(i64 amount = 1) {
    used += amount;
    return used <= limit;
  }
  bool exhausted() const { return used > limit; }
};

}  // namespace coarsetk
