#pragma once

// Brute-force reference implementations used to cross-check the library's
// combinatorial kernels. Everything here enumerates exhaustively (all 2^N
// subsets, full color assignments), so callers must keep instances tiny.
// Nothing shares logic with the library kernels beyond the exact scalar
// types; in particular no clique enumeration, no threshold-graph shortcuts,
// and no budget machinery.

#include <vector>

#include "coarsetk/cover.hpp"
#include "coarsetk/maps.hpp"
#include "coarsetk/precode.hpp"

namespace oracle {

using coarsetk::Cover;
using coarsetk::Dist;
using coarsetk::i64;
using coarsetk::MapTable;
using coarsetk::PointId;
using coarsetk::PointSet;
using coarsetk::Precode;
using coarsetk::Rat;
using coarsetk::Space;

/// Max number of cover elements met by a single subset of diameter <= r,
/// over all 2^|space| subsets. Requires |space| <= 20.
int r_multiplicity(const Space& s, const Cover& c, const Rat& r);

struct Lebesgue {
  Dist value;
  bool at_cap = false;
};

/// Largest realized distance value (or the scale cap) r such that every
/// subset of diameter <= r fits inside one element; all 2^|space| subsets.
/// Requires |space| <= 20.
Lebesgue lebesgue(const Space& s, const Cover& c);

/// Plain recursive n-colorability of a conflict graph given as an adjacency
/// matrix (no budget, no ordering heuristics).
bool n_colorable(const std::vector<std::vector<char>>& adj, int n);

/// Minimal d such that the preimage of every codomain subset of diameter
/// <= r splits into <= n parts of diameter <= d, enumerating all
/// 2^|codomain| subsets. Requires |codomain| <= 20.
Dist min_split(const Space& dom, const Space& cod, const MapTable& f, int n, const Rat& r);

/// Same value for 1-d lattice codomains via full integer windows: subsets of
/// diameter <= r are exactly the subsets of windows of span floor(r), and
/// the split requirement is monotone under inclusion, so full windows
/// suffice. Usable on larger spaces.
Dist min_split_line(const Space& dom, const Space& cod, const MapTable& f, int n, i64 r);

/// Levels-by-scan merge table: entry (u, v) is the least level holding an
/// element that contains leaves u and v jointly, computed from per-level
/// point->element tables. Levels must partition the space (checked).
/// Entry = level count when the leaves never merge.
std::vector<std::vector<int>> merge_levels(const Space& base, const Precode& p);

}  // namespace oracle
