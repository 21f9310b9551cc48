#pragma once

#include "coarsetk/cover.hpp"
#include "coarsetk/maps.hpp"

namespace coarsetk {

// ============================================================================
// Nested level structures
// ============================================================================

enum class PrecodeKind { plain, an };

/// Leveled sequence of covers with unique parents: level 0 first, the top
/// level a single element covering the space. The `an` kind additionally
/// promises mesh(levels[i]) <= base^i for i >= i0 and carries the measured
/// scheduling constants (c, r0).
struct Precode {
  std::string space_id;
  std::vector<Cover> levels;
  std::vector<std::vector<std::int32_t>> parent;  // parent[i][e] -> element at level i+1
  PrecodeKind kind = PrecodeKind::plain;
  i64 base = 3;  // quotient distance between leaves is base^(first shared level)
  int i0 = 0;
  Rat an_c{0};
  Rat an_r0{0};
};

struct PrecodeReport {
  bool ok = true;
  std::string failure;
  bool levels_disjoint = true;           // recorded, not required
  std::vector<Dist> level_mesh;
  std::vector<std::pair<Rat, int>> schedule;  // r -> least level with r-multiplicity <= n
  bool exact = true;                     // every multiplicity decision completed in budget
};

/// Verifies: levels cover the space, each element has exactly one containing
/// element one level up (matching `parent`), the top level is one element,
/// and every scheduled scale admits a level with r-multiplicity <= n. For
/// the `an` kind additionally mesh(levels[i]) <= base^i for i >= i0 and the
/// (c, r0) schedule: for every scheduled r >= r0 some level has
/// base^i <= c * r and r-multiplicity <= n.
PrecodeReport validate_precode(const Space& s, const Precode& p, int n, const Budget& budget);

// ============================================================================
// Quotient ultrametric
// ============================================================================

struct UltraBuild {
  Space space;               // points = level-0 elements, d = base^(merge level)
  bool chain_method = true;  // parent chains used (valid for disjoint levels)
  bool divergence = false;   // brute-force merge levels differed from chains
};

/// Distance between level-0 elements V, W: base^p with p the least level
/// holding an element containing V and W jointly. Disjoint levels use
/// parent chains (provably the same); overlapping levels are computed by
/// brute force, compared against the chains, and rejected if the strong
/// triangle inequality fails.
UltraBuild build_ultrametric(const Space& s, const Precode& p);

struct QuotientCheck {
  MapTable q;                    // quotient space -> base space
  std::vector<PointId> chosen;   // selected representative per leaf
  bool displacement_ok = false;  // d(qU, qV) <= mesh(levels[k]) whenever d(U,V) <= base^k
};

/// Sends each level-0 element to a chosen point inside it (default: its
/// minimum point). The displacement property backing coarseness of q is
/// verified exhaustively over leaf pairs.
QuotientCheck quotient_map(const Space& s, const Precode& p, const Space& ultra,
                           const std::vector<PointId>* selector = nullptr);

/// g(x) = the lowest-index level-0 element containing x, as a map into the
/// quotient. Requires the structure to validate with n = 1.
MapTable inverse_section(const Space& s, const Precode& p, const Space& ultra,
                         const Budget& budget);

// ============================================================================
// Stock examples
// ============================================================================

struct PrecodeExample {
  Space space;
  Precode precode;
};

/// [0, n-1] with levels of aligned blocks of size 2^i; n a power of two.
PrecodeExample example_dyadic(i64 n);

/// Symmetric integer interval with levels of 3^k-blocks at the classic
/// offset starts; k runs until a single clipped element covers the space.
/// `an_kind` tags the same structure with base-3 mesh constants.
PrecodeExample example_triadic(int k, bool an_kind = false);

/// b^l points at coordinates sum(digit_k * s^k): nested clusters, level
/// j grouping runs of b^(j+1) leaves. Validates with n = 1 when the
/// spread s dominates the cluster diameters.
PrecodeExample example_clusters(i64 b, int l, i64 s);

}  // namespace coarsetk
