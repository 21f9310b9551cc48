#pragma once

#include <map>
#include <optional>

#include "coarsetk/cover.hpp"

namespace coarsetk {

// ============================================================================
// Dimension witnesses
// ============================================================================

/// What a per-scale certificate actually certifies.
struct ScaleCertificate {
  Rat r;
  // families form: n+1 r-separated families covering the space
  std::optional<DisjointFamilies> families;
  // cover form: s-multiplicity <= n+1 at scale s = r, with a Lebesgue bound
  std::optional<Cover> cover;
  std::optional<Rat> lebesgue_bound;  // certified L >= this for `cover`
  Dist control;                       // mesh at this scale
  bool verified = false;
};

/// Certified statement "this space has dimension <= n below the scale cap":
/// per-scale certificates plus the control growth table D(r) = mesh at r.
struct DimensionWitness {
  std::string space_id;
  int n = 0;
  std::vector<ScaleCertificate> scales;  // ascending r

  /// max mesh over scales <= r (monotone control table lookup)
  Dist control_at(const Rat& r) const;
};

/// Affine control fit D(r) <= c*r + d established exactly over the table.
struct ControlFit {
  Rat c;
  Rat d;
  bool holds = false;
};

ControlFit fit_linear_control(const DimensionWitness& w);

/// Builds and verifies a witness from per-scale separated families:
/// every family must be r-separated and each list must cover the space.
/// n = max family count - 1.
DimensionWitness witness_from_disjoint_families(const Space& s,
                                                const std::vector<DisjointFamilies>& per_scale);

struct ExpandReport {
  Cover cover;
  int s_multiplicity = 0;      // certified r_multiplicity at scale s
  bool lebesgue_ok = false;    // certified L >= t
  bool lebesgue_exact = true;  // exact set check vs ball certificate
  Dist mesh;                   // <= families mesh + 4t, checked
};

/// Thickens r-separated families into a cover with controlled multiplicity:
/// elements are the open 2t-neighbourhoods of the family sets. Requires
/// r >= s + 4t; the resulting s-multiplicity <= family count and Lebesgue
/// number >= t are re-verified, not assumed.
ExpandReport expand_to_lebesgue_cover(const Space& s, const DisjointFamilies& f, const Rat& scale_s,
                                      const Rat& t, const Budget& budget);

/// Witness for a max-metric product X x Y where X carries a zero-dimension
/// witness: at each shared scale the families {V x U} inherit Y's count.
DimensionWitness product_zero_dim_witness(const Space& x, const DimensionWitness& wx,
                                          const Space& y, const DimensionWitness& wy,
                                          const Space& product);

// ============================================================================
// Family generators (all outputs re-verified before use)
// ============================================================================

/// 1-d lattice: two families of alternating blocks of length max(r,1).
DisjointFamilies alternating_blocks(const Space& s, i64 r);

/// 2-d lattice: three families of staggered 3g x g bricks, g = max(r,1);
/// the staircase offset keeps same-colour bricks more than r apart.
DisjointFamilies staircase_bricks(const Space& s, i64 r);

/// m-d lattice: product of per-axis alternating blocks, 2^m families.
DisjointFamilies axis_product_blocks(const Space& s, i64 r);

/// Any space: greedy net at separation 2r+1 with nearest-centre cells,
/// greedily coloured so same-colour cells are more than r apart. The
/// family count is whatever the colouring needs (recorded, not promised).
DisjointFamilies net_families(const Space& s, i64 r);

/// Single family of the metric components at threshold r (the parts of the
/// graph joining points at distance <= r). Always r-separated and covering;
/// certifies dimension 0 exactly when component meshes stay bounded.
DisjointFamilies component_families(const Space& s, const Rat& r);

/// Picks blocks/bricks/products by lattice dimension, nets otherwise.
DisjointFamilies default_families(const Space& s, i64 r);

}  // namespace coarsetk
