#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarsetk/budget.hpp"
#include "coarsetk/space.hpp"

namespace coarsetk {

// ============================================================================
// Cover
// ============================================================================

/// A validated finite cover: nonempty sorted elements over one space.
/// `covers_space` records whether the union is the whole space; partial
/// covers arise only as images of maps and are flagged, never assumed.
class Cover {
public:
  static Cover make(const Space& s, std::vector<PointSet> elements, bool require_cover = true);

  const std::string& space_id() const { return space_id_; }
  const std::vector<PointSet>& elements() const { return elements_; }
  size_t size() const { return elements_.size(); }
  const PointSet& element(size_t i) const { return elements_[i]; }
  bool covers_space() const { return covers_space_; }

  /// Element ids incident to a point, ascending.
  const std::vector<std::int32_t>& incident(PointId p) const { return incident_[p]; }

  Dist element_diameter(size_t i) const { return elem_diam_[i]; }
  /// Largest element diameter.
  Dist mesh() const { return mesh_; }
  /// Largest number of elements sharing a single point.
  int multiplicity() const { return multiplicity_; }
  /// True when no two distinct elements share a point.
  bool pairwise_disjoint() const { return multiplicity_ <= 1; }

private:
  std::string space_id_;
  std::vector<PointSet> elements_;
  std::vector<std::vector<std::int32_t>> incident_;
  std::vector<Dist> elem_diam_;
  Dist mesh_;
  int multiplicity_ = 0;
  bool covers_space_ = false;
};

void require_same_space(const Space& s, const Cover& c);

// ============================================================================
// Scaled invariants
// ============================================================================

struct RMultiplicityResult {
  int value = 0;          // exact value, or best lower bound if !exact
  bool exact = true;
  PointSet witness;       // subset realizing `value`
  std::vector<std::int32_t> witness_elements;
  i64 expansions = 0;
};

/// Largest number of elements met by a single subset of diameter <= r.
/// Exceeding the clique budget degrades to a certified lower bound from
/// greedily grown subsets, flagged via `exact == false`.
RMultiplicityResult r_multiplicity(const Space& s, const Cover& c, const Rat& r,
                                   const Budget& budget);

enum class LebesgueMode {
  exact,            // sup r: every subset of diameter <= r fits in one element
  ball_certificate  // sup r: every closed ball of radius r fits in one element
};

struct LebesgueResult {
  Dist value;
  bool at_cap = false;        // even r = scale_cap passes; value = scale_cap
  LebesgueMode mode_used = LebesgueMode::exact;
  bool exact = true;          // false: budget forced the ball-certificate mode
  PointSet witness_bad_set;   // minimal failing probe (empty when at_cap)
};

/// Largest scale below which every small set (or ball) fits inside a single
/// cover element. Computed by binary search over the realized distance
/// values; the cover must cover the space.
LebesgueResult lebesgue_number(const Space& s, const Cover& c, LebesgueMode mode,
                               const Budget& budget);

/// Single-threshold probe: does the cover absorb every set (exact mode) or
/// every closed ball (certificate mode) of diameter/radius <= r?
/// `exact_used` reports whether the exact mode completed within budget.
bool lebesgue_at_least(const Space& s, const Cover& c, const Rat& r, LebesgueMode mode,
                       const Budget& budget, bool* exact_used = nullptr, PointSet* bad = nullptr);

struct DisjointnessReport {
  bool ok = true;
  // counterexample when !ok:
  std::int32_t elem_a = -1, elem_b = -1;
  PointId point_a = -1, point_b = -1;
  Dist distance;
};

/// Checks that distinct sets of `family` are pairwise more than r apart.
DisjointnessReport is_r_disjoint(const Space& s, const std::vector<PointSet>& family, const Rat& r);

/// One list of r-separated families that jointly cover the space.
struct DisjointFamilies {
  std::string space_id;
  Rat r;
  std::vector<std::vector<PointSet>> families;

  size_t family_count() const { return families.size(); }
};

struct FamiliesReport {
  bool ok = true;
  std::string failure;
  DisjointnessReport disjointness;  // first violation
  Dist mesh;                        // max set diameter across families
};

/// Validates r-disjointness of every family plus joint coverage.
FamiliesReport validate_families(const Space& s, const DisjointFamilies& f);

/// Flattens the families into a cover (requires joint coverage).
Cover families_to_cover(const Space& s, const DisjointFamilies& f);

/// Image cover {f(U)} on the codomain. covers_space iff f is surjective.
Cover pushforward(const Space& domain, const Space& codomain, const Cover& c,
                  const std::vector<PointId>& map_table);

/// True when every element of `fine` is contained in some element of `coarse`.
bool refines(const Cover& fine, const Cover& coarse);

}  // namespace coarsetk
