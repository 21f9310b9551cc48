#pragma once

#include <optional>

#include "coarsetk/cover.hpp"

namespace coarsetk {

// ============================================================================
// Map tables and moduli
// ============================================================================

/// Total function between two loaded spaces, given pointwise.
struct MapTable {
  std::string domain_id;
  std::string codomain_id;
  std::vector<PointId> table;  // table[x] = f(x), one entry per domain point

  PointId operator()(PointId x) const { return table[static_cast<size_t>(x)]; }
};

/// Validates sizes/ranges and returns the table.
MapTable make_map(const Space& domain, const Space& codomain, std::vector<PointId> table);
MapTable identity_map(const Space& s);
/// g after f (f: X -> Y, g: Y -> Z).
MapTable compose(const Space& x, const Space& y, const Space& z, const MapTable& f,
                 const MapTable& g);
/// (f x g)(a, b) = (f a, g b) between max-metric products.
MapTable product_map(const Space& x, const Space& y, const MapTable& f, const Space& z,
                     const Space& w, const MapTable& g, const Space& xz, const Space& yw);
bool is_surjective(const Space& codomain, const MapTable& f);

struct ModulusRow {
  Dist r;      // realized distance key
  Dist value;  // table value at r
};

/// Exact upper-expansion (delta), lower-separation (gamma) and properness
/// tables over the realized distance grid, plus dominating fitted forms.
/// The fits are chosen from rational upper bounds but their dominance over
/// every point pair is re-verified exactly; `lipschitz_exact` records
/// whether the constant itself is exactly the max ratio.
struct MapRecord {
  MapTable map;
  std::vector<ModulusRow> delta;       // d_Y(fx, fx') <= delta(d_X(x, x')), nondecreasing
  std::vector<ModulusRow> gamma;       // d_Y(fx, fx') >= gamma(d_X(x, x')), nondecreasing
  std::vector<ModulusRow> properness;  // diam f^-1(A) <= properness(diam A), nondecreasing

  Rat lipschitz;              // minimal verified c with d_Y <= c * d_X
  bool lipschitz_exact = true;
  Rat affine_c, affine_b;     // verified d_Y <= c * d_X + b with asymptotic slope first
  bool quasi_isometric = false;  // additionally d_X <= affine_c * d_Y + qi_b verified
  Rat qi_b;

  /// Largest delta row at keys <= r (0 when none).
  Dist delta_at(const Rat& r) const;
};

MapRecord fit_moduli(const Space& domain, const Space& codomain, const MapTable& f);

/// Smallest S with d_Y(f x, g x) <= S for all x (exists on finite spaces).
Dist check_close(const Space& domain, const Space& codomain, const MapTable& f, const MapTable& g);

/// Closeness certificates for f: X -> Y, g: Y -> X in both composite
/// directions, plus both moduli records. On finite spaces the maps are
/// always bornologous; `within_cap` records whether both closeness
/// constants stay below the respective scale caps.
struct EquivalenceReport {
  Dist s_on_codomain;  // d_Y(f(g(y)), y) max
  Dist s_on_domain;    // d_X(g(f(x)), x) max
  MapRecord record_f;
  MapRecord record_g;
  bool within_cap = false;
};

EquivalenceReport check_coarse_equivalence(const Space& x, const Space& y, const MapTable& f,
                                           const MapTable& g);

// ============================================================================
// Fiber-decomposition conditions
// ============================================================================

/// Minimal d such that the preimage of every codomain subset of diameter
/// <= r decomposes into at most n parts of diameter <= d. `exact` means
/// both the subset enumeration and every colorability decision completed
/// within budget; otherwise [d_lower, d_upper] brackets the answer.
struct BnResult {
  int n = 1;
  Rat r;
  Dist d_lower;
  Dist d_upper;
  bool exact = true;
  bool minimal = true;  // some B fails at the next smaller candidate (or d = 0)
  PointSet worst_b;                      // codomain subset forcing d_lower
  std::vector<PointSet> decomposition;   // parts of its preimage, diam <= d_upper
  i64 clique_expansions = 0;
  i64 coloring_nodes = 0;

  Dist d() const { return d_upper; }
};

BnResult check_bn(const Space& domain, const Space& codomain, const MapTable& f, int n,
                  const Rat& r, const Budget& budget);

/// Sweep of check_bn over the geometric scale schedule with two dominating
/// normal forms: d(r) <= c * r for all scheduled r >= r0 (minimal c over the
/// grid, then least feasible r0), and d(r) <= c_affine * r + d_affine for
/// every scheduled r.
struct CnResult {
  int n = 1;
  std::vector<std::pair<Rat, BnResult>> schedule;  // ascending r
  Rat c;
  Rat r0;
  bool holds = false;  // false only if every r0 fails (cannot happen when exact)
  Rat c_affine, d_affine;
  bool exact = true;
};

CnResult check_cn(const Space& domain, const Space& codomain, const MapTable& f, int n,
                  const Budget& budget);

/// g after f with the product certificate: parts = n * m and predicted
/// d = d_f(d_g(r)) for diameter-r codomain subsets, then re-verified
/// (the checker may certify a smaller d; `check.d_upper <= d_predicted`).
struct BnCompose {
  MapTable map;
  int parts = 1;
  Dist d_predicted;
  BnResult check;
};

BnCompose compose_bn(const Space& x, const Space& y, const Space& z, const MapTable& f, int n,
                     const MapTable& g, int m, const Rat& r, const Budget& budget);

/// f x g with parts = n * m and the conservative prediction
/// d = d_f(r) + d_g(r) (sum recorded even though the max metric only needs
/// the max), re-verified on the product.
BnCompose product_bn(const Space& x, const Space& y, const MapTable& f, int n, const Space& z,
                     const Space& w, const MapTable& g, int m, const Space& xz, const Space& yw,
                     const Rat& r, const Budget& budget);

/// Linear-preimage-selection condition: minimal d such that for every
/// scheduled r and every codomain subset B of diameter <= r some A with
/// f(A) = B has diam(A) <= d * r. Requires surjectivity.
struct BLinearResult {
  std::vector<std::pair<Rat, Dist>> schedule;  // r -> minimal selection diameter
  Rat d;          // max over schedule of value / r (rational upper bound)
  bool exact = true;
  Rat binding_r;  // scale realizing d
};

BLinearResult check_b_linear(const Space& domain, const Space& codomain, const MapTable& f,
                             const Budget& budget);

}  // namespace coarsetk
