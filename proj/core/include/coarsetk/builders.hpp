#pragma once

#include <memory>

#include "coarsetk/precode.hpp"
#include "coarsetk/witness.hpp"

namespace coarsetk {

// ============================================================================
// Control-cover providers
// ============================================================================

/// Factory for covers with a controlled multiplicity / Lebesgue trade-off:
/// a request (s, t) yields a cover with s-multiplicity at most the provider's
/// family count and Lebesgue number at least t. Every returned cover carries
/// its verification (an ExpandReport); claims are re-checked, never assumed.
class ControlCoverProvider {
 public:
  virtual ~ControlCoverProvider() = default;

  virtual std::string kind() const = 0;

  /// Verified cover for the request; throws validation_error when a claim
  /// fails (with the violating subset) and budget_error when verification
  /// could not be completed exactly.
  virtual ExpandReport cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                                 const Budget& budget) const = 0;

  /// Mesh-growth constants (c, d) with mesh(cover_for(s, t)) <= c*(s+4t) + d,
  /// measured from probe outputs and clamped to integers with c >= d >= 2 so
  /// the derived ultrametric base 14c stays integral. Empty when the provider
  /// makes no such claim; the claim is re-verified on every later request.
  virtual std::optional<std::pair<Rat, Rat>> an_constants(const Space& s,
                                                          const Budget& budget) const {
    (void)s;
    (void)budget;
    return std::nullopt;
  }
};

/// Lattice provider: alternating blocks / staggered bricks / axis products at
/// separation ceil(s + 4t), thickened into a Lebesgue cover.
class BrickProvider final : public ControlCoverProvider {
 public:
  std::string kind() const override { return "grid-brick"; }
  ExpandReport cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                         const Budget& budget) const override;
  std::optional<std::pair<Rat, Rat>> an_constants(const Space& s,
                                                  const Budget& budget) const override;
};

/// Generic provider: greedy nets with nearest-centre cells; the family count
/// is whatever the colouring needs, so requests may be rejected downstream
/// when that count exceeds the caller's n + 1.
class NetProvider final : public ControlCoverProvider {
 public:
  std::string kind() const override { return "greedy-net"; }
  ExpandReport cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                         const Budget& budget) const override;
};

/// Zero-dimension provider: single family of metric components at threshold
/// s + 4t. Multiplicity is always 1; meshes stay bounded exactly when the
/// space really is zero-dimensional at the requested scales.
class ComponentProvider final : public ControlCoverProvider {
 public:
  std::string kind() const override { return "component"; }
  ExpandReport cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                         const Budget& budget) const override;
};

/// Preloaded covers keyed by claimed (s, t) guarantees. Each request picks
/// the first entry whose claim dominates it and re-verifies both the
/// multiplicity and the Lebesgue claim against the actual request; a failed
/// Lebesgue claim is rejected with the violating subset.
class TableProvider final : public ControlCoverProvider {
 public:
  struct Entry {
    Rat s;
    Rat t;
    int claimed_multiplicity = 0;
    Cover cover;
  };

  void add(Entry e) { entries_.push_back(std::move(e)); }

  std::string kind() const override { return "table"; }
  ExpandReport cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                         const Budget& budget) const override;

 private:
  std::vector<Entry> entries_;
};

/// Provider by name: grid-brick, greedy-net, component.
std::unique_ptr<ControlCoverProvider> make_provider(const std::string& kind);

// ============================================================================
// Inductive precode builders
// ============================================================================

/// One merge step of the inductive construction, with its verification.
struct LevelBuildRecord {
  int level = 0;  // index of the level this step produced
  Rat s;          // multiplicity scale requested from the provider
  Rat t;          // Lebesgue bound requested from the provider
  Rat ball_radius;
  std::int32_t alpha = -1;        // provider element absorbing the ball
  std::vector<std::int32_t> tau;  // assignment per previous-level element
  size_t provider_elements = 0;
  Dist mesh;       // of the produced level
  Rat mesh_bound;  // verified bound on that mesh
  Rat scale;       // scale of the verified multiplicity below
  int multiplicity = 0;
  std::vector<std::string> checks;  // transcript; every line passed
};

struct BuilderTrace {
  std::string provider;
  PointId x0 = 0;
  int n = 0;
  bool absorbed = false;  // the top level reached a single element
  std::vector<LevelBuildRecord> levels;
};

struct BuiltPrecode {
  Precode precode;
  BuilderTrace trace;
};

/// Inductive (n+1)-precode construction: level 0 is the singleton cover; step
/// k+1 requests a provider cover at s = (k+1) + 2*mesh(level k), t = 2(k+1),
/// then merges level-k elements toward provider elements via tau (elements
/// meeting the ball-absorbing element first, smallest incident index
/// otherwise). After each step five properties are re-verified exactly:
/// mesh <= 2*mesh(level k) + provider mesh, (k+1)-multiplicity <= n+1,
/// disjointness, nesting under the recorded parents, and containment of the
/// closed ball B(x0, k+1) in one element. Stops once a level is a single
/// element or after level_cap merge steps (at least one step always runs).
BuiltPrecode build_precode_asdim(const Space& s, int n, const ControlCoverProvider& provider,
                                 PointId x0, int level_cap, const Budget& budget);

/// Variant with geometric scales: step k+1 uses s = 3^k + 2*(14c)^k and
/// t = 2*3^k with (c, d) the provider's verified mesh-growth constants, the
/// ball radius is (3^(k+1) - 1)/3, and each level additionally verifies
/// mesh(level i) <= (14c)^i. The result carries the `an` kind with base 14c
/// and the measured scheduling constants (c, r0) over the realized scales.
BuiltPrecode build_precode_an(const Space& s, int n, const ControlCoverProvider& provider,
                              PointId x0, int level_cap, const Budget& budget);

}  // namespace coarsetk
