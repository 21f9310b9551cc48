#include "coarsetk/builders.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace coarsetk {

namespace {

Rat rat_upper(const Dist& d) {
  bool exact = true;
  return Dist::ratio_upper(d, Dist::integer(1), &exact);
}

bool subset(const PointSet& inner, const PointSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::string points_brief(const PointSet& pts) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < pts.size() && i < 8; ++i) {
    if (i) os << ',';
    os << pts[i];
  }
  if (pts.size() > 8) os << ",..." << (pts.size() - 8) << " more";
  os << '}';
  return os.str();
}

}  // namespace

// ============================================================================
// Providers
// ============================================================================

ExpandReport BrickProvider::cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                                      const Budget& budget) const {
  if (!s.is_lattice()) throw validation_error("grid-brick provider requires a lattice space");
  i64 sep = (scale_s + t * Rat(4)).ceil();
  DisjointFamilies fam = default_families(s, sep);
  return expand_to_lebesgue_cover(s, fam, scale_s, t, budget);
}

std::optional<std::pair<Rat, Rat>> BrickProvider::an_constants(const Space& s,
                                                               const Budget& budget) const {
  // Probe the generator along a small request ladder shaped like the real
  // requests (s_j = 3^j + 2*4^j, t_j = 2*3^j) and take the worst realized
  // mesh/(s+4t) ratio, rounded up to an integer and clamped to >= d = 2.
  Rat d(2);
  Rat worst(0);
  for (int j = 0; j < 4; ++j) {
    Rat sj = Rat(pow_checked(3, j)) + Rat(2) * Rat(pow_checked(4, j));
    Rat tj = Rat(2 * pow_checked(3, j));
    ExpandReport rep = cover_for(s, sj, tj, budget);
    Rat ratio = rat_upper(rep.mesh) / (sj + tj * Rat(4));
    if (ratio > worst) worst = ratio;
  }
  i64 c = std::max<i64>(2, worst.ceil());
  return std::make_pair(Rat(c), d);
}

ExpandReport NetProvider::cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                                    const Budget& budget) const {
  i64 sep = (scale_s + t * Rat(4)).ceil();
  DisjointFamilies fam = net_families(s, sep);
  return expand_to_lebesgue_cover(s, fam, scale_s, t, budget);
}

ExpandReport ComponentProvider::cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                                          const Budget& budget) const {
  DisjointFamilies fam = component_families(s, scale_s + t * Rat(4));
  return expand_to_lebesgue_cover(s, fam, scale_s, t, budget);
}

ExpandReport TableProvider::cover_for(const Space& s, const Rat& scale_s, const Rat& t,
                                      const Budget& budget) const {
  for (const Entry& e : entries_) {
    if (!(e.s >= scale_s) || !(e.t >= t)) continue;
    require_same_space(s, e.cover);
    if (!e.cover.covers_space())
      throw validation_error("preloaded cover does not cover the space");
    RMultiplicityResult mul = r_multiplicity(s, e.cover, scale_s, budget);
    if (!mul.exact)
      throw budget_error("preloaded cover multiplicity verification exceeded the clique budget");
    if (mul.value > e.claimed_multiplicity)
      throw validation_error("preloaded cover claim failed: " + scale_s.str() +
                             "-multiplicity is " + std::to_string(mul.value) + " > claimed " +
                             std::to_string(e.claimed_multiplicity) + ", witnessed by " +
                             points_brief(mul.witness));
    bool exact_used = true;
    PointSet bad;
    if (!lebesgue_at_least(s, e.cover, t, LebesgueMode::exact, budget, &exact_used, &bad))
      throw validation_error("preloaded cover claim failed: Lebesgue number below " + t.str() +
                             ", the subset " + points_brief(bad) +
                             " fits in no single element");
    ExpandReport rep;
    rep.cover = e.cover;
    rep.s_multiplicity = mul.value;
    rep.lebesgue_ok = true;
    rep.lebesgue_exact = exact_used;
    rep.mesh = e.cover.mesh();
    return rep;
  }
  throw validation_error("no preloaded cover dominates the request (s=" + scale_s.str() +
                         ", t=" + t.str() + ")");
}

std::unique_ptr<ControlCoverProvider> make_provider(const std::string& kind) {
  if (kind == "grid-brick" || kind == "brick") return std::make_unique<BrickProvider>();
  if (kind == "greedy-net" || kind == "net") return std::make_unique<NetProvider>();
  if (kind == "component" || kind == "components") return std::make_unique<ComponentProvider>();
  throw validation_error("unknown provider kind: " + kind);
}

// ============================================================================
// Inductive merge step
// ============================================================================

namespace {

struct StepPlan {
  Rat s;            // multiplicity scale requested from the provider
  Rat t;            // Lebesgue bound requested from the provider
  Rat radius;       // ball radius; also the scale of the new level's check
  std::optional<Rat> mesh_cap;             // absolute mesh bound (AN kind)
  std::optional<std::pair<Rat, Rat>> an_cd;  // provider mesh claim to verify
};

LevelBuildRecord merge_step(const Space& sp, std::vector<Cover>& levels,
                            std::vector<std::vector<std::int32_t>>& parents,
                            const ControlCoverProvider& provider, PointId x0, int n,
                            const Budget& budget, const StepPlan& plan) {
  const Cover& prev = levels.back();
  LevelBuildRecord rec;
  rec.level = static_cast<int>(levels.size());
  rec.s = plan.s;
  rec.t = plan.t;
  rec.ball_radius = plan.radius;
  rec.scale = plan.radius;

  ExpandReport rep = provider.cover_for(sp, plan.s, plan.t, budget);
  rec.provider_elements = rep.cover.size();
  if (rep.s_multiplicity > n + 1)
    throw validation_error("provider claim failed: cover for (s=" + plan.s.str() + ", t=" +
                           plan.t.str() + ") has s-multiplicity " +
                           std::to_string(rep.s_multiplicity) + " > " + std::to_string(n + 1));
  rec.checks.push_back("provider " + plan.s.str() + "-multiplicity " +
                       std::to_string(rep.s_multiplicity) + " <= " + std::to_string(n + 1));
  if (plan.an_cd) {
    const auto& [c, d] = *plan.an_cd;
    Rat s4t = plan.s + plan.t * Rat(4);
    if (!(rep.mesh <= c * s4t + d))
      throw validation_error("provider claim failed: mesh " + rep.mesh.str() +
                             " > c*(s+4t)+d = " + (c * s4t + d).str());
    rec.checks.push_back("provider mesh " + rep.mesh.str() + " <= c*(s+4t)+d = " +
                         (c * s4t + d).str());
  }

  // ball-absorbing element: smallest index containing the closed ball
  PointSet b = ball(sp, x0, plan.radius);
  std::int32_t alpha = -1;
  for (std::int32_t e : rep.cover.incident(x0)) {
    if (subset(b, rep.cover.element(static_cast<size_t>(e)))) {
      alpha = e;
      break;
    }
  }
  if (alpha < 0)
    throw validation_error("provider claim failed: no element contains the closed ball of radius " +
                           plan.radius.str() + " around point " + std::to_string(x0) + " = " +
                           points_brief(b));
  rec.alpha = alpha;
  rec.checks.push_back("closed ball B(" + std::to_string(x0) + ", " + plan.radius.str() +
                       ") inside provider element " + std::to_string(alpha));

  // tau: toward alpha when touching it, else the smallest incident index
  rec.tau.resize(prev.size());
  for (size_t e = 0; e < prev.size(); ++e) {
    std::int32_t best = -1;
    bool meets_alpha = false;
    for (PointId p : prev.element(e)) {
      const auto& inc = rep.cover.incident(p);
      if (!meets_alpha && std::binary_search(inc.begin(), inc.end(), alpha)) meets_alpha = true;
      if (!inc.empty() && (best < 0 || inc.front() < best)) best = inc.front();
      if (meets_alpha) break;
    }
    rec.tau[e] = meets_alpha ? alpha : best;
  }

  // merge previous-level elements by tau, ascending target index
  std::map<std::int32_t, std::vector<size_t>> groups;
  for (size_t e = 0; e < prev.size(); ++e) groups[rec.tau[e]].push_back(e);
  std::vector<PointSet> elems;
  std::vector<std::int32_t> parent_row(prev.size(), -1);
  std::int32_t alpha_class = -1;
  for (const auto& [beta, members] : groups) {
    PointSet u;
    for (size_t e : members) {
      const PointSet& w = prev.element(e);
      u.insert(u.end(), w.begin(), w.end());
      parent_row[e] = static_cast<std::int32_t>(elems.size());
    }
    std::sort(u.begin(), u.end());
    if (beta == alpha) alpha_class = static_cast<std::int32_t>(elems.size());
    elems.push_back(std::move(u));
  }
  Cover next = Cover::make(sp, std::move(elems));

  // (1) mesh: chain bound always, absolute cap for the AN kind
  Rat chain = rat_upper(prev.mesh()) * Rat(2) + rat_upper(rep.mesh);
  if (!(next.mesh() <= chain))
    throw validation_error("level mesh " + next.mesh().str() +
                           " exceeds 2*mesh(previous) + mesh(provider) = " + chain.str());
  rec.checks.push_back("mesh " + next.mesh().str() + " <= 2*" + prev.mesh().str() + " + " +
                       rep.mesh.str());
  rec.mesh_bound = chain;
  if (plan.mesh_cap) {
    if (!(next.mesh() <= *plan.mesh_cap))
      throw validation_error("level mesh " + next.mesh().str() + " exceeds the geometric bound " +
                             plan.mesh_cap->str());
    rec.checks.push_back("mesh " + next.mesh().str() + " <= " + plan.mesh_cap->str());
    rec.mesh_bound = *plan.mesh_cap;
  }

  // (2) multiplicity at the level's own scale
  RMultiplicityResult mul = r_multiplicity(sp, next, plan.radius, budget);
  if (!mul.exact)
    throw budget_error("level multiplicity verification exceeded the clique budget");
  if (mul.value > n + 1)
    throw validation_error("built level has " + plan.radius.str() + "-multiplicity " +
                           std::to_string(mul.value) + " > " + std::to_string(n + 1) +
                           ", witnessed by " + points_brief(mul.witness));
  rec.multiplicity = mul.value;
  rec.checks.push_back(plan.radius.str() + "-multiplicity " + std::to_string(mul.value) +
                       " <= " + std::to_string(n + 1));

  // (3) disjointness
  if (!next.pairwise_disjoint())
    throw validation_error("built level elements overlap");
  rec.checks.push_back("elements pairwise disjoint");

  // (4) nesting under the recorded parents
  for (size_t e = 0; e < prev.size(); ++e)
    if (parent_row[e] < 0 ||
        !subset(prev.element(e), next.element(static_cast<size_t>(parent_row[e]))))
      throw validation_error("element " + std::to_string(e) +
                             " is not inside its recorded parent");
  rec.checks.push_back("every element nests inside its recorded parent");

  // (5) the ball lands inside the merged alpha class
  if (alpha_class < 0 || !subset(b, next.element(static_cast<size_t>(alpha_class))))
    throw validation_error("closed ball B(" + std::to_string(x0) + ", " + plan.radius.str() +
                           ") is not inside the merged element of index " +
                           std::to_string(alpha_class));
  rec.checks.push_back("ball contained in merged element " + std::to_string(alpha_class));

  rec.mesh = next.mesh();
  levels.push_back(std::move(next));
  parents.push_back(std::move(parent_row));
  return rec;
}

std::vector<Cover> singleton_level(const Space& sp) {
  std::vector<PointSet> singles(sp.size());
  for (PointId p = 0; p < sp.size(); ++p) singles[static_cast<size_t>(p)] = {p};
  std::vector<Cover> levels;
  levels.push_back(Cover::make(sp, std::move(singles)));
  return levels;
}

void check_build_args(const Space& sp, int n, PointId x0, int level_cap) {
  if (n < 0) throw validation_error("dimension target must be nonnegative");
  if (level_cap < 1) throw validation_error("level cap must be at least 1");
  if (x0 < 0 || x0 >= sp.size()) throw validation_error("base point out of range");
}

/// Least level whose r-multiplicity is certified <= parts. Levels with at
/// most `parts` elements qualify outright; otherwise cheap ball probes
/// reject crowded levels before the exact clique check runs.
int min_level_for(const Space& sp, const std::vector<Cover>& levels, const Rat& r, int parts,
                  const Budget& budget) {
  for (size_t i = 0; i < levels.size(); ++i) {
    const Cover& c = levels[i];
    if (static_cast<int>(c.size()) <= parts) return static_cast<int>(i);
    bool rejected = false;
    for (PointId probe : {PointId(0), static_cast<PointId>(sp.size() / 2),
                          static_cast<PointId>(sp.size() - 1)}) {
      PointSet b = ball(sp, probe, r / Rat(2));
      std::vector<char> seen(c.size(), 0);
      int cnt = 0;
      for (PointId p : b)
        for (std::int32_t e : c.incident(p))
          if (!seen[static_cast<size_t>(e)]) {
            seen[static_cast<size_t>(e)] = 1;
            ++cnt;
          }
      if (cnt > parts) {
        rejected = true;
        break;
      }
    }
    if (rejected) continue;
    RMultiplicityResult m = r_multiplicity(sp, c, r, budget);
    if (!m.exact) {
      if (m.value > parts) continue;
      throw budget_error("schedule measurement exceeded the clique budget");
    }
    if (m.value <= parts) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

// ============================================================================
// Builders
// ============================================================================

BuiltPrecode build_precode_asdim(const Space& sp, int n, const ControlCoverProvider& provider,
                                 PointId x0, int level_cap, const Budget& budget) {
  check_build_args(sp, n, x0, level_cap);
  BuiltPrecode out;
  out.trace.provider = provider.kind();
  out.trace.x0 = x0;
  out.trace.n = n;

  std::vector<Cover> levels = singleton_level(sp);
  std::vector<std::vector<std::int32_t>> parents;
  for (;;) {
    int k = static_cast<int>(levels.size()) - 1;
    if (k >= level_cap) break;
    StepPlan plan;
    plan.s = Rat(k + 1) + rat_upper(levels.back().mesh()) * Rat(2);
    plan.t = Rat(2 * (k + 1));
    plan.radius = Rat(k + 1);
    out.trace.levels.push_back(merge_step(sp, levels, parents, provider, x0, n, budget, plan));
    if (levels.back().size() == 1) break;
  }
  out.trace.absorbed = levels.back().size() == 1;

  out.precode.space_id = sp.id();
  out.precode.levels = std::move(levels);
  out.precode.parent = std::move(parents);
  out.precode.kind = PrecodeKind::plain;
  return out;
}

BuiltPrecode build_precode_an(const Space& sp, int n, const ControlCoverProvider& provider,
                              PointId x0, int level_cap, const Budget& budget) {
  check_build_args(sp, n, x0, level_cap);
  auto cd = provider.an_constants(sp, budget);
  if (!cd)
    throw validation_error("provider '" + provider.kind() +
                           "' makes no mesh-growth claim (c, d)");
  const Rat& c = cd->first;
  const Rat& d = cd->second;
  if (!c.is_integer() || !d.is_integer() || !(c >= d) || !(d >= Rat(2)))
    throw validation_error("mesh-growth constants must be integers with c >= d >= 2, got c=" +
                           c.str() + " d=" + d.str());
  i64 base = 14 * c.num();

  BuiltPrecode out;
  out.trace.provider = provider.kind();
  out.trace.x0 = x0;
  out.trace.n = n;

  std::vector<Cover> levels = singleton_level(sp);
  std::vector<std::vector<std::int32_t>> parents;
  for (;;) {
    int k = static_cast<int>(levels.size()) - 1;
    if (k >= level_cap) break;
    i64 p3 = pow_checked(3, k);
    StepPlan plan;
    plan.s = Rat(p3) + Rat(2) * Rat(pow_checked(base, k));
    plan.t = Rat(2 * p3);
    plan.radius = Rat(pow_checked(3, k + 1) - 1, 3);
    plan.mesh_cap = Rat(pow_checked(base, k + 1));
    plan.an_cd = *cd;
    out.trace.levels.push_back(merge_step(sp, levels, parents, provider, x0, n, budget, plan));
    if (levels.back().size() == 1) break;
  }
  out.trace.absorbed = levels.back().size() == 1;

  out.precode.space_id = sp.id();
  out.precode.levels = std::move(levels);
  out.precode.parent = std::move(parents);
  out.precode.kind = PrecodeKind::an;
  out.precode.base = base;
  out.precode.i0 = 0;

  // measured scheduling constants over the realized scales: for every
  // scheduled r >= 1, base^(least qualifying level) <= an_c * r
  if (out.trace.absorbed) {
    Rat c_sched(1);
    for (const Rat& r : geometric_schedule(sp.scale_cap())) {
      if (r < Rat(1)) continue;
      int lvl = min_level_for(sp, out.precode.levels, r, n + 1, budget);
      if (lvl < 0)
        throw validation_error("no level certifies " + r.str() + "-multiplicity <= " +
                               std::to_string(n + 1));
      Rat ratio = Rat(pow_checked(base, lvl)) / r;
      if (ratio > c_sched) c_sched = ratio;
    }
    out.precode.an_c = c_sched;
    out.precode.an_r0 = Rat(1);
  }
  return out;
}

}  // namespace coarsetk
