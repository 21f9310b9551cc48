#include "coarsetk/cover.hpp"

#include <algorithm>
#include <limits>
#include <type_traits>

#include "coarsetk/cliques.hpp"

namespace coarsetk {

namespace {

/// Closest cross pair between two nonempty sets, with witnesses.
struct SetDistance {
  Dist d;
  PointId a = -1, b = -1;
};

SetDistance closest_pair(const Space& s, const PointSet& x, const PointSet& y) {
  SetDistance best;
  bool first = true;
  for (PointId p : x)
    for (PointId q : y) {
      Dist d = s.dist(p, q);
      if (first || d < best.d) {
        best = {d, p, q};
        first = false;
      }
      if (best.d.is_zero()) return best;
    }
  return best;
}

/// Bounding box of a set plus whether the set fills that box entirely.
struct BoxInfo {
  std::vector<i64> lo, hi;
  bool full = false;
};

BoxInfo box_info(const Space& s, const PointSet& pts) {
  const auto& l = s.lattice_geometry();
  BoxInfo b;
  b.lo.assign(l.dim, std::numeric_limits<i64>::max());
  b.hi.assign(l.dim, std::numeric_limits<i64>::min());
  for (PointId p : pts) {
    auto c = s.coords(p);
    for (int ax = 0; ax < l.dim; ++ax) {
      b.lo[ax] = std::min(b.lo[ax], c[ax]);
      b.hi[ax] = std::max(b.hi[ax], c[ax]);
    }
  }
  i64 cells = 1;
  for (int ax = 0; ax < l.dim; ++ax) cells *= b.hi[ax] - b.lo[ax] + 1;
  b.full = cells == static_cast<i64>(pts.size());
  return b;
}

/// Exact distance between two full boxes under the lattice norm.
Dist box_distance(const LatticeGeometry& l, const BoxInfo& a, const BoxInfo& b) {
  i64 acc = 0;
  for (int ax = 0; ax < l.dim; ++ax) {
    i64 gap = 0;
    if (a.hi[ax] < b.lo[ax]) gap = b.lo[ax] - a.hi[ax];
    else if (b.hi[ax] < a.lo[ax]) gap = a.lo[ax] - b.hi[ax];
    switch (l.norm) {
      case Norm::l1: acc += gap; break;
      case Norm::linf: acc = std::max(acc, gap); break;
      case Norm::l2: acc += gap * gap; break;
    }
  }
  return l.norm == Norm::l2 ? Dist::sqrt_of(acc) : Dist::integer(acc);
}

}  // namespace

// ============================================================================
// Cover
// ============================================================================

Cover Cover::make(const Space& s, std::vector<PointSet> elements, bool require_cover) {
  if (elements.empty()) throw validation_error("cover has no elements");
  Cover c;
  c.space_id_ = s.id();
  c.elements_ = std::move(elements);
  c.incident_.assign(s.size(), {});
  c.elem_diam_.reserve(c.elements_.size());
  for (size_t e = 0; e < c.elements_.size(); ++e) {
    const PointSet& pts = c.elements_[e];
    if (pts.empty()) throw validation_error("cover element " + std::to_string(e) + " is empty");
    require_sorted_subset(s, pts);
    for (PointId p : pts) c.incident_[p].push_back(static_cast<std::int32_t>(e));
    c.elem_diam_.push_back(set_diameter(s, pts));
    c.mesh_ = std::max(c.mesh_, c.elem_diam_.back());
  }
  size_t covered = 0;
  for (PointId p = 0; p < s.size(); ++p) {
    if (!c.incident_[p].empty()) ++covered;
    c.multiplicity_ = std::max(c.multiplicity_, static_cast<int>(c.incident_[p].size()));
  }
  c.covers_space_ = covered == static_cast<size_t>(s.size());
  if (require_cover && !c.covers_space_) {
    for (PointId p = 0; p < s.size(); ++p)
      if (c.incident_[p].empty())
        throw validation_error("point " + s.label(p) + " is not covered");
  }
  return c;
}

void require_same_space(const Space& s, const Cover& c) {
  if (c.space_id() != s.id())
    throw validation_error("cover belongs to space '" + c.space_id() + "', expected '" + s.id() + "'");
}

// ============================================================================
// r-multiplicity
// ============================================================================

namespace {

/// Counts distinct elements met by `pts` using a versioned stamp array.
int count_met(const Cover& c, const PointSet& pts, std::vector<i64>& stamp, i64 version,
              std::vector<std::int32_t>* out) {
  int cnt = 0;
  for (PointId p : pts)
    for (std::int32_t e : c.incident(p))
      if (stamp[e] != version) {
        stamp[e] = version;
        ++cnt;
        if (out) out->push_back(e);
      }
  return cnt;
}

}  // namespace

RMultiplicityResult r_multiplicity(const Space& s, const Cover& c, const Rat& r,
                                   const Budget& budget) {
  require_same_space(s, c);
  RMultiplicityResult res;
  std::vector<i64> stamp(c.size(), -1);
  i64 version = 0;
  CliqueEnumStats stats = for_each_max_rclique(
      s, r,
      [&](const PointSet& clique) {
        int cnt = count_met(c, clique, stamp, ++version, nullptr);
        if (cnt > res.value) {
          res.value = cnt;
          res.witness = clique;
        }
      },
      budget.clique_expansions);
  res.expansions = stats.expansions;
  res.exact = stats.complete;
  if (!stats.complete) {
    // greedy deterministic lower-bound pass: grow a small-diameter set from
    // each seed point, bounded by a fixed number of distance evaluations
    i64 evals = 0;
    const i64 eval_cap = 2'000'000;
    for (PointId seed = 0; seed < s.size() && evals < eval_cap; ++seed) {
      PointSet cur{seed};
      for (PointId p = 0; p < s.size() && evals < eval_cap; ++p) {
        if (p == seed) continue;
        bool fits = true;
        for (PointId q : cur) {
          ++evals;
          if (s.dist(p, q) > r) {
            fits = false;
            break;
          }
        }
        if (fits) cur.push_back(p);
      }
      std::sort(cur.begin(), cur.end());
      int cnt = count_met(c, cur, stamp, ++version, nullptr);
      if (cnt > res.value) {
        res.value = cnt;
        res.witness = cur;
      }
    }
  }
  if (!res.witness.empty()) {
    count_met(c, res.witness, stamp, ++version, &res.witness_elements);
    std::sort(res.witness_elements.begin(), res.witness_elements.end());
  }
  return res;
}

// ============================================================================
// Lebesgue number
// ============================================================================

namespace {

/// Does every maximal subset of diameter <= r fit inside one element?
template <class Thresh>
bool lebesgue_feasible_exact(const Space& s, const Cover& c, const Thresh& r, i64 clique_budget,
                             bool* complete, PointSet* bad) {
  bool ok = true;
  CliqueEnumStats stats = for_each_max_rclique(
      s, r,
      [&](const PointSet& clique) {
        if (!ok) return;
        for (std::int32_t e : c.incident(clique.front())) {
          if (subset_of(clique, c.element(e))) return;
        }
        ok = false;
        if (bad) *bad = clique;
      },
      clique_budget);
  *complete = stats.complete;
  return ok;
}

template <class Thresh>
bool lebesgue_feasible_ball(const Space& s, const Cover& c, const Thresh& r, PointSet* bad) {
  PointSet b;
  for (PointId x = 0; x < s.size(); ++x) {
    if constexpr (std::is_same_v<Thresh, Rat>) {
      b = ball(s, x, r);
    } else {
      if (r.is_integer()) {
        b = ball(s, x, Rat(r.int_value()));
      } else {
        b.clear();
        for (PointId p = 0; p < s.size(); ++p)
          if (s.dist(x, p) <= r) b.push_back(p);
      }
    }
    bool fits = false;
    for (std::int32_t e : c.incident(x)) {
      if (subset_of(b, c.element(e))) {
        fits = true;
        break;
      }
    }
    if (!fits) {
      if (bad) *bad = b;
      return false;
    }
  }
  return true;
}

}  // namespace

bool lebesgue_at_least(const Space& s, const Cover& c, const Rat& r, LebesgueMode mode,
                       const Budget& budget, bool* exact_used, PointSet* bad) {
  require_same_space(s, c);
  if (mode == LebesgueMode::exact) {
    bool complete = false;
    bool ok = lebesgue_feasible_exact(s, c, r, budget.clique_expansions, &complete, bad);
    if (complete) {
      if (exact_used) *exact_used = true;
      return ok;
    }
  }
  if (exact_used) *exact_used = false;
  return lebesgue_feasible_ball(s, c, r, bad);
}

LebesgueResult lebesgue_number(const Space& s, const Cover& c, LebesgueMode mode,
                               const Budget& budget) {
  require_same_space(s, c);
  LebesgueResult res;
  res.mode_used = mode;

  // distance value candidates within the scale cap
  std::vector<Dist> cand;
  cand.push_back(Dist());
  Rat cap(s.scale_cap());
  for (const Dist& d : s.distance_values())
    if (!d.is_zero() && d <= cap) cand.push_back(d);

  auto feasible = [&](const Dist& d, PointSet* bad) -> bool {
    if (mode == LebesgueMode::ball_certificate)
      return lebesgue_feasible_ball(s, c, d, bad);
    bool complete = false;
    bool ok = lebesgue_feasible_exact(s, c, d, budget.clique_expansions, &complete, bad);
    if (!complete) {
      res.exact = false;
      res.mode_used = LebesgueMode::ball_certificate;
      return lebesgue_feasible_ball(s, c, d, bad);
    }
    return ok;
  };

  // find the largest feasible candidate ("last true" binary search)
  size_t lo = 0, hi = cand.size() - 1;
  PointSet bad;
  if (feasible(cand[hi], nullptr)) {
    res.at_cap = true;
    res.value = Dist::integer(s.scale_cap());
    return res;
  }
  while (lo < hi) {
    size_t mid = lo + (hi - lo + 1) / 2;
    if (feasible(cand[mid], nullptr))
      lo = mid;
    else
      hi = mid - 1;
  }
  res.value = cand[lo];
  if (lo + 1 < cand.size()) feasible(cand[lo + 1], &res.witness_bad_set);
  return res;
}

// ============================================================================
// Disjoint families
// ============================================================================

DisjointnessReport is_r_disjoint(const Space& s, const std::vector<PointSet>& family, const Rat& r) {
  DisjointnessReport rep;
  size_t k = family.size();
  // rectangle fast path: exact distances between full-box elements
  std::vector<BoxInfo> boxes;
  bool all_boxes = false;
  if (s.is_lattice()) {
    all_boxes = true;
    boxes.reserve(k);
    for (const auto& pts : family) {
      require_sorted_subset(s, pts);
      boxes.push_back(box_info(s, pts));
      all_boxes = all_boxes && boxes.back().full;
    }
  }
  for (size_t i = 0; i < k && rep.ok; ++i)
    for (size_t j = i + 1; j < k && rep.ok; ++j) {
      if (all_boxes) {
        Dist d = box_distance(s.lattice_geometry(), boxes[i], boxes[j]);
        if (d > r) continue;
      }
      SetDistance sd = closest_pair(s, family[i], family[j]);
      if (sd.d <= r) {
        rep.ok = false;
        rep.elem_a = static_cast<std::int32_t>(i);
        rep.elem_b = static_cast<std::int32_t>(j);
        rep.point_a = sd.a;
        rep.point_b = sd.b;
        rep.distance = sd.d;
      }
    }
  return rep;
}

FamiliesReport validate_families(const Space& s, const DisjointFamilies& f) {
  FamiliesReport rep;
  if (f.space_id != s.id()) {
    rep.ok = false;
    rep.failure = "space id mismatch";
    return rep;
  }
  if (f.families.empty()) {
    rep.ok = false;
    rep.failure = "no families";
    return rep;
  }
  std::vector<char> covered(s.size(), 0);
  for (size_t fi = 0; fi < f.families.size(); ++fi) {
    const auto& fam = f.families[fi];
    DisjointnessReport d = is_r_disjoint(s, fam, f.r);
    if (!d.ok) {
      rep.ok = false;
      rep.failure = "family " + std::to_string(fi) + " is not " + f.r.str() + "-separated";
      rep.disjointness = d;
      return rep;
    }
    for (const auto& pts : fam) {
      for (PointId p : pts) covered[p] = 1;
      rep.mesh = std::max(rep.mesh, set_diameter(s, pts));
    }
  }
  for (PointId p = 0; p < s.size(); ++p)
    if (!covered[p]) {
      rep.ok = false;
      rep.failure = "point " + s.label(p) + " not covered by any family";
      return rep;
    }
  return rep;
}

Cover families_to_cover(const Space& s, const DisjointFamilies& f) {
  std::vector<PointSet> elems;
  for (const auto& fam : f.families)
    for (const auto& pts : fam) elems.push_back(pts);
  return Cover::make(s, std::move(elems));
}

// ============================================================================
// Pushforward and refinement
// ============================================================================

Cover pushforward(const Space& domain, const Space& codomain, const Cover& c,
                  const std::vector<PointId>& map_table) {
  require_same_space(domain, c);
  if (static_cast<PointId>(map_table.size()) != domain.size())
    throw validation_error("map table size mismatch");
  for (PointId y : map_table)
    if (y < 0 || y >= codomain.size()) throw validation_error("map value out of range");
  std::vector<PointSet> images;
  images.reserve(c.size());
  for (const PointSet& e : c.elements()) {
    PointSet img;
    img.reserve(e.size());
    for (PointId p : e) img.push_back(map_table[p]);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    images.push_back(std::move(img));
  }
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  return Cover::make(codomain, std::move(images), /*require_cover=*/false);
}

bool refines(const Cover& fine, const Cover& coarse) {
  if (fine.space_id() != coarse.space_id())
    throw validation_error("refinement check across different spaces");
  for (const PointSet& e : fine.elements()) {
    bool inside = false;
    for (std::int32_t cand : coarse.incident(e.front()))
      if (subset_of(e, coarse.element(cand))) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

}  // namespace coarsetk
