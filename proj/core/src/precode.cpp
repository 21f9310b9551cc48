#include "coarsetk/precode.hpp"

#include <algorithm>
#include <map>

namespace coarsetk {

namespace {

i64 fdiv(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

bool subset(const PointSet& a, const PointSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

// ============================================================================
// Validation
// ============================================================================

PrecodeReport validate_precode(const Space& s, const Precode& p, int n, const Budget& budget) {
  PrecodeReport rep;
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.failure = std::move(why);
    return rep;
  };
  if (n < 1) throw validation_error("level multiplicity target must be at least 1");
  if (p.space_id != s.id()) return fail("space id mismatch");
  if (p.levels.empty()) return fail("no levels");
  if (p.parent.size() + 1 != p.levels.size()) return fail("parent table size mismatch");

  for (size_t i = 0; i < p.levels.size(); ++i) {
    const Cover& lv = p.levels[i];
    if (lv.space_id() != s.id()) return fail("level " + std::to_string(i) + " space mismatch");
    if (!lv.covers_space()) return fail("level " + std::to_string(i) + " does not cover");
    rep.level_mesh.push_back(lv.mesh());
    rep.levels_disjoint = rep.levels_disjoint && lv.pairwise_disjoint();
  }
  if (p.levels.back().size() != 1) return fail("top level is not a single element");

  // each element is inside exactly one element of the next level, as recorded
  for (size_t i = 0; i + 1 < p.levels.size(); ++i) {
    const Cover& lo = p.levels[i];
    const Cover& hi = p.levels[i + 1];
    if (p.parent[i].size() != lo.size())
      return fail("parent row " + std::to_string(i) + " size mismatch");
    for (size_t e = 0; e < lo.size(); ++e) {
      std::int32_t par = p.parent[i][e];
      if (par < 0 || static_cast<size_t>(par) >= hi.size())
        return fail("parent index out of range at level " + std::to_string(i));
      int containing = 0;
      std::int32_t found = -1;
      for (size_t v = 0; v < hi.size(); ++v)
        if (subset(lo.element(e), hi.element(v))) {
          ++containing;
          found = static_cast<std::int32_t>(v);
        }
      if (containing != 1)
        return fail("element " + std::to_string(e) + " at level " + std::to_string(i) +
                    " has " + std::to_string(containing) + " containing elements above");
      if (found != par)
        return fail("recorded parent of element " + std::to_string(e) + " at level " +
                    std::to_string(i) + " is not its containing element");
    }
  }

  // scheduled multiplicity: every scale admits a level with r-mul <= n.
  // The requirement is existential, so a level certified within budget
  // settles the scale exactly even if earlier levels were undecided; a
  // scale with no certified level and at least one undecided one is a
  // budget shortfall, not a refutation.
  for (const Rat& r : geometric_schedule(s.scale_cap())) {
    int found = -1;
    bool undecided = false;
    for (size_t i = 0; i < p.levels.size(); ++i) {
      if (p.kind == PrecodeKind::an && !p.an_c.is_zero() && r >= p.an_r0) {
        // the AN schedule must also keep the level mesh scale linear in r
        if (!(Rat(pow_checked(p.base, static_cast<int>(i))) <= p.an_c * r)) continue;
      }
      RMultiplicityResult m = r_multiplicity(s, p.levels[i], r, budget);
      if (!m.exact) {
        // m.value is a certified lower bound: above n it still disqualifies
        if (m.value <= n) undecided = true;
        continue;
      }
      if (m.value <= n) {
        found = static_cast<int>(i);
        break;
      }
    }
    if (found < 0) {
      if (undecided) rep.exact = false;
      return fail(std::string(undecided ? "could not decide whether a" : "no") + " level has " +
                  r.str() + "-multiplicity <= " + std::to_string(n) +
                  (p.kind == PrecodeKind::an ? " under the base^i <= c*r constraint" : "") +
                  (undecided ? " within the work budget" : ""));
    }
    rep.schedule.emplace_back(r, found);
  }

  if (p.kind == PrecodeKind::an) {
    for (size_t i = 0; i < p.levels.size(); ++i) {
      if (static_cast<int>(i) < p.i0) continue;
      if (!(rep.level_mesh[i] <= Rat(pow_checked(p.base, static_cast<int>(i)))))
        return fail("mesh at level " + std::to_string(i) + " exceeds base^i");
    }
    if (p.an_c.is_zero()) return fail("an kind without scheduling constants");
  }
  return rep;
}

// ============================================================================
// Ultrametric quotient
// ============================================================================

UltraBuild build_ultrametric(const Space& s, const Precode& p) {
  if (p.space_id != s.id()) throw validation_error("precode space mismatch");
  size_t nl = p.levels.size();
  PointId leaves = static_cast<PointId>(p.levels[0].size());

  // ancestor chains (defined whenever parents are present)
  std::vector<std::vector<std::int32_t>> anc(nl, std::vector<std::int32_t>(
                                                     static_cast<size_t>(leaves)));
  for (PointId e = 0; e < leaves; ++e) anc[0][static_cast<size_t>(e)] = e;
  for (size_t k = 1; k < nl; ++k)
    for (PointId e = 0; e < leaves; ++e)
      anc[k][static_cast<size_t>(e)] =
          p.parent[k - 1][static_cast<size_t>(anc[k - 1][static_cast<size_t>(e)])];

  bool disjoint = true;
  for (const Cover& lv : p.levels) disjoint = disjoint && lv.pairwise_disjoint();

  std::vector<std::string> labels;
  for (size_t e = 0; e < p.levels[0].size(); ++e)
    labels.push_back(s.label(p.levels[0].element(e).front()));

  UltraBuild out{Space::from_matrix("tmp", 1, {0}), true, false};
  if (disjoint) {
    std::vector<std::vector<PointId>> block(nl);
    for (size_t k = 0; k < nl; ++k) {
      block[k].resize(static_cast<size_t>(leaves));
      for (PointId e = 0; e < leaves; ++e)
        block[k][static_cast<size_t>(e)] = anc[k][static_cast<size_t>(e)];
    }
    out.space = Space::ultrametric("q(" + s.id() + ")", p.base, std::move(block), std::nullopt,
                                   std::move(labels));
    return out;
  }

  // overlapping levels: brute-force least joint-containment level
  out.chain_method = false;
  auto brute_level = [&](PointId a, PointId b) {
    PointSet joint;
    const PointSet& ea = p.levels[0].element(static_cast<size_t>(a));
    const PointSet& eb = p.levels[0].element(static_cast<size_t>(b));
    std::set_union(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(joint));
    for (size_t k = 0; k < nl; ++k)
      for (size_t v = 0; v < p.levels[k].size(); ++v)
        if (subset(joint, p.levels[k].element(v))) return static_cast<int>(k);
    throw validation_error("top level fails to contain a leaf pair");
  };
  std::vector<i64> d(static_cast<size_t>(leaves) * static_cast<size_t>(leaves), 0);
  for (PointId a = 0; a < leaves; ++a)
    for (PointId b = a + 1; b < leaves; ++b) {
      int lv = brute_level(a, b);
      int chain = 0;
      while (anc[static_cast<size_t>(chain)][static_cast<size_t>(a)] !=
             anc[static_cast<size_t>(chain)][static_cast<size_t>(b)])
        ++chain;
      if (chain != lv) out.divergence = true;
      i64 val = pow_checked(p.base, lv);
      d[static_cast<size_t>(a) * static_cast<size_t>(leaves) + static_cast<size_t>(b)] = val;
      d[static_cast<size_t>(b) * static_cast<size_t>(leaves) + static_cast<size_t>(a)] = val;
    }
  // strong triangle inequality is not automatic for overlapping levels
  for (PointId a = 0; a < leaves; ++a)
    for (PointId b = 0; b < leaves; ++b)
      for (PointId c = 0; c < leaves; ++c) {
        i64 ab = d[static_cast<size_t>(a) * leaves + static_cast<size_t>(b)];
        i64 bc = d[static_cast<size_t>(b) * leaves + static_cast<size_t>(c)];
        i64 ac = d[static_cast<size_t>(a) * leaves + static_cast<size_t>(c)];
        if (ac > std::max(ab, bc))
          throw validation_error("overlapping levels break the strong triangle inequality at (" +
                                 std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c) + ")");
      }
  out.space = Space::from_matrix("q(" + s.id() + ")", leaves, std::move(d), std::nullopt,
                                 std::move(labels));
  return out;
}

QuotientCheck quotient_map(const Space& s, const Precode& p, const Space& ultra,
                           const std::vector<PointId>* selector) {
  if (p.space_id != s.id()) throw validation_error("precode space mismatch");
  if (ultra.size() != static_cast<PointId>(p.levels[0].size()))
    throw validation_error("quotient space size does not match level 0");
  QuotientCheck out;
  for (size_t e = 0; e < p.levels[0].size(); ++e) {
    PointId x = selector ? (*selector)[e] : p.levels[0].element(e).front();
    const PointSet& el = p.levels[0].element(e);
    if (!std::binary_search(el.begin(), el.end(), x))
      throw validation_error("selector point not inside its element");
    out.chosen.push_back(x);
  }
  out.q = MapTable{ultra.id(), s.id(), out.chosen};
  out.displacement_ok = true;
  std::vector<Dist> mesh;
  for (const Cover& lv : p.levels) mesh.push_back(lv.mesh());
  for (PointId a = 0; a < ultra.size(); ++a)
    for (PointId b = a + 1; b < ultra.size(); ++b) {
      int k;
      if (ultra.is_ultrametric()) {
        k = ultra.shared_level(a, b);
      } else {
        // matrix-backed quotient: recover the level from the distance
        i64 v = ultra.dist(a, b).int_value();
        k = 0;
        while (pow_checked(p.base, k) < v) ++k;
      }
      if (!(s.dist(out.chosen[static_cast<size_t>(a)], out.chosen[static_cast<size_t>(b)]) <=
            mesh[static_cast<size_t>(k)])) {
        out.displacement_ok = false;
        return out;
      }
    }
  return out;
}

MapTable inverse_section(const Space& s, const Precode& p, const Space& ultra,
                         const Budget& budget) {
  PrecodeReport rep = validate_precode(s, p, 1, budget);
  if (!rep.ok)
    throw validation_error("structure does not validate with one part: " + rep.failure);
  if (ultra.size() != static_cast<PointId>(p.levels[0].size()))
    throw validation_error("quotient space size does not match level 0");
  std::vector<PointId> table(static_cast<size_t>(s.size()));
  for (PointId x = 0; x < s.size(); ++x)
    table[static_cast<size_t>(x)] = p.levels[0].incident(x).front();
  return MapTable{s.id(), ultra.id(), std::move(table)};
}

// ============================================================================
// Stock examples
// ============================================================================

namespace {

Cover cover_from_ranges(const Space& s, const std::vector<std::pair<PointId, PointId>>& runs) {
  std::vector<PointSet> elems;
  for (auto [lo, hi] : runs) {
    PointSet e;
    for (PointId p = lo; p <= hi; ++p) e.push_back(p);
    elems.push_back(std::move(e));
  }
  return Cover::make(s, std::move(elems));
}

}  // namespace

PrecodeExample example_dyadic(i64 n) {
  if (n < 1 || (n & (n - 1)) != 0) throw validation_error("size must be a power of two");
  Space sp = Space::lattice("dyadic" + std::to_string(n), {{{0, n - 1}}}, Norm::l1);
  Precode pc;
  pc.space_id = sp.id();
  for (i64 len = 1; len <= n; len *= 2) {
    std::vector<std::pair<PointId, PointId>> runs;
    for (i64 start = 0; start < n; start += len)
      runs.emplace_back(static_cast<PointId>(start), static_cast<PointId>(start + len - 1));
    pc.levels.push_back(cover_from_ranges(sp, runs));
    if (len > 1) {
      std::vector<std::int32_t> row(static_cast<size_t>(2 * n / len));
      for (size_t e = 0; e < row.size(); ++e) row[e] = static_cast<std::int32_t>(e / 2);
      pc.parent.push_back(std::move(row));
    }
  }
  return {std::move(sp), std::move(pc)};
}

PrecodeExample example_triadic(int k, bool an_kind) {
  if (k < 1) throw validation_error("depth must be at least 1");
  i64 h = (pow_checked(3, k + 2) - 1) / 2;
  Space sp = Space::lattice("triadic" + std::to_string(k), {{{-h, h}}}, Norm::l1);
  Precode pc;
  pc.space_id = sp.id();
  for (int lv = 0;; ++lv) {
    i64 len = pow_checked(3, lv);
    i64 offset = (pow_checked(3, lv + 1) - 1) / 2;
    std::vector<std::pair<PointId, PointId>> runs;
    for (i64 j = fdiv(-h - offset - (len - 1), len); offset + j * len <= h; ++j) {
      i64 a = offset + j * len;
      i64 lo = std::max(a, -h), hi = std::min(a + len - 1, h);
      if (lo > hi) continue;
      runs.emplace_back(static_cast<PointId>(lo + h), static_cast<PointId>(hi + h));
    }
    pc.levels.push_back(cover_from_ranges(sp, runs));
    if (lv > 0) {
      // each level is a partition: the parent is the block holding the front point
      const Cover& up = pc.levels.back();
      const Cover& low = pc.levels[pc.levels.size() - 2];
      std::vector<std::int32_t> row(low.size());
      for (size_t e = 0; e < low.size(); ++e)
        row[e] = up.incident(low.element(e).front()).front();
      pc.parent.push_back(std::move(row));
    }
    if (runs.size() == 1) break;
  }
  if (an_kind) {
    pc.kind = PrecodeKind::an;
    pc.base = 3;
    pc.i0 = 0;  // mesh = 3^lv - 1 < 3^lv at every level
    pc.an_c = Rat(3);
    pc.an_r0 = Rat(1);
  }
  return {std::move(sp), std::move(pc)};
}

PrecodeExample example_clusters(i64 b, int l, i64 s) {
  if (b < 2 || l < 1 || s < 2 * b) throw validation_error("need b >= 2, l >= 1, s >= 2b");
  i64 count = 1;
  for (int i = 0; i < l; ++i) count = mul_checked(count, b);
  if (count > 1024) throw validation_error("too many cluster points");
  std::vector<i64> value(static_cast<size_t>(count), 0);
  for (i64 i = 0; i < count; ++i) {
    i64 rest = i, place = 1;
    for (int digit = 0; digit < l; ++digit) {
      value[static_cast<size_t>(i)] += (rest % b) * place;
      rest /= b;
      place = mul_checked(place, s);
    }
  }
  std::vector<i64> d(static_cast<size_t>(count) * static_cast<size_t>(count), 0);
  std::vector<std::string> labels;
  for (i64 i = 0; i < count; ++i) {
    labels.push_back(std::to_string(value[static_cast<size_t>(i)]));
    for (i64 j = 0; j < count; ++j)
      d[static_cast<size_t>(i * count + j)] =
          std::abs(value[static_cast<size_t>(i)] - value[static_cast<size_t>(j)]);
  }
  Space sp = Space::from_matrix(
      "clusters" + std::to_string(b) + "x" + std::to_string(l) + "x" + std::to_string(s),
      static_cast<PointId>(count), std::move(d), std::nullopt, std::move(labels));
  Precode pc;
  pc.space_id = sp.id();
  i64 run = b;  // level 0 groups runs of b leaves (clusters, not singletons)
  while (run <= count) {
    std::vector<std::pair<PointId, PointId>> runs;
    for (i64 start = 0; start < count; start += run)
      runs.emplace_back(static_cast<PointId>(start), static_cast<PointId>(start + run - 1));
    pc.levels.push_back(cover_from_ranges(sp, runs));
    if (run > b) {
      std::vector<std::int32_t> row(static_cast<size_t>(count / (run / b)));
      for (size_t e = 0; e < row.size(); ++e) row[e] = static_cast<std::int32_t>(e / b);
      pc.parent.push_back(std::move(row));
    }
    run = mul_checked(run, b);
  }
  return {std::move(sp), std::move(pc)};
}

}  // namespace coarsetk
