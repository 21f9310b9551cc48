#include "coarsetk/maps.hpp"

#include <algorithm>
#include <map>

#include "coarsetk/cliques.hpp"

namespace coarsetk {

// ============================================================================
// Map tables
// ============================================================================

MapTable make_map(const Space& domain, const Space& codomain, std::vector<PointId> table) {
  if (static_cast<PointId>(table.size()) != domain.size())
    throw validation_error("map table size does not match the domain");
  for (PointId y : table)
    if (y < 0 || y >= codomain.size()) throw validation_error("map value out of codomain range");
  return MapTable{domain.id(), codomain.id(), std::move(table)};
}

MapTable identity_map(const Space& s) {
  std::vector<PointId> t(static_cast<size_t>(s.size()));
  for (PointId p = 0; p < s.size(); ++p) t[static_cast<size_t>(p)] = p;
  return MapTable{s.id(), s.id(), std::move(t)};
}

namespace {

void require_map(const Space& domain, const Space& codomain, const MapTable& f) {
  if (f.domain_id != domain.id() || f.codomain_id != codomain.id() ||
      static_cast<PointId>(f.table.size()) != domain.size())
    throw validation_error("map does not connect the given spaces");
}

}  // namespace

MapTable compose(const Space& x, const Space& y, const Space& z, const MapTable& f,
                 const MapTable& g) {
  require_map(x, y, f);
  require_map(y, z, g);
  std::vector<PointId> t(f.table.size());
  for (size_t i = 0; i < t.size(); ++i) t[i] = g(f.table[i]);
  return MapTable{x.id(), z.id(), std::move(t)};
}

MapTable product_map(const Space& x, const Space& y, const MapTable& f, const Space& z,
                     const Space& w, const MapTable& g, const Space& xz, const Space& yw) {
  require_map(x, y, f);
  require_map(z, w, g);
  if (!xz.is_product() || !yw.is_product())
    throw validation_error("product map needs product spaces");
  const auto& pd = xz.product_geometry();
  const auto& pc = yw.product_geometry();
  if (pd.left->id() != x.id() || pd.right->id() != z.id() || pc.left->id() != y.id() ||
      pc.right->id() != w.id())
    throw validation_error("product factors do not match the maps");
  std::vector<PointId> t(static_cast<size_t>(xz.size()));
  for (PointId a = 0; a < x.size(); ++a)
    for (PointId b = 0; b < z.size(); ++b)
      t[static_cast<size_t>(a * z.size() + b)] = f(a) * w.size() + g(b);
  return MapTable{xz.id(), yw.id(), std::move(t)};
}

bool is_surjective(const Space& codomain, const MapTable& f) {
  std::vector<char> hit(static_cast<size_t>(codomain.size()), 0);
  for (PointId y : f.table) hit[static_cast<size_t>(y)] = 1;
  for (char h : hit)
    if (!h) return false;
  return true;
}

// ============================================================================
// Moduli
// ============================================================================

Dist MapRecord::delta_at(const Rat& r) const {
  Dist out;
  for (const auto& row : delta) {
    if (!(row.r <= r)) break;
    out = row.value;
  }
  return out;
}

namespace {

/// Upper convex hull of exact rational points sorted by x; returns the
/// slope of the final edge (asymptotic growth) or 0 for degenerate input.
Rat final_hull_slope(const std::vector<std::pair<Rat, Rat>>& pts) {
  std::vector<std::pair<Rat, Rat>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& [x1, y1] = hull[hull.size() - 2];
      const auto& [x2, y2] = hull[hull.size() - 1];
      // pop the middle point unless the chain turns strictly right
      if ((p.first - x1) * (y2 - y1) >= (x2 - x1) * (p.second - y1)) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  if (hull.size() < 2) return Rat(0);
  const auto& [x1, y1] = hull[hull.size() - 2];
  const auto& [x2, y2] = hull[hull.size() - 1];
  if (x2 == x1) return Rat(0);
  return (y2 - y1) / (x2 - x1);
}

}  // namespace

MapRecord fit_moduli(const Space& domain, const Space& codomain, const MapTable& f) {
  require_map(domain, codomain, f);
  MapRecord rec;
  rec.map = f;

  std::map<Dist, Dist> dmax, dmin, pmax;
  bool lip_exact = true;
  Rat lip(0);
  for (PointId i = 0; i < domain.size(); ++i)
    for (PointId j = i + 1; j < domain.size(); ++j) {
      Dist dx = domain.dist(i, j);
      Dist dy = codomain.dist(f(i), f(j));
      auto [it, fresh] = dmax.try_emplace(dx, dy);
      if (!fresh) it->second = std::max(it->second, dy);
      auto [it2, fresh2] = dmin.try_emplace(dx, dy);
      if (!fresh2) it2->second = std::min(it2->second, dy);
      auto [it3, fresh3] = pmax.try_emplace(dy, dx);
      if (!fresh3) it3->second = std::max(it3->second, dx);
      if (!dy.is_zero()) {
        bool ex = true;
        lip = std::max(lip, Dist::ratio_upper(dy, dx, &ex));
        lip_exact = lip_exact && ex;
      }
    }

  Dist run;
  for (const auto& [r, v] : dmax) {
    run = std::max(run, v);
    rec.delta.push_back({r, run});
  }
  {
    Dist suffix;
    bool first = true;
    std::vector<ModulusRow> rows;
    for (auto it = dmin.rbegin(); it != dmin.rend(); ++it) {
      suffix = first ? it->second : std::min(suffix, it->second);
      first = false;
      rows.push_back({it->first, suffix});
    }
    rec.gamma.assign(rows.rbegin(), rows.rend());
  }
  run = Dist();
  for (const auto& [t, v] : pmax) {
    run = std::max(run, v);
    rec.properness.push_back({t, run});
  }

  rec.lipschitz = lip;
  rec.lipschitz_exact = lip_exact;
  for (PointId i = 0; i < domain.size(); ++i)
    for (PointId j = i + 1; j < domain.size(); ++j)
      if (!le_affine(codomain.dist(f(i), f(j)), rec.lipschitz, domain.dist(i, j), Rat(0)))
        throw validation_error("expansion-constant fit failed its own verification");

  // affine fit: hull slope over (lower bound of r, upper bound of delta(r)),
  // then the minimal shift; dominance is by construction, still re-checked
  std::vector<std::pair<Rat, Rat>> pts{{Rat(0), Rat(0)}};
  bool ignore = true;
  for (const auto& row : rec.delta)
    pts.emplace_back(Rat(row.r.floor_int()), Dist::ratio_upper(row.value, Dist::integer(1), &ignore));
  Rat c = final_hull_slope(pts);
  Rat b(0);
  for (const auto& [px, py] : pts) {
    Rat need = c * px;
    if (py > need) b = std::max(b, py - need);
  }
  rec.affine_c = c;
  rec.affine_b = b;
  for (const auto& row : rec.delta)
    if (!le_affine(row.value, rec.affine_c, row.r, rec.affine_b))
      throw validation_error("affine modulus fit failed its own verification");

  // two-sided check with the same constants: d_X <= c * d_Y + c*b
  if (!c.is_zero()) {
    Rat qb = c * b;
    bool ok = true;
    for (const auto& row : rec.gamma) {
      // row: pairs at domain distance row.r have codomain distance >= row.value
      // need row.r <= c * value + qb for the lower bound to hold at this key
      if (!le_affine(row.r, c, row.value, qb)) {
        ok = false;
        break;
      }
    }
    rec.quasi_isometric = ok;
    rec.qi_b = qb;
  }
  return rec;
}

Dist check_close(const Space& domain, const Space& codomain, const MapTable& f,
                 const MapTable& g) {
  require_map(domain, codomain, f);
  require_map(domain, codomain, g);
  Dist s;
  for (PointId p = 0; p < domain.size(); ++p) s = std::max(s, codomain.dist(f(p), g(p)));
  return s;
}

EquivalenceReport check_coarse_equivalence(const Space& x, const Space& y, const MapTable& f,
                                           const MapTable& g) {
  require_map(x, y, f);
  require_map(y, x, g);
  EquivalenceReport rep;
  rep.s_on_domain = check_close(x, x, compose(x, y, x, f, g), identity_map(x));
  rep.s_on_codomain = check_close(y, y, compose(y, x, y, g, f), identity_map(y));
  rep.record_f = fit_moduli(x, y, f);
  rep.record_g = fit_moduli(y, x, g);
  rep.within_cap =
      rep.s_on_domain <= Rat(x.scale_cap()) && rep.s_on_codomain <= Rat(y.scale_cap());
  return rep;
}

// ============================================================================
// Fiber decomposition: n-colorability of the conflict graph
// ============================================================================

namespace {

enum class Tri { yes, no, unknown };

struct Bits {
  std::vector<std::uint64_t> w;
  explicit Bits(size_t n) : w((n + 63) / 64, 0) {}
  void set(size_t i) { w[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool test(size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
};

struct ColorSearch {
  const std::vector<Bits>& adj;
  const std::vector<int>& order;
  int n;
  WorkMeter& meter;
  std::vector<int>& color;
  bool exhausted = false;

  bool run(size_t k, int used) {
    if (k == order.size()) return true;
    if (!meter.spend(1)) {
      exhausted = true;
      return false;
    }
    int v = order[k];
    int limit = std::min(n - 1, used);  // first unused color only once (symmetry)
    for (int c = 0; c <= limit; ++c) {
      bool clash = false;
      for (size_t u = 0; u < adj.size(); ++u)
        if (color[u] == c && adj[static_cast<size_t>(v)].test(u)) {
          clash = true;
          break;
        }
      if (clash) continue;
      color[static_cast<size_t>(v)] = c;
      if (run(k + 1, std::max(used, c + 1))) return true;
      color[static_cast<size_t>(v)] = -1;
      if (exhausted) return false;
    }
    return false;
  }
};

/// Is the graph with edge (u,v) iff d(pts_u, pts_v) > d coverable by n
/// color classes? Fills `parts` with the classes on a yes.
Tri n_colorable(const Space& s, const PointSet& pts, const Dist& d, int n, WorkMeter& meter,
                std::vector<PointSet>* parts) {
  size_t m = pts.size();
  auto emit = [&](const std::vector<int>& color, int classes) {
    if (!parts) return;
    parts->assign(static_cast<size_t>(classes), {});
    for (size_t i = 0; i < m; ++i) (*parts)[static_cast<size_t>(color[i])].push_back(pts[i]);
    std::erase_if(*parts, [](const PointSet& p) { return p.empty(); });
  };
  if (m <= static_cast<size_t>(n)) {
    std::vector<int> color(m);
    for (size_t i = 0; i < m; ++i) color[i] = static_cast<int>(i);
    emit(color, static_cast<int>(m));
    return Tri::yes;
  }
  std::vector<Bits> adj(m, Bits(m));
  std::vector<int> deg(m, 0);
  bool any_edge = false;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      if (s.dist(pts[i], pts[j]) > d) {
        adj[i].set(j);
        adj[j].set(i);
        ++deg[i];
        ++deg[j];
        any_edge = true;
      }
  if (!any_edge) {
    std::vector<int> color(m, 0);
    emit(color, 1);
    return Tri::yes;
  }
  if (n == 1) return Tri::no;

  std::vector<int> color(m, -1);
  if (n == 2) {
    // exact two-coloring via traversal of the conflict graph
    std::vector<size_t> stack;
    for (size_t seed = 0; seed < m; ++seed) {
      if (color[seed] >= 0) continue;
      color[seed] = 0;
      stack.push_back(seed);
      while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        for (size_t v = 0; v < m; ++v)
          if (adj[u].test(v)) {
            if (color[v] < 0) {
              color[v] = 1 - color[u];
              stack.push_back(v);
            } else if (color[v] == color[u]) {
              return Tri::no;
            }
          }
      }
    }
    emit(color, 2);
    return Tri::yes;
  }

  std::vector<int> order(m);
  for (size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return deg[static_cast<size_t>(a)] != deg[static_cast<size_t>(b)]
                                           ? deg[static_cast<size_t>(a)] > deg[static_cast<size_t>(b)]
                                           : a < b; });
  // greedy pass: success certifies colorability cheaply
  bool greedy_ok = true;
  for (int v : order) {
    std::vector<char> used(static_cast<size_t>(n), 0);
    for (size_t u = 0; u < m; ++u)
      if (color[u] >= 0 && color[u] < n && adj[static_cast<size_t>(v)].test(u))
        used[static_cast<size_t>(color[u])] = 1;
    int c = 0;
    while (c < n && used[static_cast<size_t>(c)]) ++c;
    if (c == n) {
      greedy_ok = false;
      break;
    }
    color[static_cast<size_t>(v)] = c;
  }
  if (greedy_ok) {
    emit(color, n);
    return Tri::yes;
  }
  std::fill(color.begin(), color.end(), -1);
  ColorSearch search{adj, order, n, meter, color};
  if (search.run(0, 0)) {
    emit(color, n);
    return Tri::yes;
  }
  return search.exhausted ? Tri::unknown : Tri::no;
}

/// Minimal level whose blocks split `pts` into at most n groups, with the
/// groups themselves. Exact and search-free on ultrametric spaces: the
/// conflict graph at any threshold is complete multipartite over blocks.
std::pair<Dist, std::vector<PointSet>> ultra_min_split(const Space& s, const PointSet& pts,
                                                       int n) {
  const auto& ug = s.ultra_geometry();
  int levels = s.ultra_levels();
  for (int lv = 1; lv < levels; ++lv) {
    std::map<PointId, PointSet> groups;
    for (PointId p : pts) groups[ug.block_id[static_cast<size_t>(lv)][static_cast<size_t>(p)]].push_back(p);
    if (groups.size() <= static_cast<size_t>(n)) {
      std::vector<PointSet> parts;
      for (auto& [blk, grp] : groups) parts.push_back(std::move(grp));
      return {Dist::integer(pow_checked(ug.base, lv)), std::move(parts)};
    }
  }
  throw validation_error("ultrametric top level is not a single block");
}

}  // namespace

BnResult check_bn(const Space& domain, const Space& codomain, const MapTable& f, int n,
                  const Rat& r, const Budget& budget) {
  require_map(domain, codomain, f);
  if (n < 1) throw validation_error("part count must be at least 1");
  BnResult res;
  res.n = n;
  res.r = r;

  std::vector<PointSet> fiber(static_cast<size_t>(codomain.size()));
  for (PointId p = 0; p < domain.size(); ++p) fiber[static_cast<size_t>(f(p))].push_back(p);

  const std::vector<Dist>& cand = domain.distance_values();
  WorkMeter color_meter{budget.coloring_nodes, 0};
  size_t up_idx = 0, low_idx = 0;
  bool any_unknown = false;

  auto preimage = [&](const PointSet& b) {
    PointSet p;
    for (PointId yp : b) {
      const PointSet& fb = fiber[static_cast<size_t>(yp)];
      p.insert(p.end(), fb.begin(), fb.end());
    }
    std::sort(p.begin(), p.end());
    return p;
  };

  auto handle = [&](const PointSet& b) {
    PointSet p = preimage(b);
    if (p.size() <= static_cast<size_t>(n)) {
      if (res.decomposition.empty() && up_idx == 0) {
        res.worst_b = b;
        res.decomposition.clear();
        for (PointId q : p) res.decomposition.push_back({q});
      }
      return;
    }
    if (domain.is_ultrametric()) {
      auto [d, parts] = ultra_min_split(domain, p, n);
      size_t idx = static_cast<size_t>(
          std::lower_bound(cand.begin(), cand.end(), d) - cand.begin());
      if (idx > up_idx) {
        up_idx = idx;
        low_idx = std::max(low_idx, idx);  // exact: level below has > n blocks
        res.worst_b = b;
        res.decomposition = std::move(parts);
      }
      return;
    }
    // skip probe at the current maximum
    Tri t = n_colorable(domain, p, cand[up_idx], n, color_meter, nullptr);
    if (t == Tri::yes) return;
    if (t == Tri::unknown) any_unknown = true;
    size_t proven_no = (t == Tri::no) ? up_idx : (up_idx == 0 ? 0 : up_idx - 1);
    bool have_no = (t == Tri::no);
    size_t lo = up_idx, hi = cand.size() - 1;
    // the largest realized distance always succeeds: no conflict edges
    std::vector<PointSet> best_parts{p};
    while (hi - lo > 1) {
      size_t mid = lo + (hi - lo) / 2;
      std::vector<PointSet> mid_parts;
      Tri tm = n_colorable(domain, p, cand[mid], n, color_meter, &mid_parts);
      if (tm == Tri::yes) {
        hi = mid;
        best_parts = std::move(mid_parts);
      } else {
        if (tm == Tri::unknown) any_unknown = true;
        else {
          proven_no = std::max(proven_no, mid);
          have_no = true;
        }
        lo = mid;
      }
    }
    if (hi > up_idx) {
      up_idx = hi;
      res.worst_b = b;
      res.decomposition = std::move(best_parts);
    }
    if (have_no) low_idx = std::max(low_idx, proven_no + 1);
  };

  CliqueEnumStats stats = for_each_max_rclique(codomain, r, handle, budget.clique_expansions);
  res.clique_expansions = stats.expansions;
  res.coloring_nodes = color_meter.used;

  res.d_upper = cand[up_idx];
  res.d_lower = cand[std::min(low_idx, up_idx)];
  res.exact = stats.complete && !any_unknown && low_idx >= up_idx;
  if (!stats.complete) {
    // unseen subsets could force any value up to the trivial bound
    res.d_upper = cand.back();
    res.decomposition.clear();
  }
  res.minimal = res.exact;
  if (res.worst_b.empty() && up_idx == 0) {
    // every preimage fits in n singleton parts (or the codomain has no
    // subsets of positive diameter <= r at all)
    res.minimal = stats.complete;
    res.exact = stats.complete;
  }
  return res;
}

// ============================================================================
// Scale sweeps and constructions
// ============================================================================

CnResult check_cn(const Space& domain, const Space& codomain, const MapTable& f, int n,
                  const Budget& budget) {
  CnResult res;
  res.n = n;
  bool ignore = true;
  for (const Rat& r : geometric_schedule(codomain.scale_cap())) {
    BnResult bn = check_bn(domain, codomain, f, n, r, budget);
    res.exact = res.exact && bn.exact;
    res.schedule.emplace_back(r, std::move(bn));
  }
  if (res.schedule.empty()) throw validation_error("empty scale schedule");
  // minimal c over schedule tails, then the least r0 attaining it
  std::vector<Rat> vals;
  for (const auto& [r, bn] : res.schedule)
    vals.push_back(Dist::ratio_upper(bn.d_upper, Dist::integer(1), &ignore));
  size_t k = res.schedule.size();
  std::vector<Rat> tail_c(k);  // max_{i >= j} vals[i] / r_i
  for (size_t j = k; j-- > 0;) {
    Rat ratio = vals[j] / res.schedule[j].first;
    tail_c[j] = (j + 1 < k) ? std::max(ratio, tail_c[j + 1]) : ratio;
  }
  Rat best = tail_c[0];
  for (const Rat& c : tail_c) best = std::min(best, c);
  res.c = best;
  for (size_t j = 0; j < k; ++j)
    if (tail_c[j] == best) {
      res.r0 = res.schedule[j].first;
      break;
    }
  res.holds = true;
  for (size_t j = 0; j < k; ++j)
    if (res.schedule[j].first >= res.r0 &&
        !(res.schedule[j].second.d_upper <= res.c * res.schedule[j].first))
      res.holds = false;

  res.c_affine = res.c;
  Rat d(0);
  for (size_t j = 0; j < k; ++j) {
    Rat need = res.c * res.schedule[j].first;
    if (vals[j] > need) d = std::max(d, vals[j] - need);
  }
  res.d_affine = d;
  for (size_t j = 0; j < k; ++j)
    if (!(res.schedule[j].second.d_upper <= res.c_affine * res.schedule[j].first + res.d_affine))
      throw validation_error("affine control fit failed its own verification");
  return res;
}

BnCompose compose_bn(const Space& x, const Space& y, const Space& z, const MapTable& f, int n,
                     const MapTable& g, int m, const Rat& r, const Budget& budget) {
  BnResult bn_g = check_bn(y, z, g, m, r, budget);
  bool ignore = true;
  Rat r_mid = Dist::ratio_upper(bn_g.d_upper, Dist::integer(1), &ignore);
  BnResult bn_f = check_bn(x, y, f, n, r_mid, budget);
  BnCompose out;
  out.map = compose(x, y, z, f, g);
  out.parts = n * m;
  out.d_predicted = bn_f.d_upper;
  out.check = check_bn(x, z, out.map, out.parts, r, budget);
  if (out.check.exact && bn_f.exact && bn_g.exact && !(out.check.d_upper <= out.d_predicted))
    throw validation_error("composition bound fell below the verified value");
  return out;
}

BnCompose product_bn(const Space& x, const Space& y, const MapTable& f, int n, const Space& z,
                     const Space& w, const MapTable& g, int m, const Space& xz, const Space& yw,
                     const Rat& r, const Budget& budget) {
  BnResult bn_f = check_bn(x, y, f, n, r, budget);
  BnResult bn_g = check_bn(z, w, g, m, r, budget);
  BnCompose out;
  out.map = product_map(x, y, f, z, w, g, xz, yw);
  out.parts = n * m;
  Dist df = bn_f.d_upper, dg = bn_g.d_upper;
  out.d_predicted = (df.is_integer() && dg.is_integer())
                        ? df + dg
                        : Dist::integer(df.ceil_int() + dg.ceil_int());
  out.check = check_bn(xz, yw, out.map, out.parts, r, budget);
  if (out.check.exact && bn_f.exact && bn_g.exact && !(out.check.d_upper <= out.d_predicted))
    throw validation_error("product bound fell below the verified value");
  return out;
}

// ============================================================================
// Linear preimage selection
// ============================================================================

namespace {

struct SelectionSearch {
  const Space& s;
  const std::vector<const PointSet*>& fibers;  // ordered smallest first
  WorkMeter& meter;
  std::vector<PointId> chosen;
  Dist best;  // strictly improving
  std::vector<PointId> best_pick;
  bool exhausted = false;

  void run(size_t k, const Dist& cur) {
    if (k == fibers.size()) {
      best = cur;
      best_pick = chosen;
      return;
    }
    if (!meter.spend(1)) {
      exhausted = true;
      return;
    }
    for (PointId p : *fibers[k]) {
      Dist nxt = cur;
      for (size_t j = 0; j < k; ++j) nxt = std::max(nxt, s.dist(p, chosen[j]));
      if (!(nxt < best)) continue;
      chosen[k] = p;
      run(k + 1, nxt);
      if (exhausted) return;
    }
  }
};

}  // namespace

BLinearResult check_b_linear(const Space& domain, const Space& codomain, const MapTable& f,
                             const Budget& budget) {
  require_map(domain, codomain, f);
  if (!is_surjective(codomain, f))
    throw validation_error("preimage selection requires a surjective map");
  std::vector<PointSet> fiber(static_cast<size_t>(codomain.size()));
  for (PointId p = 0; p < domain.size(); ++p) fiber[static_cast<size_t>(f(p))].push_back(p);

  BLinearResult res;
  WorkMeter meter{budget.coloring_nodes, 0};
  for (const Rat& r : geometric_schedule(codomain.scale_cap())) {
    Dist worst;
    auto handle = [&](const PointSet& b) {
      std::vector<const PointSet*> fibs;
      for (PointId yp : b) fibs.push_back(&fiber[static_cast<size_t>(yp)]);
      std::sort(fibs.begin(), fibs.end(),
                [](const PointSet* a, const PointSet* bb) { return a->size() < bb->size(); });
      // greedy upper bound: nearest fiber point around every anchor
      Dist upper;
      bool have_upper = false;
      for (PointId yp : b) {
        for (PointId anchor : fiber[static_cast<size_t>(yp)]) {
          std::vector<PointId> pick;
          for (const PointSet* fb : fibs) {
            PointId bestp = (*fb)[0];
            Dist bd = domain.dist(anchor, bestp);
            for (PointId q : *fb) {
              Dist dq = domain.dist(anchor, q);
              if (dq < bd) {
                bd = dq;
                bestp = q;
              }
            }
            pick.push_back(bestp);
          }
          Dist diam;
          for (size_t i = 0; i < pick.size(); ++i)
            for (size_t j = i + 1; j < pick.size(); ++j)
              diam = std::max(diam, domain.dist(pick[i], pick[j]));
          if (!have_upper || diam < upper) upper = diam;
          have_upper = true;
          if (!meter.spend(1)) {
            res.exact = false;
            goto searched;  // keep the bound collected so far
          }
        }
      }
    searched:
      // every selection meets each fiber pair at least at its min distance
      {
        Dist lower;
        for (size_t i = 0; i < fibs.size(); ++i)
          for (size_t j = i + 1; j < fibs.size(); ++j) {
            Dist mn;
            bool first = true;
            for (PointId a : *fibs[i])
              for (PointId bb : *fibs[j]) {
                Dist d = domain.dist(a, bb);
                if (first || d < mn) mn = d;
                first = false;
              }
            lower = std::max(lower, mn);
          }
        if (lower < upper && res.exact) {
          SelectionSearch search{domain, fibs, meter, std::vector<PointId>(fibs.size()),
                                 upper, {}, false};
          // seed `best` with a value we can strictly improve on
          search.best = Dist::integer(upper.is_integer() ? upper.int_value() + 1
                                                         : upper.ceil_int() + 1);
          search.run(0, Dist());
          if (search.exhausted) res.exact = false;
          else upper = search.best;
        }
      }
      worst = std::max(worst, upper);
    };
    CliqueEnumStats stats =
        for_each_max_rclique(codomain, r, handle, budget.clique_expansions);
    if (!stats.complete) res.exact = false;
    res.schedule.emplace_back(r, worst);
  }
  bool ignore = true;
  Rat best(0);
  for (const auto& [r, v] : res.schedule) {
    Rat ratio = Dist::ratio_upper(v, Dist::integer(1), &ignore) / r;
    if (ratio > best) {
      best = ratio;
      res.binding_r = r;
    }
  }
  res.d = best;
  return res;
}

}  // namespace coarsetk
