#include "coarsetk/verify.hpp"

#include <functional>
#include <optional>
#include <sstream>

#include "coarsetk/builders.hpp"
#include "coarsetk/maps.hpp"
#include "coarsetk/precode.hpp"
#include "coarsetk/rng.hpp"
#include "coarsetk/witness.hpp"

namespace coarsetk {

namespace {

Rat ru(const Dist& d) {
  bool exact = true;
  return Dist::ratio_upper(d, Dist::integer(1), &exact);
}

struct Checker {
  SuiteReport& rep;

  void run(const std::string& name, const std::function<std::string()>& body) {
    CheckOutcome out;
    out.name = name;
    try {
      out.detail = body();
      out.pass = true;
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = e.what();
    }
    rep.checks.push_back(std::move(out));
  }

  /// Negative path: passes only when `body` throws a validation_error
  /// whose message contains `needle`.
  void expect_reject(const std::string& name, const std::string& needle,
                     const std::function<void()>& body) {
    CheckOutcome out;
    out.name = name;
    try {
      body();
      out.pass = false;
      out.detail = "accepted, expected a rejection mentioning \"" + needle + "\"";
    } catch (const validation_error& e) {
      std::string what = e.what();
      if (what.find(needle) != std::string::npos) {
        out.pass = true;
        out.detail = "rejected: " + what;
      } else {
        out.pass = false;
        out.detail = "rejected for the wrong reason: " + what;
      }
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("unexpected error: ") + e.what();
    }
    rep.checks.push_back(std::move(out));
  }
};

// ----------------------------------------------------------------------------
// Random instances (all sizes kept small enough for exact checks)
// ----------------------------------------------------------------------------

Space rand_space(Rng& rng, int idx) {
  if (rng.chance(2, 3)) {
    i64 len = rng.range(30, 90);
    return Space::lattice("v" + std::to_string(idx) + "line" + std::to_string(len),
                          {{0, len - 1}}, Norm::l1);
  }
  i64 a = rng.range(4, 12);
  i64 b = rng.range(4, 12);
  return Space::lattice("v" + std::to_string(idx) + "grid" + std::to_string(a) + "x" +
                            std::to_string(b),
                        {{0, a - 1}, {0, b - 1}}, rng.chance(1, 2) ? Norm::linf : Norm::l1);
}

Cover rand_cover(Rng& rng, const Space& s) {
  std::vector<PointSet> elems;
  int k = static_cast<int>(rng.range(3, 7));
  i64 max_rad = std::max<i64>(1, s.scale_cap() / 8);
  for (int i = 0; i < k; ++i) {
    PointId c = static_cast<PointId>(rng.range(0, s.size() - 1));
    PointSet e = ball(s, c, Rat(rng.range(0, max_rad)));
    bool dup = false;
    for (const PointSet& have : elems) dup = dup || have == e;
    if (!dup) elems.push_back(std::move(e));
  }
  std::vector<char> covered(static_cast<size_t>(s.size()), 0);
  for (const PointSet& e : elems)
    for (PointId p : e) covered[static_cast<size_t>(p)] = 1;
  for (PointId p = 0; p < s.size(); ++p)
    if (!covered[static_cast<size_t>(p)]) elems.push_back({p});
  return Cover::make(s, std::move(elems));
}

MapTable rand_map(Rng& rng, const Space& x, const Space& y) {
  std::vector<PointId> t(static_cast<size_t>(x.size()));
  switch (rng.below(3)) {
    case 0:
      for (PointId p = 0; p < x.size(); ++p)
        t[static_cast<size_t>(p)] = static_cast<PointId>(rng.below(static_cast<std::uint64_t>(y.size())));
      break;
    case 1: {  // near-monotone contraction with +-1 noise
      for (PointId p = 0; p < x.size(); ++p) {
        i64 v = static_cast<i64>(p) * y.size() / x.size() + rng.range(-1, 1);
        t[static_cast<size_t>(p)] = static_cast<PointId>(std::clamp<i64>(v, 0, y.size() - 1));
      }
      break;
    }
    default: {  // blockwise fold
      i64 q = rng.range(2, 4);
      for (PointId p = 0; p < x.size(); ++p)
        t[static_cast<size_t>(p)] = static_cast<PointId>((p / q) % y.size());
      break;
    }
  }
  return make_map(x, y, std::move(t));
}

/// Map with every fiber of size at most n (needs n * |Y| >= |X|).
MapTable rand_bounded_fiber_map(Rng& rng, const Space& x, const Space& y, int n) {
  std::vector<PointId> slots;
  slots.reserve(static_cast<size_t>(y.size()) * static_cast<size_t>(n));
  for (PointId q = 0; q < y.size(); ++q)
    for (int i = 0; i < n; ++i) slots.push_back(q);
  for (size_t i = slots.size(); i > 1; --i)
    std::swap(slots[i - 1], slots[rng.below(i)]);
  std::vector<PointId> t(slots.begin(), slots.begin() + x.size());
  return make_map(x, y, std::move(t));
}

Rat pick_scale(Rng& rng, const Space& y) {
  std::vector<Rat> sched = geometric_schedule(y.scale_cap());
  return sched[rng.below(sched.size())];
}

// ----------------------------------------------------------------------------
// lemmas: randomized pushforward inequalities and certificate closures
// ----------------------------------------------------------------------------

void lemmas_suite(SuiteReport& rep, std::uint64_t seed, const Budget& budget) {
  Checker ck{rep};

  ck.run("pushforward-mult-under-bounded-fibers", [&] {
    Rng rng(seed);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
      Space x = rand_space(rng, 100 + 2 * i);
      i64 len = x.size() + rng.range(0, 30);
      Space y = Space::lattice("v" + std::to_string(101 + 2 * i) + "line" + std::to_string(len),
                               {{0, len - 1}}, Norm::l1);
      int n = static_cast<int>(rng.range(1, 3));
      MapTable f = rand_bounded_fiber_map(rng, x, y, n);
      Cover u = rand_cover(rng, x);
      Cover fu = pushforward(x, y, u, f.table);
      if (fu.multiplicity() > u.multiplicity() * n) ++violations;
    }
    if (violations)
      throw validation_error("violations=" + std::to_string(violations) + " of 50");
    return std::string("instances=50 violations=0");
  });

  ck.run("pushforward-rmult-under-decomposition", [&] {
    Rng rng(seed + 1);
    int violations = 0, inexact = 0;
    for (int i = 0; i < 50; ++i) {
      Space x = rand_space(rng, 200 + 2 * i);
      Space y = rand_space(rng, 201 + 2 * i);
      MapTable f = rand_map(rng, x, y);
      int n = static_cast<int>(rng.range(1, 3));
      Rat r = pick_scale(rng, y);
      BnResult bn = check_bn(x, y, f, n, r, budget);
      Cover u = rand_cover(rng, x);
      Cover fu = pushforward(x, y, u, f.table);
      RMultiplicityResult lhs = r_multiplicity(y, fu, r, budget);
      RMultiplicityResult rhs = r_multiplicity(x, u, ru(bn.d_upper), budget);
      if (!lhs.exact || !rhs.exact) {
        ++inexact;
        continue;
      }
      if (lhs.value > rhs.value * n) ++violations;
    }
    if (violations)
      throw validation_error("violations=" + std::to_string(violations) + " of 50");
    return "instances=50 violations=0 inexact=" + std::to_string(inexact);
  });

  ck.run("pushforward-rmult-under-linear-control", [&] {
    Rng rng(seed + 2);
    int violations = 0, inexact = 0, scales = 0;
    for (int i = 0; i < 20; ++i) {
      Space x = rand_space(rng, 300 + 2 * i);
      Space y = rand_space(rng, 301 + 2 * i);
      MapTable f = rand_map(rng, x, y);
      int n = static_cast<int>(rng.range(1, 3));
      CnResult cn = check_cn(x, y, f, n, budget);
      if (!cn.exact || !cn.holds) {
        ++inexact;
        continue;
      }
      Cover u = rand_cover(rng, x);
      Cover fu = pushforward(x, y, u, f.table);
      for (const auto& [r, bn] : cn.schedule) {
        RMultiplicityResult lhs = r_multiplicity(y, fu, r, budget);
        if (!lhs.exact) {
          ++inexact;
          continue;
        }
        // affine dominating form, valid at every scheduled scale
        RMultiplicityResult affine =
            r_multiplicity(x, u, cn.c_affine * r + cn.d_affine, budget);
        if (!affine.exact) {
          ++inexact;
        } else {
          ++scales;
          if (lhs.value > affine.value * n) ++violations;
        }
        // linear form, valid from r0 up
        if (!(r >= cn.r0)) continue;
        RMultiplicityResult rhs = r_multiplicity(x, u, cn.c * r, budget);
        if (!rhs.exact) {
          ++inexact;
          continue;
        }
        ++scales;
        if (lhs.value > rhs.value * n) ++violations;
      }
    }
    if (violations) throw validation_error("violations=" + std::to_string(violations));
    return "instances=20 scales=" + std::to_string(scales) + " violations=0 inexact=" +
           std::to_string(inexact);
  });

  ck.run("composition-certificate-closure", [&] {
    Rng rng(seed + 3);
    int confirmed = 0, inexact = 0;
    for (int i = 0; i < 10; ++i) {
      Space x = rand_space(rng, 400 + 3 * i);
      Space y = rand_space(rng, 401 + 3 * i);
      Space z = rand_space(rng, 402 + 3 * i);
      MapTable f = rand_map(rng, x, y);
      MapTable g = rand_map(rng, y, z);
      int n = static_cast<int>(rng.range(1, 2));
      int m = static_cast<int>(rng.range(1, 2));
      Rat r = pick_scale(rng, z);
      BnCompose comp = compose_bn(x, y, z, f, n, g, m, r, budget);
      if (!comp.check.exact) {
        ++inexact;
        continue;
      }
      if (!(comp.check.d_upper <= ru(comp.d_predicted)))
        throw validation_error("composed bound above prediction at instance " +
                               std::to_string(i));
      ++confirmed;
    }
    return "instances=10 confirmed=" + std::to_string(confirmed) + " inexact=" +
           std::to_string(inexact);
  });

  ck.run("product-certificate-closure", [&] {
    Rng rng(seed + 4);
    int confirmed = 0, inexact = 0;

    PrecodeExample ex = example_dyadic(32);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    auto ultra = std::make_shared<Space>(ub.space);
    auto base = std::make_shared<Space>(ex.space);
    auto seg = std::make_shared<Space>(Space::lattice("seg16", {{0, 15}}, Norm::l1));
    MapTable id_seg = identity_map(*seg);

    Space xz1 = Space::product_max(ultra, seg);
    Space yw1 = Space::product_max(base, seg);
    BnCompose p1 = product_bn(*ultra, *base, qc.q, 2, *seg, *seg, id_seg, 1, xz1, yw1, Rat(8),
                              budget);
    if (p1.parts != 2) throw validation_error("quotient x identity should carry 2 parts");
    if (!p1.check.exact || !(p1.check.d_upper <= ru(p1.d_predicted)))
      throw validation_error("quotient x identity bound above prediction");
    ++confirmed;

    Space xz2 = Space::product_max(ultra, ultra);
    Space yw2 = Space::product_max(base, base);
    BnCompose p2 = product_bn(*ultra, *base, qc.q, 2, *ultra, *base, qc.q, 2, xz2, yw2, Rat(4),
                              budget);
    if (p2.parts != 4) throw validation_error("quotient x quotient should carry 4 parts");
    if (!p2.check.exact || !(p2.check.d_upper <= ru(p2.d_predicted)))
      throw validation_error("quotient x quotient bound above prediction");
    ++confirmed;

    for (int i = 0; i < 8; ++i) {
      i64 la = rng.range(10, 40), lb = rng.range(10, 40);
      auto x = std::make_shared<Space>(Space::lattice(
          "p" + std::to_string(500 + 4 * i) + "a" + std::to_string(la), {{0, la - 1}}, Norm::l1));
      auto y = std::make_shared<Space>(Space::lattice(
          "p" + std::to_string(501 + 4 * i) + "b" + std::to_string(lb), {{0, lb - 1}}, Norm::l1));
      i64 lc = rng.range(10, 40), ld = rng.range(10, 40);
      auto z = std::make_shared<Space>(Space::lattice(
          "p" + std::to_string(502 + 4 * i) + "c" + std::to_string(lc), {{0, lc - 1}}, Norm::l1));
      auto w = std::make_shared<Space>(Space::lattice(
          "p" + std::to_string(503 + 4 * i) + "d" + std::to_string(ld), {{0, ld - 1}}, Norm::l1));
      MapTable f = rand_map(rng, *x, *y);
      MapTable g = rand_map(rng, *z, *w);
      int n = static_cast<int>(rng.range(1, 2));
      int m = static_cast<int>(rng.range(1, 2));
      Space xz = Space::product_max(x, z);
      Space yw = Space::product_max(y, w);
      Rat r = pick_scale(rng, yw);
      BnCompose pr = product_bn(*x, *y, f, n, *z, *w, g, m, xz, yw, r, budget);
      if (!pr.check.exact) {
        ++inexact;
        continue;
      }
      if (!(pr.check.d_upper <= ru(pr.d_predicted)))
        throw validation_error("product bound above prediction at instance " + std::to_string(i));
      ++confirmed;
    }
    return "instances=10 confirmed=" + std::to_string(confirmed) + " inexact=" +
           std::to_string(inexact);
  });
}

// ----------------------------------------------------------------------------
// examples: the stock structures end to end
// ----------------------------------------------------------------------------

void examples_suite(SuiteReport& rep, const Budget& budget) {
  Checker ck{rep};

  ck.run("dyadic-precode-validates", [&] {
    PrecodeExample ex = example_dyadic(128);
    PrecodeReport pr = validate_precode(ex.space, ex.precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    if (!pr.exact) throw validation_error("validation hit the work budget");
    return "levels=" + std::to_string(ex.precode.levels.size()) +
           " disjoint=" + (pr.levels_disjoint ? std::string("yes") : std::string("no"));
  });

  ck.run("dyadic-quotient-minimal-splits", [&] {
    PrecodeExample ex = example_dyadic(128);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    if (!ub.chain_method || ub.divergence)
      throw validation_error("disjoint levels should use the parent-chain method");
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
    // frozen minimal split diameters for two parts at small scales
    const std::pair<i64, i64> expected[] = {{1, 0},  {2, 3},  {3, 9},  {4, 9},
                                            {5, 27}, {7, 27}, {8, 27}, {16, 81}};
    for (const auto& [r, d] : expected) {
      BnResult bn = check_bn(ub.space, ex.space, qc.q, 2, Rat(r), budget);
      if (!bn.exact || !bn.minimal)
        throw validation_error("split at r=" + std::to_string(r) + " not exactly resolved");
      if (!(bn.d_upper == Dist::integer(d)))
        throw validation_error("minimal split at r=" + std::to_string(r) + " is " +
                               bn.d_upper.str() + ", expected " + std::to_string(d));
    }
    return std::string("scales=8 all-minimal");
  });

  ck.run("dyadic-section-identities", [&] {
    PrecodeExample ex = example_dyadic(64);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    MapTable g = inverse_section(ex.space, ex.precode, ub.space, budget);
    for (PointId x = 0; x < ex.space.size(); ++x)
      if (qc.q.table[static_cast<size_t>(g.table[static_cast<size_t>(x)])] != x)
        throw validation_error("q(g(x)) != x at x=" + std::to_string(x));
    for (PointId u = 0; u < ub.space.size(); ++u)
      if (g.table[static_cast<size_t>(qc.q.table[static_cast<size_t>(u)])] != u)
        throw validation_error("g(q(u)) != u at u=" + std::to_string(u));
    return std::string("points=64 both-composites-identity");
  });

  ck.run("triadic-precode-validates", [&] {
    PrecodeExample ex = example_triadic(4);
    PrecodeReport pr = validate_precode(ex.space, ex.precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    if (!pr.exact) throw validation_error("validation hit the work budget");
    return "points=" + std::to_string(ex.space.size()) +
           " levels=" + std::to_string(ex.precode.levels.size());
  });

  ck.run("triadic-ternary-nesting", [&] {
    PrecodeExample ex = example_triadic(4);
    const Precode& p = ex.precode;
    int full_parents = 0;
    for (size_t i = 1; i < p.levels.size(); ++i) {
      std::vector<int> kids(p.levels[i].size(), 0);
      for (std::int32_t par : p.parent[i - 1]) ++kids[static_cast<size_t>(par)];
      i64 full = pow_checked(3, static_cast<int>(i));
      for (size_t e = 0; e < p.levels[i].size(); ++e) {
        if (static_cast<i64>(p.levels[i].element(e).size()) != full) continue;
        ++full_parents;
        if (kids[e] != 3)
          throw validation_error("full element " + std::to_string(e) + " at level " +
                                 std::to_string(i) + " has " + std::to_string(kids[e]) +
                                 " children, expected 3");
      }
    }
    return "full-parents=" + std::to_string(full_parents) + " all-ternary";
  });

  ck.run("triadic-linear-control", [&] {
    PrecodeExample ex = example_triadic(4);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
    CnResult cn = check_cn(ub.space, ex.space, qc.q, 2, budget);
    if (!cn.holds || !cn.exact) throw validation_error("linear control did not certify");
    if (!(cn.c <= Rat(3)))
      throw validation_error("fitted c = " + cn.c.str() + " exceeds 3");
    return "c=" + cn.c.str() + " r0=" + cn.r0.str();
  });

  ck.run("clusters-equivalence-within-mesh", [&] {
    PrecodeExample ex = example_clusters(2, 3, 8);
    PrecodeReport pr = validate_precode(ex.space, ex.precode, 1, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    MapTable g = inverse_section(ex.space, ex.precode, ub.space, budget);
    for (PointId u = 0; u < ub.space.size(); ++u)
      if (g.table[static_cast<size_t>(qc.q.table[static_cast<size_t>(u)])] != u)
        throw validation_error("g(q(u)) != u at u=" + std::to_string(u));
    EquivalenceReport eq = check_coarse_equivalence(ub.space, ex.space, qc.q, g);
    if (!(eq.s_on_domain == Dist::integer(0)))
      throw validation_error("g after q moved a point by " + eq.s_on_domain.str());
    if (!(eq.s_on_codomain <= ru(ex.precode.levels[0].mesh())))
      throw validation_error("q after g moved a point by " + eq.s_on_codomain.str() +
                             " > bottom mesh " + ex.precode.levels[0].mesh().str());
    if (!eq.within_cap) throw validation_error("closeness constants exceed the scale caps");
    return "closeness=" + eq.s_on_codomain.str() + " bottom-mesh=" +
           ex.precode.levels[0].mesh().str();
  });

  ck.run("clusters-ultrametric-quasi-isometry", [&] {
    PrecodeExample ex = example_clusters(2, 3, 8);
    // measure the geometric scheduling constants from the plain validation,
    // then re-validate with the geometric kind and base 14
    PrecodeReport plain = validate_precode(ex.space, ex.precode, 1, budget);
    if (!plain.ok) throw validation_error(plain.failure);
    Precode an = ex.precode;
    an.kind = PrecodeKind::an;
    an.base = 14;
    an.i0 = 0;
    Rat c(1);
    for (const auto& [r, lvl] : plain.schedule) {
      if (!(r >= Rat(1))) continue;
      Rat ratio = Rat(pow_checked(14, lvl)) / r;
      if (ratio > c) c = ratio;
    }
    an.an_c = c;
    an.an_r0 = Rat(1);
    PrecodeReport pr = validate_precode(ex.space, an, 1, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    UltraBuild ub = build_ultrametric(ex.space, an);
    QuotientCheck qc = quotient_map(ex.space, an, ub.space);
    // two-sided control on every pair: the schedule grid steps double r, so
    // the verified upper constant is 2c; the lower direction is the mesh
    // bound base^(merge level) itself
    int pairs = 0;
    for (PointId u = 0; u < ub.space.size(); ++u)
      for (PointId v = static_cast<PointId>(u + 1); v < ub.space.size(); ++v) {
        Dist dc = ub.space.dist(u, v);
        Dist dx = ex.space.dist(qc.q.table[static_cast<size_t>(u)],
                                qc.q.table[static_cast<size_t>(v)]);
        if (!le_affine(dc, c * Rat(2), dx, c * an.an_r0))
          throw validation_error("ultrametric distance " + dc.str() +
                                 " above the linear bound at pair (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
        if (!le_affine(dx, Rat(1), dc, Rat(0)))
          throw validation_error("base distance " + dx.str() + " above the merge-level mesh " +
                                 dc.str());
        ++pairs;
      }
    return "pairs=" + std::to_string(pairs) + " c=" + c.str();
  });
}

// ----------------------------------------------------------------------------
// builders: inductive constructions end to end
// ----------------------------------------------------------------------------

void builders_suite(SuiteReport& rep, const Budget& budget) {
  Checker ck{rep};
  BrickProvider brick;

  std::optional<BuiltPrecode> line, plane, an_line;

  ck.run("asdim-line-structure", [&] {
    Space x = Space::lattice("line401", {{-200, 200}}, Norm::l1);
    line = build_precode_asdim(x, 1, brick, x.index_of({0}), 16, budget);
    if (!line->trace.absorbed) throw validation_error("construction did not absorb");
    PrecodeReport pr = validate_precode(x, line->precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    if (!pr.exact) throw validation_error("validation hit the work budget");
    return "levels=" + std::to_string(line->precode.levels.size()) +
           " top-mesh=" + line->precode.levels.back().mesh().str();
  });

  ck.run("asdim-line-quotient-decomposition", [&] {
    if (!line) throw validation_error("skipped: structure build failed");
    Space x = Space::lattice("line401", {{-200, 200}}, Norm::l1);
    PrecodeReport pr = validate_precode(x, line->precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    UltraBuild ub = build_ultrametric(x, line->precode);
    QuotientCheck qc = quotient_map(x, line->precode, ub.space);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
    for (const auto& [r, lvl] : pr.schedule) {
      BnResult bn = check_bn(ub.space, x, qc.q, 2, r, budget);
      if (!bn.exact)
        throw validation_error("split at r=" + r.str() + " not exactly resolved");
      if (!(bn.d_upper <= Rat(pow_checked(line->precode.base, lvl))))
        throw validation_error("split diameter " + bn.d_upper.str() + " at r=" + r.str() +
                               " exceeds the scheduled level bound");
    }
    return "scales=" + std::to_string(pr.schedule.size()) + " parts=2";
  });

  ck.run("asdim-plane-structure", [&] {
    Space x = Space::lattice("plane81", {{-40, 40}, {-40, 40}}, Norm::linf);
    plane = build_precode_asdim(x, 2, brick, x.index_of({0, 0}), 16, budget);
    if (!plane->trace.absorbed) throw validation_error("construction did not absorb");
    PrecodeReport pr = validate_precode(x, plane->precode, 3, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    if (!pr.exact) throw validation_error("validation hit the work budget");
    return "levels=" + std::to_string(plane->precode.levels.size()) +
           " top-mesh=" + plane->precode.levels.back().mesh().str();
  });

  ck.run("asdim-plane-quotient-decomposition", [&] {
    if (!plane) throw validation_error("skipped: structure build failed");
    Space x = Space::lattice("plane81", {{-40, 40}, {-40, 40}}, Norm::linf);
    PrecodeReport pr = validate_precode(x, plane->precode, 3, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    UltraBuild ub = build_ultrametric(x, plane->precode);
    QuotientCheck qc = quotient_map(x, plane->precode, ub.space);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
    for (const auto& [r, lvl] : pr.schedule) {
      BnResult bn = check_bn(ub.space, x, qc.q, 3, r, budget);
      if (!bn.exact)
        throw validation_error("split at r=" + r.str() + " not exactly resolved");
      if (!(bn.d_upper <= Rat(pow_checked(plane->precode.base, lvl))))
        throw validation_error("split diameter " + bn.d_upper.str() + " at r=" + r.str() +
                               " exceeds the scheduled level bound");
    }
    return "scales=" + std::to_string(pr.schedule.size()) + " parts=3";
  });

  ck.run("asdim-point-trivial", [&] {
    Space x = Space::lattice("pt", {{0, 0}}, Norm::l1);
    BuiltPrecode bp = build_precode_asdim(x, 1, brick, 0, 3, budget);
    if (bp.precode.levels.size() != 2)
      throw validation_error("expected two levels, got " +
                             std::to_string(bp.precode.levels.size()));
    PrecodeReport pr = validate_precode(x, bp.precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    return std::string("levels=2");
  });

  ck.run("an-line-structure", [&] {
    Space x = Space::lattice("line6001", {{-3000, 3000}}, Norm::l1);
    an_line = build_precode_an(x, 1, brick, x.index_of({0}), 12, budget);
    if (!an_line->trace.absorbed) throw validation_error("construction did not absorb");
    if (an_line->precode.base != 28)
      throw validation_error("measured base " + std::to_string(an_line->precode.base) +
                             ", expected 14*2 = 28");
    PrecodeReport pr = validate_precode(x, an_line->precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    if (!pr.exact) throw validation_error("validation hit the work budget");
    for (size_t i = 0; i < pr.level_mesh.size(); ++i)
      if (!(pr.level_mesh[i] <= Rat(pow_checked(28, static_cast<int>(i)))))
        throw validation_error("mesh at level " + std::to_string(i) + " exceeds 28^i");
    return "levels=" + std::to_string(an_line->precode.levels.size()) +
           " c=" + an_line->precode.an_c.str();
  });

  ck.run("an-line-linear-control", [&] {
    if (!an_line) throw validation_error("skipped: structure build failed");
    Space x = Space::lattice("line6001", {{-3000, 3000}}, Norm::l1);
    PrecodeReport pr = validate_precode(x, an_line->precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    UltraBuild ub = build_ultrametric(x, an_line->precode);
    QuotientCheck qc = quotient_map(x, an_line->precode, ub.space);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
    CnResult cn = check_cn(ub.space, x, qc.q, 2, budget);
    if (!cn.holds || !cn.exact) throw validation_error("linear control did not certify");
    for (const auto& [r, lvl] : pr.schedule) {
      for (const auto& [rr, bn] : cn.schedule) {
        if (!(rr == r)) continue;
        if (!(bn.d_upper <= Rat(pow_checked(an_line->precode.base, lvl))))
          throw validation_error("split diameter " + bn.d_upper.str() + " at r=" + r.str() +
                                 " exceeds the scheduled level bound");
      }
    }
    return "c=" + cn.c.str() + " r0=" + cn.r0.str();
  });

  ck.run("an-point-trivial", [&] {
    Space x = Space::lattice("pt5", {{5, 5}}, Norm::l1);
    BuiltPrecode bp = build_precode_an(x, 1, brick, 0, 3, budget);
    if (bp.precode.levels.size() != 2)
      throw validation_error("expected two levels, got " +
                             std::to_string(bp.precode.levels.size()));
    PrecodeReport pr = validate_precode(x, bp.precode, 2, budget);
    if (!pr.ok) throw validation_error(pr.failure);
    return std::string("levels=2");
  });

  ck.expect_reject("provider-claim-rejection", "claim failed", [&] {
    Space x = Space::lattice("line100", {{0, 99}}, Norm::l1);
    TableProvider tp;
    std::vector<PointSet> blocks;
    for (PointId b = 0; b < 10; ++b) {
      PointSet blk;
      for (PointId p = 0; p < 10; ++p) blk.push_back(b * 10 + p);
      blocks.push_back(std::move(blk));
    }
    tp.add({Rat(1), Rat(50), 2, Cover::make(x, std::move(blocks))});
    build_precode_asdim(x, 1, tp, 0, 4, budget);
  });
}

}  // namespace

// ============================================================================
// Suite driver
// ============================================================================

int SuiteReport::passed() const {
  int n = 0;
  for (const CheckOutcome& c : checks) n += c.pass ? 1 : 0;
  return n;
}

bool SuiteReport::all_pass() const { return passed() == static_cast<int>(checks.size()); }

SuiteReport run_suite(const std::string& suite, std::uint64_t seed, const Budget& budget) {
  SuiteReport rep;
  rep.suite = suite;
  rep.seed = seed;
  if (suite == "lemmas") {
    lemmas_suite(rep, seed, budget);
  } else if (suite == "examples") {
    examples_suite(rep, budget);
  } else if (suite == "builders") {
    builders_suite(rep, budget);
  } else if (suite == "all") {
    lemmas_suite(rep, seed, budget);
    examples_suite(rep, budget);
    builders_suite(rep, budget);
  } else {
    throw validation_error("unknown suite: " + suite +
                           " (expected lemmas, examples, builders, or all)");
  }
  return rep;
}

std::string render_report(const SuiteReport& rep) {
  std::ostringstream os;
  os << "suite " << rep.suite << " seed " << rep.seed << "\n";
  for (const CheckOutcome& c : rep.checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " :: " << c.detail << "\n";
  os << "checks " << rep.passed() << "/" << rep.checks.size() << " pass\n";
  return os.str();
}

}  // namespace coarsetk
