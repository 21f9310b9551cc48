// Acceptance gate: one line per criterion, exit code = number of failures.
// Every expected value here is either pinned from the independent oracles in
// oracle.cpp or asserted structurally; tolerances are zero throughout.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "coarsetk/builders.hpp"
#include "coarsetk/rng.hpp"
#include "coarsetk/verify.hpp"
#include "oracle.hpp"

using namespace coarsetk;

namespace {

struct acc_fail : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw acc_fail(msg);
}

int g_failures = 0;

template <class Body>
void criterion(const char* name, double limit_s, Body body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  try {
    detail = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit_s) {
    pass = false;
    detail += " [over the time limit]";
  }
  if (!pass) ++g_failures;
  std::printf("%s %s :: %s (%.1fs / %.0fs)\n", pass ? "PASS" : "FAIL", name, detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

// minimal split diameter for the dyadic quotient at two parts, from the
// frozen brute-force closed form: d(1) = 0, d(r) = 3^ceil(log2 r) for r >= 2
i64 dyadic_min_split(i64 r) {
  if (r <= 1) return 0;
  int k = 0;
  while ((i64(1) << k) < r) ++k;
  return pow_checked(3, k);
}

std::string fmt(i64 v) { return std::to_string(v); }

}  // namespace

int main() {
  Budget budget;  // defaults; every check below demands exact completion

  // --- criterion 1: ultrametric axioms, exact arithmetic, zero tolerance ---
  criterion("criterion-1-ultrametric-axioms", 60.0, [&] {
    // binary-block quotient on 1024 leaves: closed form + sampled triples
    auto dy = example_dyadic(1024);
    UltraBuild ub = build_ultrametric(dy.space, dy.precode);
    require(ub.chain_method && !ub.divergence, "quotient construction degraded");
    Rng rng(20260815);
    for (int i = 0; i < 200'000; ++i) {
      PointId u = static_cast<PointId>(rng.below(1024));
      PointId v = static_cast<PointId>(rng.below(1024));
      Dist want = Dist::integer(0);
      if (u != v) {
        int p = 0;
        while ((u >> p) != (v >> p)) ++p;
        want = Dist::integer(pow_checked(3, p));
      }
      require(ub.space.dist(u, v) == want, "closed-form distance mismatch at a sampled pair");
    }
    i64 triples = 1'000'000;
    for (i64 i = 0; i < triples; ++i) {
      PointId a = static_cast<PointId>(rng.below(1024));
      PointId b = static_cast<PointId>(rng.below(1024));
      PointId c = static_cast<PointId>(rng.below(1024));
      Dist ab = ub.space.dist(a, b), bc = ub.space.dist(b, c), ac = ub.space.dist(a, c);
      require(ac <= std::max(ab, bc), "strong triangle violated on a sampled triple");
    }

    // ternary-block quotient on 729 leaves: exhaustive triple check
    auto tri = example_triadic(4);
    UltraBuild ut = build_ultrametric(tri.space, tri.precode);
    const PointId n = ut.space.size();
    require(n == 729, "unexpected leaf count " + fmt(n));
    std::vector<std::uint16_t> d(static_cast<size_t>(n) * n);
    for (PointId a = 0; a < n; ++a)
      for (PointId b = 0; b < n; ++b) {
        Dist v = ut.space.dist(a, b);
        require(v.is_integer() && v.int_value() <= 729, "distance out of ternary range");
        d[static_cast<size_t>(a) * n + b] = static_cast<std::uint16_t>(v.int_value());
      }
    for (PointId a = 0; a < n; ++a) {
      require(d[static_cast<size_t>(a) * n + a] == 0, "nonzero diagonal");
      for (PointId b = 0; b < n; ++b) {
        require(d[static_cast<size_t>(a) * n + b] == d[static_cast<size_t>(b) * n + a],
                "asymmetry");
        if (a != b) require(d[static_cast<size_t>(a) * n + b] > 0, "zero off-diagonal");
      }
    }
    i64 checked = 0;
    for (PointId a = 0; a < n; ++a) {
      const std::uint16_t* da = d.data() + static_cast<size_t>(a) * n;
      for (PointId b = 0; b < n; ++b) {
        const std::uint16_t* db = d.data() + static_cast<size_t>(b) * n;
        const std::uint16_t ab = da[b];
        for (PointId c = 0; c < n; ++c, ++checked)
          if (da[c] > std::max(ab, db[c])) throw acc_fail("strong triangle violated exhaustively");
      }
    }
    return "1.2M sampled binary-quotient checks + " + fmt(checked) +
           " exhaustive ternary triples, zero violations";
  });

  // --- criterion 2: dyadic 128, minimal split diameters at every r in 1..64 ---
  criterion("criterion-2-dyadic-minimal-splits", 30.0, [&] {
    auto dy = example_dyadic(128);
    PrecodeReport rep = validate_precode(dy.space, dy.precode, 2, budget);
    require(rep.ok && rep.exact, "structure failed to validate with two parts: " + rep.failure);
    UltraBuild ub = build_ultrametric(dy.space, dy.precode);
    QuotientCheck qc = quotient_map(dy.space, dy.precode, ub.space);
    require(qc.displacement_ok, "quotient displacement check failed");
    for (i64 r = 1; r <= 64; ++r) {
      BnResult bn = check_bn(ub.space, dy.space, qc.q, 2, Rat(r), budget);
      require(bn.exact, "split check inexact at r=" + fmt(r));
      require(bn.minimal, "split diameter not certified minimal at r=" + fmt(r));
      i64 want = dyadic_min_split(r);
      require(bn.d_upper == Dist::integer(want) && bn.d_lower == Dist::integer(want),
              "minimal split at r=" + fmt(r) + " is " + bn.d_upper.str() + ", expected " +
                  fmt(want));
    }
    for (i64 r = 1; r <= 16; ++r) {
      Dist want = oracle::min_split_line(ub.space, dy.space, qc.q, 2, r);
      require(want == Dist::integer(dyadic_min_split(r)),
              "independent oracle disagrees with the closed form at r=" + fmt(r));
    }
    return "64 scales minimal + exact, closed form re-confirmed by the window oracle for r <= 16";
  });

  // --- criterion 3: triadic K=4, ternary nesting, linear control c <= 3 ---
  criterion("criterion-3-triadic-linear-control", 30.0, [&] {
    auto tri = example_triadic(4);
    PrecodeReport rep = validate_precode(tri.space, tri.precode, 2, budget);
    require(rep.ok && rep.exact, "structure failed to validate with two parts: " + rep.failure);
    for (size_t lvl = 1; lvl < tri.precode.levels.size(); ++lvl) {
      const Cover& up = tri.precode.levels[lvl];
      for (std::int32_t e = 0; e < static_cast<std::int32_t>(up.size()); ++e) {
        if (static_cast<i64>(up.element(static_cast<size_t>(e)).size()) !=
            pow_checked(3, static_cast<int>(lvl)))
          continue;  // clipped boundary element
        int kids = 0;
        for (std::int32_t pe : tri.precode.parent[lvl - 1])
          if (pe == e) ++kids;
        require(kids == 3, "full element at level " + fmt(static_cast<i64>(lvl)) + " has " +
                               fmt(kids) + " children");
      }
    }
    UltraBuild ub = build_ultrametric(tri.space, tri.precode);
    QuotientCheck qc = quotient_map(tri.space, tri.precode, ub.space);
    CnResult cn = check_cn(ub.space, tri.space, qc.q, 2, budget);
    require(cn.exact && cn.holds, "linear control check did not complete exactly");
    require(cn.c <= Rat(3), "fitted c = " + cn.c.str() + " exceeds 3");
    return "validated, ternary nesting exact, fitted c = " + cn.c.str() + " <= 3, r0 = " +
           cn.r0.str();
  });

  // --- criterion 4: inductive builds, five per-level checks, split certificates ---
  criterion("criterion-4-inductive-builds", 120.0, [&] {
    BrickProvider bricks;
    std::string detail;

    struct Case {
      Space space;
      int n;
    };
    Case cases[] = {
        {Space::lattice("acc4_line", {{-200, 200}}, Norm::l1), 1},
        {Space::lattice("acc4_plane", {{-40, 40}, {-40, 40}}, Norm::linf), 2},
    };
    for (const Case& cs : cases) {
      PointId x0 = cs.space.size() / 2;
      BuiltPrecode built = build_precode_asdim(cs.space, cs.n, bricks, x0, 24, budget);
      require(built.trace.absorbed, cs.space.id() + ": level cap reached before absorption");
      // the five inductive properties were re-verified at every level
      for (const auto& lv : built.trace.levels) {
        require(lv.checks.size() >= 5, "missing per-level verification transcript");
        require(lv.mesh <= lv.mesh_bound, "level mesh above its verified bound");
        require(lv.multiplicity <= cs.n + 1, "level multiplicity above n+1");
      }
      PrecodeReport rep = validate_precode(cs.space, built.precode, cs.n + 1, budget);
      require(rep.ok && rep.exact, cs.space.id() + ": " + rep.failure);

      UltraBuild ub = build_ultrametric(cs.space, built.precode);
      QuotientCheck qc = quotient_map(cs.space, built.precode, ub.space);
      require(qc.displacement_ok, cs.space.id() + ": displacement check failed");
      for (const auto& [r, lvl] : rep.schedule) {
        BnResult bn = check_bn(ub.space, cs.space, qc.q, cs.n + 1, r, budget);
        require(bn.exact, cs.space.id() + ": split check inexact at r=" + r.str());
        require(bn.d_upper <= Rat(pow_checked(built.precode.base, lvl)),
                cs.space.id() + ": split diameter " + bn.d_upper.str() +
                    " above the scheduled level scale at r=" + r.str());
      }
      detail += cs.space.id() + ": " + fmt(static_cast<i64>(built.precode.levels.size())) +
                " levels, " + fmt(static_cast<i64>(rep.schedule.size())) + " scales certified; ";
    }
    return detail + "zero violations";
  });

  // --- criterion 5: geometric-scale build, mesh <= base^i, linear control ---
  criterion("criterion-5-geometric-build", 120.0, [&] {
    BrickProvider bricks;
    Space line = Space::lattice("acc5_line", {{-3000, 3000}}, Norm::l1);
    auto cd = bricks.an_constants(line, budget);
    require(cd.has_value(), "provider offered no mesh-growth constants");
    BuiltPrecode built = build_precode_an(line, 1, bricks, line.index_of({0}), 16, budget);
    require(built.trace.absorbed, "level cap reached before absorption");
    require(built.precode.kind == PrecodeKind::an, "result not tagged with geometric constants");
    i64 base = (Rat(14) * cd->first).floor();
    require(built.precode.base == base,
            "base " + fmt(built.precode.base) + " != 14c = " + fmt(base));

    PrecodeReport rep = validate_precode(line, built.precode, 2, budget);
    require(rep.ok && rep.exact, rep.failure);
    for (size_t i = 0; i < rep.level_mesh.size(); ++i)
      require(rep.level_mesh[i] <= Rat(pow_checked(base, static_cast<int>(i))),
              "mesh at level " + fmt(static_cast<i64>(i)) + " above base^i");

    UltraBuild ub = build_ultrametric(line, built.precode);
    QuotientCheck qc = quotient_map(line, built.precode, ub.space);
    require(qc.displacement_ok, "displacement check failed");
    CnResult cn = check_cn(ub.space, line, qc.q, 2, budget);
    require(cn.exact && cn.holds, "linear control check did not complete exactly");
    return "base " + fmt(base) + ", " + fmt(static_cast<i64>(built.precode.levels.size())) +
           " levels with mesh <= base^i, linear control c = " + cn.c.str() + ", r0 = " +
           cn.r0.str();
  });

  // --- criteria 6 and 7 share one run of the randomized lemma suite ---
  SuiteReport lemmas;
  double lemmas_secs = 0.0;
  {
    auto t0 = std::chrono::steady_clock::now();
    try {
      lemmas = run_suite("lemmas", 7, budget);
    } catch (const std::exception& e) {
      lemmas.checks.push_back({"suite", false, e.what()});
    }
    lemmas_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  auto lemma_verdict = [&](std::initializer_list<const char*> names) {
    std::string detail;
    for (const char* name : names) {
      bool found = false;
      for (const auto& ck : lemmas.checks)
        if (ck.name == name) {
          found = true;
          require(ck.pass, std::string(name) + ": " + ck.detail);
          detail += std::string(name) + " (" + ck.detail + "); ";
        }
      require(found, std::string("check missing from the suite: ") + name);
    }
    return detail;
  };

  criterion("criterion-6-pushforward-bounds", 60.0, [&] {
    std::string detail = lemma_verdict({"pushforward-mult-under-bounded-fibers",
                                        "pushforward-rmult-under-decomposition",
                                        "pushforward-rmult-under-linear-control"});
    require(lemmas_secs < 60.0, "lemma suite over the time limit");
    return detail + "zero violations";
  });

  criterion("criterion-7-certificate-closure", 60.0, [&] {
    std::string detail =
        lemma_verdict({"composition-certificate-closure", "product-certificate-closure"});
    require(lemmas_secs < 60.0, "lemma suite over the time limit");
    return detail + "zero violations";
  });

  // --- criterion 8: expansion grid, multiplicity/Lebesgue/mesh claims ---
  criterion("criterion-8-expansion-grid", 60.0, [&] {
    BrickProvider bricks;
    Space spaces[] = {
        Space::lattice("acc8_line", {{0, 200}}, Norm::l1),
        Space::lattice("acc8_plane", {{0, 40}, {0, 40}}, Norm::linf),
    };
    int grid_points = 0;
    for (const Space& sp : spaces) {
      auto cd = bricks.an_constants(sp, budget);
      require(cd.has_value(), sp.id() + ": no mesh-growth constants");
      for (i64 s = 1; s <= 6; ++s)
        for (i64 t = 1; t <= 6; ++t) {
          DisjointFamilies fam = default_families(sp, s + 4 * t);
          auto frep = validate_families(sp, fam);
          require(frep.ok, sp.id() + ": families invalid at s=" + fmt(s) + " t=" + fmt(t));
          ExpandReport rep = expand_to_lebesgue_cover(sp, fam, Rat(s), Rat(t), budget);
          require(rep.s_multiplicity <= static_cast<int>(fam.family_count()),
                  sp.id() + ": multiplicity above the family count at s=" + fmt(s) +
                      " t=" + fmt(t));
          require(rep.lebesgue_ok && rep.lebesgue_exact,
                  sp.id() + ": Lebesgue claim not exact at s=" + fmt(s) + " t=" + fmt(t));
          bool ex = true;
          Rat fm = Dist::ratio_upper(frep.mesh, Dist::integer(1), &ex);
          require(ex, "family mesh not rational");
          require(rep.mesh <= fm + Rat(4) * Rat(t),
                  sp.id() + ": mesh above mesh(F) + 4t at s=" + fmt(s) + " t=" + fmt(t));

          ExpandReport an = bricks.cover_for(sp, Rat(s), Rat(t), budget);
          require(an.mesh <= cd->first * (Rat(s) + Rat(4) * Rat(t)) + cd->second,
                  sp.id() + ": mesh above c*(s+4t)+d at s=" + fmt(s) + " t=" + fmt(t));
          ++grid_points;
        }
    }
    return fmt(grid_points) + " grid points across both spaces, zero violations";
  });

  // --- criterion 9: cluster space, section inverts the quotient exactly ---
  criterion("criterion-9-cluster-equivalence", 10.0, [&] {
    auto ex = example_clusters(2, 3, 8);
    PrecodeReport rep = validate_precode(ex.space, ex.precode, 1, budget);
    require(rep.ok && rep.exact, "structure failed to validate with one part: " + rep.failure);
    UltraBuild ub = build_ultrametric(ex.space, ex.precode);
    QuotientCheck qc = quotient_map(ex.space, ex.precode, ub.space);
    require(qc.displacement_ok, "displacement check failed");
    MapTable g = inverse_section(ex.space, ex.precode, ub.space, budget);
    for (PointId v = 0; v < ub.space.size(); ++v)
      require(g(qc.q(v)) == v, "the section does not invert the quotient");
    EquivalenceReport eq = check_coarse_equivalence(ub.space, ex.space, qc.q, g);
    require(eq.s_on_domain == Dist::integer(0), "g o q moved a point");
    bool ex_ok = true;
    Rat mesh0 = Dist::ratio_upper(rep.level_mesh.front(), Dist::integer(1), &ex_ok);
    require(ex_ok && eq.s_on_codomain <= mesh0,
            "closeness " + eq.s_on_codomain.str() + " above mesh(U_0) = " + mesh0.str());
    require(eq.within_cap, "closeness constants exceed the scale caps");
    return "g o q = id exactly, q o g within " + eq.s_on_codomain.str() + " <= mesh(U_0) = " +
           mesh0.str();
  });

  // --- criterion 10: the verification CLI is byte-deterministic ---
  criterion("criterion-10-deterministic-reports", 120.0, [&] {
#ifndef COARSETK_CLI_PATH
    throw acc_fail("CLI path not wired into the build");
#else
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    std::string cli = COARSETK_CLI_PATH;
    std::string out_a = "acceptance_report_a.txt";
    std::string out_b = "acceptance_report_b.txt";
    for (const std::string& out : {out_a, out_b}) {
      int rc = std::system((cli + " verify --suite all --seed 7 > " + out + " 2>&1").c_str());
      require(rc == 0, "verification run exited with status " + fmt(rc));
    }
    std::string a = slurp(out_a), b = slurp(out_b);
    std::remove(out_a.c_str());
    std::remove(out_b.c_str());
    require(!a.empty(), "empty report");
    require(a == b, "reports differ between runs");
    require(a.find("FAIL") == std::string::npos, "report contains failing checks");
    return "two runs, " + fmt(static_cast<i64>(a.size())) + " bytes each, byte-identical";
#endif
  });

  if (g_failures == 0) std::printf("acceptance: all 10 criteria pass\n");
  else std::printf("acceptance: %d criterion(s) failing\n", g_failures);
  return g_failures;
}
