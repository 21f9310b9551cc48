#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarsetk/builders.hpp"

using namespace coarsetk;

TEST_CASE("brick provider returns verified covers on lattices") {
  Budget big;
  BrickProvider bricks;
  CHECK(bricks.kind() == "grid-brick");

  Space line = Space::lattice("bp1", {{0, 60}}, Norm::l1);
  ExpandReport rep = bricks.cover_for(line, Rat(2), Rat(1), big);
  CHECK(rep.s_multiplicity <= 2);
  CHECK(rep.lebesgue_ok);
  CHECK(rep.cover.covers_space());

  Space plane = Space::lattice("bp2", {{0, 15}, {0, 15}}, Norm::linf);
  ExpandReport rp = bricks.cover_for(plane, Rat(1), Rat(1), big);
  CHECK(rp.s_multiplicity <= 3);
  CHECK(rp.lebesgue_ok);

  auto cd = bricks.an_constants(line, big);
  REQUIRE(cd.has_value());
  auto [c, d] = *cd;
  CHECK(c >= d);
  CHECK(d >= Rat(2));
  CHECK(c.is_integer());
  CHECK(d.is_integer());
  // the claim is honored on a fresh request
  ExpandReport probe = bricks.cover_for(line, Rat(3), Rat(2), big);
  CHECK(probe.mesh <= c * (Rat(3) + Rat(4) * Rat(2)) + d);
}

TEST_CASE("net provider works on matrix spaces") {
  Budget big;
  NetProvider nets;
  std::vector<i64> d(49);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      int diff = std::abs(i - j);
      d[static_cast<size_t>(i) * 7 + j] = std::min(diff, 7 - diff);
    }
  Space cyc = Space::from_matrix("np", 7, d);
  ExpandReport rep = nets.cover_for(cyc, Rat(1), Rat(1), big);
  CHECK(rep.lebesgue_ok);
  CHECK(rep.cover.covers_space());
  CHECK(rep.s_multiplicity >= 1);
}

TEST_CASE("component provider certifies multiplicity one below the gap") {
  Budget big;
  ComponentProvider comps;
  std::vector<i64> d = {
      0, 1, 20, 21,  //
      1, 0, 19, 20,  //
      20, 19, 0, 1,  //
      21, 20, 1, 0,  //
  };
  Space cl = Space::from_matrix("cp", 4, d);
  ExpandReport rep = comps.cover_for(cl, Rat(1), Rat(1), big);
  CHECK(rep.s_multiplicity == 1);
  CHECK(rep.lebesgue_ok);
  CHECK(rep.cover.size() == 2);
}

TEST_CASE("table provider re-verifies claims before serving them") {
  Budget big;
  Space line = Space::lattice("tp", {{0, 99}}, Norm::l1);

  SUBCASE("an honest entry is served") {
    TableProvider table;
    std::vector<PointSet> elems;
    for (i64 lo = 0; lo <= 90; lo += 10) {
      PointSet e;
      for (i64 v = std::max<i64>(0, lo - 3); v <= std::min<i64>(99, lo + 12); ++v)
        e.push_back(static_cast<PointId>(v));
      elems.push_back(std::move(e));
    }
    table.add({Rat(1), Rat(1), 2, Cover::make(line, std::move(elems))});
    ExpandReport rep = table.cover_for(line, Rat(1), Rat(1), big);
    CHECK(rep.s_multiplicity <= 2);
    CHECK(rep.lebesgue_ok);
  }
  SUBCASE("an overstated multiplicity claim is rejected with the witness") {
    TableProvider table;
    std::vector<PointSet> elems;
    for (i64 lo = 0; lo <= 90; lo += 10) {
      PointSet e;
      for (i64 v = lo; v < lo + 10; ++v) e.push_back(static_cast<PointId>(v));
      elems.push_back(std::move(e));
    }
    table.add({Rat(50), Rat(50), 2, Cover::make(line, std::move(elems))});
    CHECK_THROWS_WITH_AS(table.cover_for(line, Rat(50), Rat(50), big),
                         doctest::Contains("claim failed"), validation_error);
  }
  SUBCASE("a failed lebesgue claim is rejected") {
    TableProvider table;
    std::vector<PointSet> elems;
    for (i64 lo = 0; lo <= 90; lo += 10) {
      PointSet e;
      for (i64 v = lo; v < lo + 10; ++v) e.push_back(static_cast<PointId>(v));
      elems.push_back(std::move(e));
    }
    table.add({Rat(1), Rat(5), 2, Cover::make(line, std::move(elems))});
    CHECK_THROWS_AS(table.cover_for(line, Rat(1), Rat(5), big), validation_error);
  }
  SUBCASE("no entry dominating the request") {
    TableProvider table;
    CHECK_THROWS_AS(table.cover_for(line, Rat(1), Rat(1), big), validation_error);
  }
}

TEST_CASE("provider factory resolves names") {
  CHECK(make_provider("grid-brick")->kind() == "grid-brick");
  CHECK(make_provider("greedy-net")->kind() == "greedy-net");
  CHECK(make_provider("component")->kind() == "component");
  CHECK_THROWS_AS(make_provider("nope"), validation_error);
}

TEST_CASE("inductive build on a line produces a valid structure") {
  Budget big;
  BrickProvider bricks;
  Space line = Space::lattice("bl1", {{-80, 80}}, Norm::l1);
  BuiltPrecode built = build_precode_asdim(line, 1, bricks, line.index_of({0}), 16, big);
  CHECK(built.trace.provider == "grid-brick");
  CHECK(built.trace.n == 1);
  CHECK(built.trace.absorbed);
  REQUIRE_FALSE(built.trace.levels.empty());

  PrecodeReport rep = validate_precode(line, built.precode, 2, big);
  CHECK(rep.ok);
  CHECK(rep.exact);

  // per-step records: two provider-claim lines plus the five level checks
  int expected_level = 1;
  for (const auto& lv : built.trace.levels) {
    CHECK(lv.level == expected_level++);
    CHECK(lv.checks.size() == 7);
    CHECK(lv.mesh <= lv.mesh_bound);
    CHECK(lv.multiplicity <= 2);
    CHECK(lv.alpha >= 0);
  }
  // the requested scales follow s = (k+1) + 2*mesh(level k)
  CHECK(built.trace.levels.front().s == Rat(1));  // mesh(level 0) = 0
  CHECK(built.trace.levels.front().t == Rat(2));
}

TEST_CASE("inductive build on a plane verifies every level") {
  Budget big;
  BrickProvider bricks;
  Space plane = Space::lattice("bl2", {{-12, 12}, {-12, 12}}, Norm::linf);
  BuiltPrecode built = build_precode_asdim(plane, 2, bricks, plane.index_of({0, 0}), 16, big);
  CHECK(built.trace.absorbed);
  PrecodeReport rep = validate_precode(plane, built.precode, 3, big);
  CHECK(rep.ok);
  CHECK(rep.exact);
  CHECK(built.precode.levels.back().element(0).size() == static_cast<size_t>(plane.size()));
}

TEST_CASE("one-point spaces build the trivial two-level structure") {
  Budget big;
  BrickProvider bricks;
  Space pt = Space::lattice("bpt", {{5, 5}}, Norm::l1);
  BuiltPrecode built = build_precode_asdim(pt, 1, bricks, 0, 4, big);
  CHECK(built.trace.absorbed);
  CHECK(built.precode.levels.size() == 2);
  CHECK(validate_precode(pt, built.precode, 2, big).ok);
}

TEST_CASE("a level cap short of absorption is reported, not silently accepted") {
  Budget big;
  BrickProvider bricks;
  Space line = Space::lattice("bcap", {{-300, 300}}, Norm::l1);
  BuiltPrecode built = build_precode_asdim(line, 1, bricks, line.index_of({0}), 1, big);
  CHECK_FALSE(built.trace.absorbed);
  CHECK(built.precode.levels.back().size() > 1);
}

TEST_CASE("builder rejects bad arguments") {
  Budget big;
  BrickProvider bricks;
  Space line = Space::lattice("barg", {{0, 20}}, Norm::l1);
  CHECK_THROWS_AS(build_precode_asdim(line, -1, bricks, 0, 4, big), validation_error);
  CHECK_THROWS_AS(build_precode_asdim(line, 1, bricks, 999, 4, big), validation_error);
  CHECK_THROWS_AS(build_precode_asdim(line, 1, bricks, 0, 0, big), validation_error);
}

TEST_CASE("geometric-scale build carries the an constants") {
  Budget big;
  BrickProvider bricks;
  Space line = Space::lattice("ban", {{-220, 220}}, Norm::l1);
  BuiltPrecode built = build_precode_an(line, 1, bricks, line.index_of({0}), 12, big);
  CHECK(built.trace.absorbed);
  CHECK(built.precode.kind == PrecodeKind::an);

  auto cd = bricks.an_constants(line, big);
  REQUIRE(cd.has_value());
  i64 base = (Rat(14) * cd->first).floor();
  CHECK(built.precode.base == base);
  CHECK_FALSE(built.precode.an_c.is_zero());

  PrecodeReport rep = validate_precode(line, built.precode, 2, big);
  CHECK(rep.ok);
  CHECK(rep.exact);
  for (size_t i = 0; i < rep.level_mesh.size(); ++i)
    CHECK(rep.level_mesh[i] <= Rat(pow_checked(base, static_cast<int>(i))));
}

TEST_CASE("component provider drives zero-dimension builds") {
  Budget big;
  ComponentProvider comps;
  // clusters of 3 points spread 40 apart: dimension 0 below the spread
  std::vector<i64> d(12 * 12, 0);
  auto coord = [](int i) { return (i / 3) * 40 + (i % 3); };
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) d[static_cast<size_t>(i) * 12 + j] = std::abs(coord(i) - coord(j));
  Space cl = Space::from_matrix("bz", 12, d);
  BuiltPrecode built = build_precode_asdim(cl, 0, comps, 0, 8, big);
  CHECK(built.trace.absorbed);
  CHECK(validate_precode(cl, built.precode, 1, big).ok);
}
