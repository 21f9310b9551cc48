#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>

#include "coarsetk/budget.hpp"
#include "coarsetk/rng.hpp"
#include "coarsetk/space.hpp"

using namespace coarsetk;

TEST_CASE("rational normalization and ordering") {
  CHECK(Rat(6, 4) == Rat(3, 2));
  CHECK(Rat(0, 5) == Rat(0));
  CHECK(Rat(7).is_integer());
  CHECK(Rat(3, 2) > Rat(4, 3));
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(5, 3).floor() == 1);
  CHECK(Rat(5, 3).ceil() == 2);
  CHECK(Rat(6, 3).ceil() == 2);
  CHECK(Rat(3, 2).str() == "3/2");
  CHECK(Rat(4, 2).str() == "2");
  CHECK_THROWS_AS(Rat(-1), validation_error);
  CHECK_THROWS_AS(Rat(1, 0), validation_error);
}

TEST_CASE("rational arithmetic stays exact and nonnegative") {
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(3, 2) * Rat(4, 9) == Rat(2, 3));
  CHECK(Rat(5, 2) - Rat(1, 2) == Rat(2));
  CHECK(Rat(3, 4) / Rat(3, 2) == Rat(1, 2));
  CHECK_THROWS_AS(Rat(1, 3) - Rat(1, 2), validation_error);
}

TEST_CASE("checked integer helpers") {
  CHECK(pow_checked(3, 0) == 1);
  CHECK(pow_checked(3, 4) == 81);
  CHECK(pow_checked(2, 62) == (i64(1) << 62));
  CHECK_THROWS_AS(pow_checked(10, 40), exact_range_error);
  CHECK(isqrt_floor(0) == 0);
  CHECK(isqrt_floor(8) == 2);
  CHECK(isqrt_floor(9) == 3);
  i64 root = 0;
  CHECK(is_perfect_square(49, &root));
  CHECK(root == 7);
  CHECK_FALSE(is_perfect_square(50, &root));
}

TEST_CASE("distances compare exactly across integer and sqrt forms") {
  Dist two = Dist::integer(2);
  Dist r2 = Dist::sqrt_of(2);
  Dist r8 = Dist::sqrt_of(8);
  CHECK(r2 < two);
  CHECK(r8 > two);
  CHECK(r8 == Dist::sqrt_of(8));
  CHECK(Dist::sqrt_of(9) == Dist::integer(3));
  CHECK(Dist::sqrt_of(9).is_integer());

  // sqrt(2) vs rationals around 1.4142...: exact squared comparisons
  CHECK(r2 <= Rat(3, 2));
  CHECK(r2 > Rat(7, 5));     // (7/5)^2 = 49/25 < 2
  CHECK(r2 >= Rat(141, 100));
  CHECK(r2 < Rat(142, 100));
  CHECK(Dist::integer(3) <= Rat(3));

  CHECK(r2.ceil_int() == 2);
  CHECK(r2.floor_int() == 1);
  CHECK(Dist::integer(5).ceil_int() == 5);
  CHECK(r8.str() == "sqrt(8)");
  CHECK(Dist::integer(4).str() == "4");
}

TEST_CASE("affine distance bounds are exact") {
  // y <= c*x + u
  CHECK(le_affine(Dist::integer(10), Rat(2), Dist::integer(4), Rat(2)));
  CHECK_FALSE(le_affine(Dist::integer(11), Rat(2), Dist::integer(4), Rat(2)));
  // sqrt(2) <= 1 * sqrt(2) + 0
  CHECK(le_affine(Dist::sqrt_of(2), Rat(1), Dist::sqrt_of(2), Rat(0)));
  // sqrt(8) = 2*sqrt(2) <= 2 * sqrt(2) exactly
  CHECK(le_affine(Dist::sqrt_of(8), Rat(2), Dist::sqrt_of(2), Rat(0)));
  // sqrt(5) <= (3/2)*sqrt(2) fails: 5 > 9/4 * 2
  CHECK_FALSE(le_affine(Dist::sqrt_of(5), Rat(3, 2), Dist::sqrt_of(2), Rat(0)));

  bool exact = true;
  CHECK(Dist::ratio_upper(Dist::integer(10), Dist::integer(4), &exact) == Rat(5, 2));
  CHECK(exact);
  CHECK(Dist::ratio_le(Dist::integer(1), Dist::integer(2), Dist::integer(2), Dist::integer(3)));
  CHECK_FALSE(
      Dist::ratio_le(Dist::integer(2), Dist::integer(3), Dist::integer(1), Dist::integer(2)));
}

TEST_CASE("lattice spaces: distances, diameter, indexing") {
  Space line = Space::lattice("ln", {{0, 10}}, Norm::l1);
  CHECK(line.size() == 11);
  CHECK(line.dist(0, 10) == Dist::integer(10));
  CHECK(line.diameter() == Dist::integer(10));
  CHECK(line.scale_cap() == 10);

  Space grid = Space::lattice("gr", {{-2, 2}, {-2, 2}}, Norm::linf);
  CHECK(grid.size() == 25);
  PointId a = grid.index_of({-2, -2});
  PointId b = grid.index_of({2, 1});
  CHECK(grid.dist(a, b) == Dist::integer(4));
  CHECK(grid.coords(b) == std::vector<i64>{2, 1});
  CHECK(grid.diameter() == Dist::integer(4));

  Space l1grid = Space::lattice("g1", {{-2, 2}, {-2, 2}}, Norm::l1);
  CHECK(l1grid.dist(a, l1grid.index_of({2, 2})) == Dist::integer(8));

  Space euclid = Space::lattice("g2", {{0, 3}, {0, 3}}, Norm::l2);
  CHECK(euclid.dist(euclid.index_of({0, 0}), euclid.index_of({1, 1})) == Dist::sqrt_of(2));
  CHECK(euclid.dist(euclid.index_of({0, 0}), euclid.index_of({3, 0})) == Dist::integer(3));
  CHECK(euclid.diameter() == Dist::sqrt_of(18));
}

TEST_CASE("matrix spaces validate the metric axioms") {
  Space m = Space::from_matrix("m3", 3, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  CHECK(m.dist(0, 2) == Dist::integer(2));
  CHECK(m.label(1) == "p1");
  CHECK_THROWS_WITH_AS(Space::from_matrix("bad", 2, {0, 1, 2, 0}),
                       doctest::Contains("asymmetric"), validation_error);
  CHECK_THROWS_WITH_AS(Space::from_matrix("bad", 3, {0, 1, 5, 1, 0, 1, 5, 1, 0}),
                       doctest::Contains("triangle"), validation_error);
  CHECK_THROWS_AS(Space::from_matrix("bad", 2, {0, 0, 0, 0}), validation_error);
}

TEST_CASE("ultrametric spaces expose merge levels") {
  // blocks: level0 = 4 singletons, level1 = {0,1},{2,3}, level2 = all
  Space u = Space::ultrametric("u4", 3, {{0, 1, 2, 3}, {0, 0, 1, 1}, {0, 0, 0, 0}});
  CHECK(u.size() == 4);
  CHECK(u.ultra_levels() == 3);
  CHECK(u.shared_level(0, 0) == 0);
  CHECK(u.shared_level(0, 1) == 1);
  CHECK(u.shared_level(1, 2) == 2);
  CHECK(u.dist(0, 1) == Dist::integer(3));
  CHECK(u.dist(0, 3) == Dist::integer(9));
  // strong triangle, exhaustively
  for (PointId a = 0; a < 4; ++a)
    for (PointId b = 0; b < 4; ++b)
      for (PointId c = 0; c < 4; ++c) {
        Dist ac = u.dist(a, c), ab = u.dist(a, b), bc = u.dist(b, c);
        CHECK(ac <= (ab < bc ? bc : ab));
      }
}

TEST_CASE("product spaces use the max metric") {
  auto l = std::make_shared<Space>(Space::lattice("pl", {{0, 3}}, Norm::l1));
  auto r = std::make_shared<Space>(Space::lattice("pr", {{0, 5}}, Norm::l1));
  Space p = Space::product_max(l, r);
  CHECK(p.size() == 24);
  // point id = left * |right| + right per the indexing contract
  PointId a = 0;
  PointId b = static_cast<PointId>(3 * 6 + 5);
  CHECK(p.dist(a, b) == Dist::integer(5));
  CHECK(p.diameter() == Dist::integer(5));
}

TEST_CASE("balls and neighborhoods") {
  Space line = Space::lattice("nb", {{0, 10}}, Norm::l1);
  CHECK(ball(line, 5, Rat(2)) == PointSet{3, 4, 5, 6, 7});
  CHECK(ball(line, 0, Rat(0)) == PointSet{0});

  Space grid = Space::lattice("nb2", {{-2, 2}, {-2, 2}}, Norm::l1);
  PointId c = grid.index_of({0, 0});
  PointSet b1 = ball(grid, c, Rat(1));
  CHECK(b1.size() == 5);  // centre plus the four axis neighbours

  // open neighborhoods, including the zero-expansion convention
  CHECK(neighborhood(line, {0, 1}, Rat(2)) == PointSet{0, 1, 2});
  CHECK(neighborhood(line, {5}, Rat(2)) == PointSet{4, 5, 6});
  CHECK(neighborhood(line, {3}, Rat(0)) == PointSet{3});
  CHECK(neighborhood(line, {5}, Rat(2), Openness::closed) == PointSet{3, 4, 5, 6, 7});
  // ball(closed) contains the open ball
  for (i64 rr = 0; rr <= 4; ++rr) {
    PointSet open = neighborhood(line, {5}, Rat(rr));
    PointSet closed = neighborhood(line, {5}, Rat(rr), Openness::closed);
    CHECK(std::includes(closed.begin(), closed.end(), open.begin(), open.end()));
  }

  CHECK(set_distance(line, {0, 1}, {4, 9}) == Dist::integer(3));
  CHECK(set_diameter(line, {2, 5, 9}) == Dist::integer(7));
  CHECK(set_diameter(line, {4}) == Dist::integer(0));
  CHECK(set_diameter(line, {}) == Dist::integer(0));
}

TEST_CASE("geometric schedule doubles up to the cap") {
  CHECK(geometric_schedule(10) == std::vector<Rat>{Rat(1), Rat(2), Rat(4), Rat(8), Rat(10)});
  CHECK(geometric_schedule(8) == std::vector<Rat>{Rat(1), Rat(2), Rat(4), Rat(8)});
  CHECK(geometric_schedule(1) == std::vector<Rat>{Rat(1)});
  CHECK(geometric_schedule(0) == std::vector<Rat>{Rat(0)});
}

TEST_CASE("budget parsing and environment override") {
  Budget base;
  CHECK(base.clique_expansions == 1'000'000);
  CHECK(base.coloring_nodes == 100'000);

  Budget b1 = Budget::parse("500", base);
  CHECK(b1.clique_expansions == 500);
  CHECK(b1.coloring_nodes == 500);

  Budget b2 = Budget::parse("cliques=70,coloring=30", base);
  CHECK(b2.clique_expansions == 70);
  CHECK(b2.coloring_nodes == 30);

  CHECK_THROWS_AS(Budget::parse("nonsense=1", base), validation_error);

  setenv("COARSETK_BUDGET", "123", 1);
  Budget envb = Budget::from_env();
  CHECK(envb.clique_expansions == 123);
  unsetenv("COARSETK_BUDGET");
}

TEST_CASE("seeded rng is deterministic and in-range") {
  Rng a(42), b(42), c(43);
  bool same = true, diff = false;
  for (int i = 0; i < 200; ++i) {
    std::uint64_t va = a.raw();
    same = same && (va == b.raw());
    diff = diff || (va != c.raw());
  }
  CHECK(same);
  CHECK(diff);

  Rng r(7);
  for (int i = 0; i < 500; ++i) {
    i64 v = r.range(-3, 5);
    CHECK(v >= -3);
    CHECK(v <= 5);
  }
  for (int i = 0; i < 100; ++i) CHECK(r.below(1) == 0);
}
