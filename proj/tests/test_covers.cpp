#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "coarsetk/cover.hpp"
#include "coarsetk/precode.hpp"
#include "coarsetk/rng.hpp"
#include "oracle.hpp"

using namespace coarsetk;

namespace {

Cover ball_cover(const Space& s, Rng& rng, int tries) {
  std::vector<PointSet> elems;
  i64 rad_cap = std::max<i64>(1, s.scale_cap() / 6);
  for (int i = 0; i < tries; ++i) {
    PointId c = static_cast<PointId>(rng.below(static_cast<std::uint64_t>(s.size())));
    PointSet b = ball(s, c, Rat(rng.range(0, rad_cap)));
    if (std::find(elems.begin(), elems.end(), b) == elems.end()) elems.push_back(b);
  }
  // fill uncovered points with singletons so the family is a genuine cover
  std::vector<bool> hit(static_cast<size_t>(s.size()), false);
  for (const auto& e : elems)
    for (PointId p : e) hit[static_cast<size_t>(p)] = true;
  for (PointId p = 0; p < s.size(); ++p)
    if (!hit[static_cast<size_t>(p)]) elems.push_back({p});
  return Cover::make(s, std::move(elems));
}

}  // namespace

TEST_CASE("cover construction validates its input") {
  Space line = Space::lattice("cl", {{0, 5}}, Norm::l1);
  Cover c = Cover::make(line, {{0, 1, 2}, {2, 3}, {3, 4, 5}});
  CHECK(c.size() == 3);
  CHECK(c.space_id() == "cl");
  CHECK(c.covers_space());
  CHECK(c.mesh() == Dist::integer(2));
  CHECK(c.element_diameter(1) == Dist::integer(1));
  CHECK(c.incident(2) == std::vector<int>{0, 1});
  CHECK(c.incident(5) == std::vector<int>{2});

  // holes are rejected when coverage is required, accepted otherwise
  CHECK_THROWS_AS(Cover::make(line, {{0, 1}, {3, 4, 5}}), validation_error);
  Cover partial = Cover::make(line, {{0, 1}, {3, 4, 5}}, false);
  CHECK_FALSE(partial.covers_space());

  CHECK_THROWS_AS(Cover::make(line, {}), validation_error);
  CHECK_THROWS_AS(Cover::make(line, {{0, 1}, {}, {2, 3, 4, 5}}), validation_error);
  CHECK_THROWS_AS(Cover::make(line, {{0, 99}}), validation_error);
}

TEST_CASE("multiplicity counts the worst point") {
  Space line = Space::lattice("cm", {{0, 10}}, Norm::l1);
  Cover c = Cover::make(line, {{0, 1, 2, 3, 4}, {3, 4, 5, 6}, {5, 6, 7, 8, 9, 10}});
  CHECK(c.multiplicity() == 2);
  CHECK_FALSE(c.pairwise_disjoint());
  Cover d = Cover::make(line, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8, 9, 10}});
  CHECK(d.multiplicity() == 1);
  CHECK(d.pairwise_disjoint());
}

TEST_CASE("r-multiplicity matches the brute-force oracle on random instances") {
  Budget big;
  int checked = 0;
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Rng rng(seed);
    i64 len = rng.range(6, 14);
    Space s = Space::lattice("rm" + std::to_string(seed), {{0, len}}, Norm::l1);
    Cover c = ball_cover(s, rng, static_cast<int>(rng.range(2, 4)));
    for (i64 r : {0, 1, 2, 3, 5}) {
      auto res = r_multiplicity(s, c, Rat(r), big);
      REQUIRE(res.exact);
      int want = oracle::r_multiplicity(s, c, Rat(r));
      CHECK(res.value == want);
      // the witness must itself realize the value
      REQUIRE(res.witness.size() <= 64);
      CHECK(set_diameter(s, res.witness) <= Rat(r));
      CHECK(static_cast<int>(res.witness_elements.size()) == res.value);
      ++checked;
    }
  }
  CHECK(checked == 150);
}

TEST_CASE("r-multiplicity at r=0 equals plain multiplicity") {
  Rng rng(7);
  Budget big;
  for (int i = 0; i < 10; ++i) {
    Space s = Space::lattice("rz" + std::to_string(i), {{0, rng.range(5, 12)}}, Norm::l1);
    Cover c = ball_cover(s, rng, 3);
    auto res = r_multiplicity(s, c, Rat(0), big);
    REQUIRE(res.exact);
    CHECK(res.value == c.multiplicity());
  }
}

TEST_CASE("lebesgue number matches the brute-force oracle") {
  Budget big;
  for (std::uint64_t seed = 300; seed < 325; ++seed) {
    Rng rng(seed);
    i64 len = rng.range(6, 14);
    Space s = Space::lattice("lb" + std::to_string(seed), {{0, len}}, Norm::l1);
    Cover c = ball_cover(s, rng, static_cast<int>(rng.range(2, 4)));

    auto res = lebesgue_number(s, c, LebesgueMode::exact, big);
    REQUIRE(res.exact);
    oracle::Lebesgue want = oracle::lebesgue(s, c);
    CHECK(res.value == want.value);
    CHECK(res.at_cap == want.at_cap);
    if (!res.at_cap) {
      // the reported bad set must defeat every element at the next scale up
      REQUIRE_FALSE(res.witness_bad_set.empty());
      bool fits = false;
      for (size_t e = 0; e < c.size(); ++e)
        fits = fits || subset_of(res.witness_bad_set, c.element(e));
      CHECK_FALSE(fits);
      CHECK(res.value < set_diameter(s, res.witness_bad_set));
    }

    // the ball certificate never overshoots the exact value
    auto cert = lebesgue_number(s, c, LebesgueMode::ball_certificate, big);
    CHECK(cert.value <= res.value);
  }
}

TEST_CASE("lebesgue_at_least answers threshold queries") {
  Space line = Space::lattice("lt", {{0, 10}}, Norm::l1);
  Cover c = Cover::make(line, {{0, 1, 2, 3, 4, 5}, {4, 5, 6, 7, 8, 9, 10}});
  Budget big;
  oracle::Lebesgue want = oracle::lebesgue(line, c);
  REQUIRE(want.value.is_integer());
  Rat wv(want.value.int_value());
  bool exact = true;
  PointSet bad;
  CHECK(lebesgue_at_least(line, c, wv, LebesgueMode::exact, big, &exact, &bad));
  CHECK(exact);
  CHECK_FALSE(lebesgue_at_least(line, c, wv + Rat(1), LebesgueMode::exact, big, &exact, &bad));
}

TEST_CASE("a seam drops the lebesgue number to zero") {
  // dyadic level-3 blocks on [0,15]: {0..7}, {8..15}; the pair {7,8} crosses
  Space line = Space::lattice("seam", {{0, 15}}, Norm::l1);
  Cover blocks = Cover::make(line, {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}});
  Budget big;
  auto res = lebesgue_number(line, blocks, LebesgueMode::exact, big);
  REQUIRE(res.exact);
  CHECK(res.value == Dist::integer(0));
  CHECK_FALSE(res.at_cap);
  CHECK(res.witness_bad_set == PointSet{7, 8});
}

TEST_CASE("high multiplicity can coexist with a positive lebesgue number") {
  // A cover can have multiplicity 2 and exact Lebesgue number 2 while a set of
  // diameter 1 already meets three elements: bounded overlap at one scale does
  // not transfer down to smaller scales for arbitrary covers.
  Space line = Space::lattice("cx", {{0, 10}}, Norm::l1);
  Cover c = Cover::make(line, {{0, 1, 2, 3, 4}, {3, 4, 5, 6}, {5, 6, 7, 8, 9, 10}});
  Budget big;
  CHECK(c.multiplicity() == 2);
  auto leb = lebesgue_number(line, c, LebesgueMode::exact, big);
  REQUIRE(leb.exact);
  CHECK(leb.value == Dist::integer(2));
  auto rm = r_multiplicity(line, c, Rat(1), big);
  REQUIRE(rm.exact);
  CHECK(rm.value == 3);
  CHECK(rm.witness == PointSet{4, 5});
}

TEST_CASE("r-disjointness of families") {
  Space line = Space::lattice("rd", {{0, 20}}, Norm::l1);
  CHECK(is_r_disjoint(line, {{0, 1}, {5, 6}, {10, 11}}, Rat(3)).ok);
  auto rep = is_r_disjoint(line, {{0, 1}, {5, 6}}, Rat(4));
  CHECK_FALSE(rep.ok);  // separation must be strictly more than r
  CHECK(rep.elem_a == 0);
  CHECK(rep.elem_b == 1);
  CHECK(rep.distance == Dist::integer(4));
  CHECK(is_r_disjoint(line, {{0, 1}}, Rat(100)).ok);
  CHECK(is_r_disjoint(line, {}, Rat(100)).ok);
}

TEST_CASE("disjoint families validate and flatten to covers") {
  Space line = Space::lattice("df", {{0, 11}}, Norm::l1);
  DisjointFamilies fam;
  fam.space_id = "df";
  fam.r = Rat(2);
  fam.families = {{{0, 1, 2}, {6, 7, 8}}, {{3, 4, 5}, {9, 10, 11}}};
  auto rep = validate_families(line, fam);
  CHECK(rep.ok);
  CHECK(rep.disjointness.ok);
  CHECK(rep.mesh == Dist::integer(2));

  Cover flat = families_to_cover(line, fam);
  CHECK(flat.size() == 4);
  CHECK(flat.covers_space());
  CHECK(flat.multiplicity() == 1);

  DisjointFamilies bad = fam;
  bad.families[0] = {{0, 1, 2}, {4, 5}};
  auto brep = validate_families(line, bad);
  CHECK_FALSE(brep.ok);
  CHECK(brep.failure.find("family 0") != std::string::npos);

  DisjointFamilies wrong_id = fam;
  wrong_id.space_id = "other";
  CHECK_FALSE(validate_families(line, wrong_id).ok);
}

TEST_CASE("pushforward relabels elements through a map") {
  Space dom = Space::lattice("pd", {{0, 7}}, Norm::l1);
  Space cod = Space::lattice("pc", {{0, 3}}, Norm::l1);
  std::vector<PointId> table = {0, 0, 1, 1, 2, 2, 3, 3};
  Cover u = Cover::make(dom, {{0, 1, 2}, {3, 4}, {5, 6, 7}});
  Cover fu = pushforward(dom, cod, u, table);
  CHECK(fu.size() == 3);
  CHECK(fu.element(0) == PointSet{0, 1});
  CHECK(fu.element(1) == PointSet{1, 2});
  CHECK(fu.element(2) == PointSet{2, 3});
  CHECK(fu.covers_space());
}

TEST_CASE("refinement is containment element by element") {
  Space line = Space::lattice("rf", {{0, 9}}, Norm::l1);
  Cover fine = Cover::make(line, {{0, 1}, {2, 3, 4}, {5, 6}, {7, 8, 9}});
  Cover coarse = Cover::make(line, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}});
  CHECK(refines(fine, coarse));
  CHECK_FALSE(refines(coarse, fine));
  Cover straddle = Cover::make(line, {{0, 1, 2, 3, 4}, {4, 5, 6}, {7, 8, 9}});
  CHECK_FALSE(refines(straddle, coarse));
}

TEST_CASE("r-multiplicity respects the work budget") {
  Space line = Space::lattice("bq", {{0, 30}}, Norm::l1);
  std::vector<PointSet> elems;
  for (PointId p = 0; p <= 30; ++p) elems.push_back(ball(line, p, Rat(3)));
  Cover c = Cover::make(line, std::move(elems));
  Budget tiny;
  tiny.clique_expansions = 5;
  auto res = r_multiplicity(line, c, Rat(2), tiny);
  CHECK_FALSE(res.exact);
  Budget big;
  auto full = r_multiplicity(line, c, Rat(2), big);
  CHECK(full.exact);
  CHECK(res.value <= full.value);  // lower bound only when truncated
}
