#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "coarsetk/json_io.hpp"

using namespace coarsetk;

TEST_CASE("scalars round-trip through their shortest forms") {
  CHECK(rat_to_json(Rat(7)).is_number_integer());
  CHECK(rat_to_json(Rat(7)) == json(7));
  CHECK(rat_to_json(Rat(3, 2)) == json("3/2"));
  CHECK(rat_from_json(json(7)) == Rat(7));
  CHECK(rat_from_json(json("3/2")) == Rat(3, 2));
  CHECK(rat_from_json(rat_to_json(Rat(355, 113))) == Rat(355, 113));
  CHECK_THROWS_AS(rat_from_json(json("x/y")), validation_error);
  CHECK_THROWS_AS(rat_from_json(json(-2)), validation_error);

  CHECK(dist_to_json(Dist::integer(5)) == json(5));
  CHECK(dist_to_json(Dist::sqrt_of(2)) == json("sqrt(2)"));
  CHECK(dist_from_json(json(5)) == Dist::integer(5));
  CHECK(dist_from_json(json("sqrt(2)")) == Dist::sqrt_of(2));
  CHECK(dist_from_json(dist_to_json(Dist::sqrt_of(8))) == Dist::sqrt_of(8));
  CHECK(dist_from_json(json("sqrt(9)")) == Dist::integer(3));
}

TEST_CASE("spaces of every geometry round-trip") {
  SUBCASE("lattice") {
    Space s = Space::lattice("jl", {{-3, 3}, {0, 5}}, Norm::linf);
    Space back = space_from_json(space_to_json(s));
    CHECK(back.id() == s.id());
    CHECK(back.size() == s.size());
    for (PointId a = 0; a < s.size(); ++a)
      for (PointId b = 0; b < s.size(); ++b) CHECK(back.dist(a, b) == s.dist(a, b));
  }
  SUBCASE("matrix with labels") {
    Space s = Space::from_matrix("jm", 3, {0, 2, 3, 2, 0, 2, 3, 2, 0}, std::nullopt,
                                 {"a", "b", "c"});
    Space back = space_from_json(space_to_json(s));
    CHECK(back.label(2) == "c");
    CHECK(back.dist(0, 2) == Dist::integer(3));
  }
  SUBCASE("ultrametric") {
    Space s = Space::ultrametric("ju", 3, {{0, 1, 2, 3}, {0, 0, 1, 1}, {0, 0, 0, 0}});
    Space back = space_from_json(space_to_json(s));
    CHECK(back.is_ultrametric());
    CHECK(back.dist(0, 1) == Dist::integer(3));
    CHECK(back.dist(0, 2) == Dist::integer(9));
  }
  SUBCASE("product") {
    auto l = std::make_shared<Space>(Space::lattice("jpl", {{0, 3}}, Norm::l1));
    auto r = std::make_shared<Space>(Space::lattice("jpr", {{0, 2}}, Norm::l1));
    Space s = Space::product_max(l, r);
    json j = space_to_json(s);
    Space back = space_from_json(j);
    CHECK(back.is_product());
    for (PointId a = 0; a < s.size(); ++a)
      for (PointId b = 0; b < s.size(); ++b) CHECK(back.dist(a, b) == s.dist(a, b));
    // tampering with a factor id breaks the load
    j["geometry"]["left"]["id"] = "elsewhere";
    CHECK_THROWS_AS(space_from_json(j), validation_error);
  }
}

TEST_CASE("covers and maps round-trip against their spaces") {
  Space s = Space::lattice("jc", {{0, 9}}, Norm::l1);
  Cover c = Cover::make(s, {{0, 1, 2, 3}, {3, 4, 5, 6}, {6, 7, 8, 9}});
  Cover back = cover_from_json(s, cover_to_json(c));
  CHECK(back.size() == c.size());
  for (size_t e = 0; e < c.size(); ++e) CHECK(back.element(e) == c.element(e));

  Space t = Space::lattice("jt", {{0, 4}}, Norm::l1);
  std::vector<PointId> tab;
  for (i64 v = 0; v <= 9; ++v) tab.push_back(static_cast<PointId>(v / 2));
  MapTable f = make_map(s, t, tab);
  MapTable fb = map_from_json(s, t, map_to_json(f));
  CHECK(fb.domain_id == f.domain_id);
  CHECK(fb.codomain_id == f.codomain_id);
  CHECK(fb.table == f.table);

  // wrong-space loads are rejected
  CHECK_THROWS_AS(cover_from_json(t, cover_to_json(c)), validation_error);
  CHECK_THROWS_AS(map_from_json(t, s, map_to_json(f)), validation_error);
}

TEST_CASE("precodes round-trip with parents and kind tags") {
  auto [space, pre] = example_triadic(2, true);
  json j = precode_to_json(pre);
  Precode back = precode_from_json(space, j);
  CHECK(back.space_id == pre.space_id);
  CHECK(back.levels.size() == pre.levels.size());
  for (size_t i = 0; i < pre.levels.size(); ++i) {
    CHECK(back.levels[i].size() == pre.levels[i].size());
    for (size_t e = 0; e < pre.levels[i].size(); ++e)
      CHECK(back.levels[i].element(e) == pre.levels[i].element(e));
  }
  CHECK(back.parent == pre.parent);
  CHECK(back.kind == PrecodeKind::an);
  CHECK(back.base == pre.base);
  CHECK(back.i0 == pre.i0);
  CHECK(back.an_c == pre.an_c);
  CHECK(back.an_r0 == pre.an_r0);
}

TEST_CASE("newick export follows the nesting") {
  auto dyadic = example_dyadic(4);
  CHECK(newick_export(dyadic.space, dyadic.precode) == "((0,1),(2,3));");

  auto single = example_dyadic(1);
  CHECK(newick_export(single.space, single.precode) == "0;");

  auto triadic = example_triadic(0);
  CHECK(newick_export(triadic.space, triadic.precode) == "((-4,-3,-2),(-1,0,1),(2,3,4));");
}

TEST_CASE("leaf matrices are symmetric with zero diagonal") {
  auto [space, pre] = example_dyadic(8);
  UltraBuild ub = build_ultrametric(space, pre);
  json m = leaf_matrix_json(ub.space);
  REQUIRE(m["labels"].size() == 8);
  auto& d = m["matrix"];
  REQUIRE(d.size() == 8);
  for (size_t a = 0; a < 8; ++a) {
    CHECK(d[a][a] == json(0));
    for (size_t b = 0; b < 8; ++b) CHECK(d[a][b] == d[b][a]);
  }
  CHECK(d[0][1] == json(3));
  CHECK(d[0][2] == json(9));
  CHECK(d[0][7] == json(27));
}

TEST_CASE("json files save and load faithfully") {
  json j;
  j["name"] = "probe";
  j["values"] = {1, 2, 3};
  std::string path = "jsonio_test_tmp.json";
  save_json_file(path, j);
  json back = load_json_file(path);
  CHECK(back == j);
  // the file is pretty-printed with a trailing newline
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  CHECK(text.back() == '\n');
  CHECK(text.find("  \"name\"") != std::string::npos);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_json_file("does_not_exist_anywhere.json"), validation_error);
  save_json_file("jsonio_bad_tmp.json", j);
  std::ofstream trunc("jsonio_bad_tmp.json");
  trunc << "{ not json";
  trunc.close();
  CHECK_THROWS_AS(load_json_file("jsonio_bad_tmp.json"), validation_error);
  std::remove("jsonio_bad_tmp.json");
}
