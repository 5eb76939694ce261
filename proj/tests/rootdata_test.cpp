#include "critfan/rootdata.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace critfan;
using critfan::testing::qmat;
using critfan::testing::qvec;

TEST_CASE("general linear rank 3") {
  RootDatum rd = build_root_datum({{{Family::GL, 3}}});
  CHECK(rd.dim == 3);
  REQUIRE(rd.simple_roots.size() == 2);
  CHECK(vec_eq(rd.simple_roots[0], qvec({1, -1, 0})));
  CHECK(vec_eq(rd.simple_roots[1], qvec({0, 1, -1})));
  CHECK(rd.positive_roots.size() == 3);
  CHECK(vec_eq(rd.two_rho, qvec({2, 0, -2})));
  CHECK(mat_eq(rd.center, qmat({{1, 1, 1}})));
  CHECK(rd.antidominant.lineality_dim() == 1);
  CHECK(cone_contains(rd.antidominant, qvec({-2, 0, 1})));
  CHECK_FALSE(cone_contains(rd.antidominant, qvec({1, 0, -1})));
}

TEST_CASE("odd orthogonal rank 3") {
  RootDatum rd = build_root_datum({{{Family::SO_odd, 3}}});
  CHECK(vec_eq(rd.two_rho, qvec({5, 3, 1})));
  CHECK(rd.positive_roots.size() == 9);
  CHECK(vec_eq(rd.simple_roots.back(), qvec({0, 0, 1})));
  CHECK(rd.center.rows() == 0);
  CHECK(rd.antidominant.pointed());
}

TEST_CASE("symplectic rank 2") {
  RootDatum rd = build_root_datum({{{Family::Sp, 2}}});
  CHECK(vec_eq(rd.two_rho, qvec({4, 2})));
  CHECK(rd.positive_roots.size() == 4);
  CHECK(vec_eq(rd.simple_roots.back(), qvec({0, 2})));
}

TEST_CASE("even orthogonal rank 4") {
  RootDatum rd = build_root_datum({{{Family::SO_even, 4}}});
  CHECK(vec_eq(rd.two_rho, qvec({6, 4, 2, 0})));
  CHECK(rd.positive_roots.size() == 12);
  CHECK(mat_eq(rd.antidominant.rays, qmat({{-1, -1, -1, -1},
                                           {-1, -1, -1, 1},
                                           {-1, -1, 0, 0},
                                           {-1, 0, 0, 0}})));
}

TEST_CASE("torus factors are purely central") {
  RootDatum rd = build_root_datum({{{Family::Torus, 2}}});
  CHECK(rd.positive_roots.empty());
  CHECK(rd.center.rows() == 2);
  CHECK(same_cone(rd.antidominant, full_space(2)));
  CHECK(vec_eq(rd.two_rho, qvec({0, 0})));
}

TEST_CASE("product groups concatenate blocks") {
  RootDatum rd = build_root_datum({{{Family::GL, 1}, {Family::Sp, 1}}});
  CHECK(rd.dim == 2);
  REQUIRE(rd.blocks.size() == 2);
  CHECK(rd.blocks[0] == std::pair<int, int>{0, 1});
  CHECK(rd.blocks[1] == std::pair<int, int>{1, 2});
  CHECK(mat_eq(rd.center, qmat({{1, 0}})));
  CHECK(mat_eq(rd.factor_spans[1], qmat({{0, 1}})));
  CHECK(vec_eq(rd.two_rho, qvec({0, 2})));
  CHECK(vec_eq(modular_character(rd), rd.two_rho));
}

TEST_CASE("kernel split classification") {
  RootDatum rd = build_root_datum({{{Family::GL, 2}, {Family::Sp, 1}}});
  SplitVerdict v = simple_factor_split(rd, qmat({{0, 0, 1}}));
  CHECK(v.kind == SplitKind::FactorSum);
  CHECK(v.factor_indices == std::vector<int>{1});
  CHECK(simple_factor_split(rd, qmat({{1, 1, 0}})).kind == SplitKind::MeetsCenter);
  CHECK(simple_factor_split(rd, qmat({{1, 0, 0}})).kind == SplitKind::Neither);
  SplitVerdict none = simple_factor_split(rd, QMat(0, 3));
  CHECK(none.kind == SplitKind::FactorSum);
  CHECK(none.factor_indices.empty());
}

TEST_CASE("unsupported group shapes") {
  CHECK_THROWS_AS(build_root_datum({{}}), UnsupportedGroup);
  CHECK_THROWS_AS(build_root_datum({{{Family::GL, 0}}}), UnsupportedGroup);
  CHECK_THROWS_AS(build_root_datum({{{Family::SO_even, 2}}}), UnsupportedGroup);
  CHECK_THROWS_AS(build_root_datum({{{Family::GL, 13}}}), UnsupportedGroup);
  CHECK_THROWS_AS(build_root_datum({{{Family::GL, 5}}}, 4), UnsupportedGroup);
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::GL, Family::SO_odd, Family::SO_even, Family::Sp,
                   Family::Torus})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS_AS(family_from_name("E8"), UnsupportedGroup);
}
