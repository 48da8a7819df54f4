#include <catch2/catch_amalgamated.hpp>

#include "tetratv/diagram.hpp"
#include "tetratv/graded.hpp"
#include "tetratv/rng.hpp"

using namespace tetratv;

TEST_CASE("grades and the forbidden set") {
  CHECK(approx_eq(grade_of(cplx(0.5, 0.0)), cplx(0.5, 0.0)));
  CHECK(in_X(cplx(0.0)));
  CHECK(in_X(cplx(1.0)));
  CHECK(in_X(cplx(4.0)));
  CHECK_FALSE(in_X(cplx(0.5)));
  RootData rd(3, 1);
  CHECK(same_grade(grade_of(canonical_rep(rd, cplx(0.5) + cplx(2.0 * rd.r))),
                   grade_of(cplx(0.5))));
}

TEST_CASE("central character of K^r matches the grade") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  Sampler rng(5);
  for (int s = 0; s < 5; ++s) {
    cplx c = canonical_rep(rd, rng.generic_color(rd));
    const WeightModule& m = eng.module(c);
    Mat kr = Mat::Identity(m.dim, m.dim);
    for (int p = 0; p < rd.r; ++p) kr = kr * m.K;
    cplx scalar = kr(0, 0);
    CHECK((kr - scalar * Mat::Identity(m.dim, m.dim)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(approx_eq(scalar, q_power(rd, cplx(double(rd.r)) * grade_of(c)), 1e-8));
  }
}

TEST_CASE("index sets") {
  RootData rd(3, 1);
  auto is = index_set(rd, cplx(0.5));
  REQUIRE(is.size() == 3);
  CHECK(approx_eq(is[0], cplx(0.5)));
  CHECK(approx_eq(is[1], cplx(2.5)));
  CHECK(approx_eq(is[2], cplx(4.5)));
  for (cplx c : is) CHECK(typical_class(rd, c));
  CHECK_THROWS_AS(index_set(rd, cplx(1.0)), ForbiddenGrade);
  // involution maps I^g onto I^{-g}
  auto neg = index_set(rd, cplx(-0.5));
  for (cplx c : is) {
    bool found = false;
    for (cplx d : neg) found = found || ColorKey(class_involution(rd, c)) == ColorKey(d);
    CHECK(found);
  }
}

TEST_CASE("b-map axiom") {
  Sampler rng(7);
  for (int r : {3, 5, 7}) {
    RootData rd(r, 1);
    for (int s = 0; s < 6; ++s) {
      cplx g1 = rng.generic_grade(), g2 = rng.generic_grade();
      cplx g = grade_rep(-g1 - g2);
      if (in_X(g) || !Sampler::margin_ok(g)) continue;
      cplx j = canonical_rep(rd, g + cplx(2.0 * rng.uniform_int(0, r - 1)));
      CHECK(b_sum_residual(rd, g1, g2, j) < 1e-12);
    }
  }
}

TEST_CASE("tetrahedron lifts") {
  RootData rd(3, 1);
  Sampler rng(11);
  // canonical lifts already satisfying the targets are returned unchanged
  for (int s = 0; s < 5; ++s) {
    auto t = rng.admissible_tuple(rd);
    std::array<cplx, 6> q;
    for (int u = 0; u < 6; ++u) q[size_t(u)] = canonical_rep(rd, t[size_t(u)]);
    auto lift = lift_tetrahedron(rd, q);
    REQUIRE(lift.has_value());
    // all four faces of the lift have allowed heights summing to zero
    auto lt = *lift;
    std::array<cplx, 4> h{lt[0] + lt[1] - lt[2], lt[2] + lt[3] - lt[4],
                          lt[5] - lt[3] - lt[1], lt[4] - lt[5] - lt[0]};
    cplx total = 0.0;
    for (cplx hh : h) {
      CHECK(is_integral(hh));
      CHECK(std::abs(hh.real()) <= rd.r - 1 + 1e-9);
      total += hh;
    }
    CHECK(std::abs(total) < 1e-9);
  }
  // a tuple whose four targets sum to a nonzero multiple of 2r has no lift
  auto cs = rng.generic_colors(rd, 3);
  cplx i = cs[0], j = cs[1], n = cs[2];
  // face heights (2,2,2,-6): targets (2,2,2,0) sum to 2r, so no lift exists
  std::array<cplx, 6> none{i, j, i + j - 2.0, n - j - 2.0, n + i + 2.0, n};
  std::array<cplx, 6> qn_;
  for (int u = 0; u < 6; ++u) qn_[size_t(u)] = canonical_rep(rd, none[size_t(u)]);
  CHECK_FALSE(lift_tetrahedron(rd, qn_).has_value());
}

TEST_CASE("truncated 6j equals unrolled 6j at a lift") {
  RootData rd(3, 1);
  Engine u(rd, Flavor::unrolled);
  Engine c(rd, Flavor::truncated);
  Sampler rng(13);
  for (int s = 0; s < 5; ++s) {
    auto t = rng.admissible_tuple(rd);
    std::array<cplx, 6> q;
    for (int w = 0; w < 6; ++w) q[size_t(w)] = canonical_rep(rd, t[size_t(w)]);
    auto lift = lift_tetrahedron(rd, q);
    REQUIRE(lift.has_value());
    cplx uv = u.sixj(*lift);
    cplx cv = c.sixj(q);
    CHECK(std::abs(uv - cv) / std::max(1.0, std::abs(uv)) < 1e-8);
  }
  // no lift: the truncated symbol vanishes even though the coupon spaces do
  // not
  auto cs = rng.generic_colors(rd, 3);
  cplx i = cs[0], j = cs[1], n = cs[2];
  std::array<cplx, 6> none{i, j, i + j - 2.0, n - j - 2.0, n + i + 2.0, n};
  std::array<cplx, 6> q;
  for (int w = 0; w < 6; ++w) q[size_t(w)] = canonical_rep(rd, none[size_t(w)]);
  REQUIRE_FALSE(lift_tetrahedron(rd, q).has_value());
  auto triples = Engine::tetra_triples(c, q);
  for (auto& tr : triples) CHECK(c.inv_dim(tr) == 1);
  CHECK(std::abs(c.sixj(q)) < 1e-8);
}
