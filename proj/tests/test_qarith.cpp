#include <catch2/catch_amalgamated.hpp>

#include "tetratv/qarith.hpp"
#include "tetratv/rng.hpp"

using namespace tetratv;

TEST_CASE("root data validation") {
  CHECK_NOTHROW(RootData(3, 1));
  CHECK_NOTHROW(RootData(5, 3));
  CHECK_THROWS_AS(RootData(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(RootData(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(RootData(9, 3), std::invalid_argument);
}

TEST_CASE("q powers") {
  RootData rd(3, 1);
  CHECK(approx_eq(q_power(rd, 0.0), 1.0));
  CHECK(approx_eq(q_power(rd, 3.0), -1.0));
  CHECK(approx_eq(q_power(rd, 1.0), cplx(0.5, 0.8660254037844386)));
  RootData rd53(5, 3);
  CHECK(approx_eq(q_power(rd53, 5.0), -1.0));
}

TEST_CASE("quantum numbers") {
  RootData rd(3, 1);
  CHECK(approx_eq(qn(rd, 0.0), 0.0));
  CHECK(approx_eq(qn(rd, 3.0), 0.0));
  CHECK(approx_eq(qn(rd, 1.0), cplx(0.0, 1.7320508075688772)));
  Sampler rng(11);
  for (int s = 0; s < 100; ++s) {
    cplx a{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    CHECK(approx_eq(qn(rd, -a), -qn(rd, a)));
  }
  for (int r : {3, 5, 7}) {
    RootData rr(r, 1);
    for (int a = -3 * r; a <= 3 * r; ++a) {
      bool zero = std::abs(qn(rr, double(a))) < 1e-9;
      CHECK(zero == (a % r == 0));
    }
  }
}

TEST_CASE("typicality and involution") {
  RootData rd(3, 1);
  CHECK(typical(rd, cplx(0.5, 0.0)));
  CHECK(typical(rd, cplx(0.0, 0.0)));
  CHECK(typical(rd, 3.0));
  CHECK_FALSE(typical(rd, 1.0));
  CHECK_FALSE(typical(rd, -2.0));
  CHECK(involution(cplx(0.5, 0.25)) == cplx(-0.5, -0.25));
  CHECK(involution(cplx(3.0, 0.0)) == cplx(3.0, 0.0));
}

TEST_CASE("modified dimension") {
  RootData rd(3, 1);
  CHECK(approx_eq(mod_dim(rd, 3.0), cplx(-1.0 / 3.0, 0.0)));
  // d(0.5) by direct product evaluation
  cplx expect = 1.0 / (qn(rd, -0.5) * qn(rd, -1.5));
  CHECK(approx_eq(mod_dim(rd, 0.5), expect));
  CHECK_THROWS_AS(mod_dim(rd, 1.0), NotTypical);

  Sampler rng(5);
  for (int r : {3, 5, 7}) {
    RootData rr(r, 1);
    for (int s = 0; s < 100; ++s) {
      cplx c = rng.generic_color(rr);
      cplx d = mod_dim(rr, c);
      CHECK(std::abs(d) > 0.0);
      CHECK(approx_eq(d, mod_dim(rr, c + cplx(2.0 * r))));
    }
  }
}

TEST_CASE("canonical representatives") {
  RootData rd(3, 1);
  CHECK(approx_eq(canonical_rep(rd, cplx(6.5, 0.25)), cplx(0.5, 0.25)));
  CHECK(approx_eq(canonical_rep(rd, cplx(-0.5, 0.0)), cplx(5.5, 0.0)));
  CHECK(typical_class(rd, cplx(0.5, 0.0)));
  CHECK_FALSE(typical_class(rd, cplx(9.0, 0.0)));
  CHECK(approx_eq(class_involution(rd, cplx(1.5, 0.5)), cplx(4.5, -0.5)));
}
