#include <catch2/catch_amalgamated.hpp>

#include "tetratv/verify.hpp"

using namespace tetratv;

TEST_CASE("goodness classification") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(3);
  for (int s = 0; s < 20; ++s) {
    auto cs = rng.generic_colors(rd, 2);
    CHECK(good_pair(eng, cs[0], cs[1]));
  }
  CHECK_FALSE(good_pair(eng, cplx(0.5, 0.0), cplx(1.5, 0.0)));  // integral sum
  auto t = rng.admissible_tuple(rd);
  auto rep = classify_tuple(eng, t);
  CHECK(rep.good);
  CHECK(rep.strongly_good);
  CHECK(rep.admissible);
}

TEST_CASE("table families are nonzero and others vanish") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  // case (1) of the closed form: i=0.4, j=0.7, n=1.3
  std::array<cplx, 6> t{0.4, 0.7, 3.1, -1.4, 3.7, 1.3};
  CHECK(approx_eq(table_r3(rd, t), qn(rd, 2.3) * qn(rd, 3.3)));
  CHECK(std::abs(eng.sixj(t)) > 1e-7);
  // case (3) instance
  cplx i(0.5, 0.2), j(0.7, -0.1), n(1.3, 0.4);
  std::array<cplx, 6> t3{i, j, i + j, n - j, n + i, n};
  cplx expect = -(q_power(rd, i + j - n) + q_power(rd, i - j + n) + q_power(rd, -i + j + n) +
                  q_power(rd, i - j - n) + q_power(rd, -i + j - n) + q_power(rd, -i - j + n));
  CHECK(approx_eq(table_r3(rd, t3), expect));
  // a tuple violating every family vanishes both ways
  std::array<cplx, 6> bad{cplx(0.41, 0.1), cplx(0.73, 0.2), cplx(1.9, 0.33),
                          cplx(2.2, -0.1), cplx(0.1, 0.7), cplx(1.23, 0.01)};
  CHECK(table_r3(rd, bad) == cplx(0.0));
  CHECK(eng.sixj(bad) == cplx(0.0));
}

TEST_CASE("tetrahedral symmetry and reversion") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(7);
  for (int s = 0; s < 6; ++s) {
    auto t = rng.admissible_tuple(rd);
    auto res = symmetry_residuals(eng, t);
    CHECK(res[0] < 1e-8);
    CHECK(res[1] < 1e-8);
    CHECK(reversion_residual_theta(eng, {t[0], t[1], eng.star(t[2])}) < 1e-8);
    CHECK(reversion_residual_tetra(eng, t) < 1e-8);
  }
  // a vanishing tuple maps to vanishing tuples
  std::array<cplx, 6> z{cplx(0.41, 0.1), cplx(0.73, 0.2), cplx(1.9, 0.33),
                        cplx(2.2, -0.1), cplx(0.1, 0.7), cplx(1.23, 0.01)};
  auto st = [&](cplx c) { return eng.star(c); };
  CHECK(eng.sixj(z) == cplx(0.0));
  CHECK(eng.sixj({z[1], st(z[2]), st(z[0]), z[4], z[5], z[3]}) == cplx(0.0));
}

TEST_CASE("standard 6j expansion") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(11);
  for (int s = 0; s < 4; ++s) {
    auto t = rng.admissible_tuple(rd);
    auto sj = standard_sixj(eng, t);
    CHECK(sj.completeness < 1e-8);
    CHECK(std::abs(sj.value) > 1e-10);
    // vanishing coefficient at a height-forbidden n
    auto t2 = t;
    t2[5] += 0.5;
    auto sj2 = standard_sixj(eng, t2);
    CHECK(sj2.value == cplx(0.0));
  }
}

TEST_CASE("standard versus modified 6j") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(13);
  for (int s = 0; s < 6; ++s) {
    auto t = rng.admissible_tuple(rd);
    CHECK(two_sixj_residual(eng, t) < 1e-8);
  }
}

TEST_CASE("Biedenharn-Elliott identity") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  auto backend = engine_backend(eng);
  Sampler rng(17);
  for (int s = 0; s < 4; ++s) {
    auto js = sampling::be_tuple(rng, rd);
    CHECK(be_residual(backend, rd, js) < 1e-8);
  }
}

TEST_CASE("orthonormality relation") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  auto backend = engine_backend(eng);
  Sampler rng(19);
  for (int s = 0; s < 4; ++s) {
    CHECK(orth_residual(backend, rd, sampling::orth_tuple(rng, rd, true)) < 1e-8);
    CHECK(orth_residual(backend, rd, sampling::orth_tuple(rng, rd, false)) < 1e-8);
  }
}

TEST_CASE("bubble identity") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  Sampler rng(23);
  CHECK(approx_eq(b_weight(rd, cplx(0.5)), cplx(1.0 / 9.0)));
  for (int s = 0; s < 3; ++s) {
    auto draw = sampling::bubble_draw(rng, rd);
    CHECK(bubble_residual(eng, draw.grades, draw.colors) < 1e-8);
  }
}

TEST_CASE("gauge invariance of the identity residuals") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(29);
  auto t = rng.admissible_tuple(rd);
  double before = two_sixj_residual(eng, t);
  // rescale one canonical coupon; residuals must be unchanged
  eng.set_gauge({t[0], t[1], eng.star(t[2])}, cplx(0.7, 1.1));
  double after = two_sixj_residual(eng, t);
  CHECK(std::abs(before - after) < 1e-9);
  auto backend = engine_backend(eng);
  Sampler rng2(31);
  auto js = sampling::be_tuple(rng2, rd);
  CHECK(be_residual(backend, rd, js) < 1e-8);
  eng.clear_gauge();
}

TEST_CASE("zero pattern matches the table") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(37);
  for (int s = 0; s < 40; ++s) {
    auto t = sampling::table_family_tuple(rng, rd, s);
    bool tz = std::abs(table_r3(rd, t)) < 1e-7;
    bool cz = std::abs(eng.sixj(t)) < 1e-9;
    CHECK(tz == cz);
  }
}

TEST_CASE("table satisfies Biedenharn-Elliott with unit pairings on direct cases") {
  RootData rd(3, 1);
  auto backend = table_backend(rd);
  Sampler rng(41);
  for (int s = 0; s < 5; ++s)
    CHECK(be_residual(backend, rd, sampling::be_tuple_table_direct(rng, rd)) < 1e-8);
  // On configurations requiring the tetrahedral propagation rule, the
  // extension of the table is symmetry-invariant rather than a gauge section,
  // and the orthonormality relation with unit pairings does not close (the
  // needed mixed-lookup terms carry inconsistent gauge factors). Document the
  // magnitude here rather than asserting it.
  double orth_fail = orth_residual(backend, rd, sampling::orth_tuple(rng, rd, true));
  CHECK(orth_fail > 1e-3);  // genuine, not roundoff
}
