#include <catch2/catch_amalgamated.hpp>

#include "tetratv/repcat.hpp"
#include "tetratv/rng.hpp"

using namespace tetratv;

namespace {
std::multiset<long long> weight_multiset(const std::vector<cplx>& ws) {
  std::multiset<long long> out;
  for (cplx w : ws) out.insert(llround(w.real() * 1e9) * 2000003 + llround(w.imag() * 1e9));
  return out;
}
}  // namespace

TEST_CASE("typical module structure at r=3") {
  RootData rd(3, 1);
  WeightModule m = typical_module(rd, 0.0, Flavor::unrolled);
  REQUIRE(m.dim == 3);
  CHECK(approx_eq(m.weights[0], 2.0));
  CHECK(approx_eq(m.weights[1], 0.0));
  CHECK(approx_eq(m.weights[2], -2.0));
  CHECK(approx_eq(m.K(0, 0), q_power(rd, 2.0)));
  CHECK(approx_eq(m.K(1, 1), 1.0));
  CHECK(approx_eq(m.K(2, 2), q_power(rd, -2.0)));
  // E v_1 = [1][2] v_0 = v_0 since [2] = [1] at r = 3
  CHECK(approx_eq(m.E(0, 1), 1.0));
  CHECK(relations_residual(rd, m) < 1e-12);
}

TEST_CASE("relations hold on random modules and tensor products") {
  Sampler rng(23);
  for (int r : {3, 5, 7}) {
    RootData rd(r, r == 3 ? 1 : (r == 5 ? 3 : 5));
    for (int s = 0; s < 10; ++s) {
      WeightModule a = typical_module(rd, rng.generic_color(rd), Flavor::unrolled);
      CHECK(relations_residual(rd, a) < 1e-9);
      // simplicity witness
      for (int j = 1; j < a.dim; ++j) CHECK(std::abs(a.E(j - 1, j)) > 1e-9);
      WeightModule b = typical_module(rd, rng.generic_color(rd), Flavor::truncated);
      CHECK(relations_residual(rd, b) < 1e-9);
      WeightModule t = tensor(a, typical_module(rd, rng.generic_color(rd), Flavor::unrolled));
      CHECK(t.dim == rd.r * rd.r);
      CHECK(relations_residual(rd, t) < 1e-9);
    }
  }
}

TEST_CASE("tensor character") {
  RootData rd(5, 1);
  Sampler rng(7);
  cplx i = rng.generic_color(rd), j = rng.generic_color(rd);
  WeightModule t = tensor(typical_module(rd, i, Flavor::unrolled),
                          typical_module(rd, j, Flavor::unrolled));
  std::vector<cplx> expect;
  for (int l = -rd.rp(); l <= rd.rp(); ++l)
    for (int m = -rd.rp(); m <= rd.rp(); ++m)
      expect.push_back(i + j + cplx(2.0 * l) + cplx(2.0 * m));
  CHECK(weight_multiset(t.weights) == weight_multiset(expect));
}

TEST_CASE("duals") {
  RootData rd(3, 1);
  Sampler rng(9);
  cplx i = rng.generic_color(rd);
  WeightModule v = typical_module(rd, i, Flavor::unrolled);
  WeightModule dd = dual(dual(v));
  CHECK(weight_multiset(dd.weights) == weight_multiset(v.weights));
  // dual(V_i) has the weights of V_{-i}
  WeightModule vm = typical_module(rd, -i, Flavor::unrolled);
  CHECK(weight_multiset(dual(v).weights) == weight_multiset(vm.weights));
  // highest weight vector of dual(V_{-i}) is the last dual basis vector
  WeightModule dv = dual(vm);
  CHECK(approx_eq(dv.H(dv.dim - 1, dv.dim - 1), i + cplx(rd.r - 1.0)));
  Vec hw = Vec::Zero(dv.dim);
  hw(dv.dim - 1) = 1.0;
  CHECK((dv.E * hw).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("duality morphisms") {
  Sampler rng(31);
  for (int r : {3, 5}) {
    RootData rd(r, 1);
    for (int s = 0; s < 10; ++s) {
      cplx c = rng.generic_color(rd);
      WeightModule v = typical_module(rd, c, Flavor::unrolled);
      WeightModule vd = dual(v);
      auto dm = duality_morphisms(rd, v);
      const int n = v.dim;
      Mat id = Mat::Identity(n, n);
      // zig-zag identities: (Id x d)(b x Id) = Id and (d' x Id)(Id x b') = Id
      Mat z1 = kron(id, Mat(dm.d)) * kron(Mat(dm.b), id);
      CHECK((z1 - id).cwiseAbs().maxCoeff() < 1e-12);
      Mat z2 = kron(Mat(dm.dp), id) * kron(id, Mat(dm.bp));
      CHECK((z2 - id).cwiseAbs().maxCoeff() < 1e-12);
      // and the companion pair on the dual strand
      Mat z3 = kron(Mat(dm.d), id) * kron(id, Mat(dm.b));
      CHECK((z3 - id).cwiseAbs().maxCoeff() < 1e-12);
      Mat z4 = kron(id, Mat(dm.dp)) * kron(Mat(dm.bp), id);
      CHECK((z4 - id).cwiseAbs().maxCoeff() < 1e-12);
      // quantum trace of the identity: d' o b = sum_j q^{(1-r)(lambda - 2j)}
      cplx qtr = 0.0;
      for (int j = 0; j < n; ++j) qtr += dm.dp(j * n + j) * dm.b(j * n + j);
      cplx expect = 0.0;
      for (int j = 0; j < n; ++j) expect += q_power(rd, cplx(1.0 - rd.r) * v.weights[size_t(j)]);
      CHECK(approx_eq(qtr, expect));
      // the four duality morphisms are intertwiners against the dual action:
      // check d (V^* x V -> C): d . Delta(x) = eps(x) d
      auto rel = [](const Mat& dev, double scale) {
        return dev.cwiseAbs().maxCoeff() / std::max(1.0, scale);
      };
      auto amax = [](const Mat& x) { return x.cwiseAbs().maxCoeff(); };
      WeightModule big = tensor(vd, v);
      Mat dvec = dm.d;
      CHECK(rel(dvec * big.E, amax(dvec) * amax(big.E)) < 1e-12);
      CHECK(rel(dvec * big.F, amax(dvec) * amax(big.F)) < 1e-12);
      CHECK(rel(dvec * big.K - dvec, amax(dvec) * amax(big.K)) < 1e-12);
      WeightModule big2 = tensor(v, vd);
      Mat dpvec = dm.dp;
      CHECK(rel(dpvec * big2.E, amax(dpvec) * amax(big2.E)) < 1e-12);
      CHECK(rel(dpvec * big2.F, amax(dpvec) * amax(big2.F)) < 1e-12);
      CHECK(rel(dpvec * big2.K - dpvec, amax(dpvec) * amax(big2.K)) < 1e-12);
      // b and b' are invariant vectors
      CHECK(rel(big2.E * Mat(dm.b), amax(big2.E) * amax(Mat(dm.b))) < 1e-12);
      CHECK(rel(big2.F * Mat(dm.b), amax(big2.F) * amax(Mat(dm.b))) < 1e-12);
      CHECK(rel(big.E * Mat(dm.bp), amax(big.E) * amax(Mat(dm.bp))) < 1e-12);
      CHECK(rel(big.F * Mat(dm.bp), amax(big.F) * amax(Mat(dm.bp))) < 1e-12);
    }
  }
}

TEST_CASE("pivotal isomorphisms") {
  Sampler rng(41);
  for (int r : {3, 5}) {
    RootData rd(r, 1);
    // integral typical color: explicit normalization
    Mat w0 = pivotal_w(rd, cplx(double(r)), Flavor::unrolled);
    CHECK(approx_eq(w0(r - 1, 0), 1.0));
    CHECK(family_iso_residual(rd, cplx(double(r)), Flavor::unrolled) < 1e-9);
    for (int s = 0; s < 25; ++s) {
      cplx c = rng.generic_color(rd);
      Mat w = pivotal_w(rd, c, Flavor::unrolled);
      WeightModule src = typical_module(rd, c, Flavor::unrolled);
      WeightModule dst = dual(typical_module(rd, involution(c), Flavor::unrolled));
      CHECK(intertwiner_residual(src, dst, w) < 1e-9);
      CHECK(std::abs(w.determinant()) > 1e-12);
      CHECK(family_iso_residual(rd, c, Flavor::unrolled) < 1e-9);
    }
  }
}

TEST_CASE("truncated modules agree with canonical unrolled matrices") {
  RootData rd(3, 1);
  Sampler rng(77);
  for (int s = 0; s < 10; ++s) {
    cplx c = canonical_rep(rd, rng.generic_color(rd));
    WeightModule u = typical_module(rd, c, Flavor::unrolled);
    WeightModule t = typical_module(rd, c + cplx(2.0 * rd.r), Flavor::truncated);
    CHECK((u.E - t.E).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u.F - t.F).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u.K - t.K).cwiseAbs().maxCoeff() < 1e-12);
  }
}
