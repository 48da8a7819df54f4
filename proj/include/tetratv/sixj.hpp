#pragma once

// Goodness classification, the tetrahedral symmetry and reversion checks,
// the standard 6j-symbol built from splittings of tensor products, and
// residual checkers for the Biedenharn-Elliott, orthonormality and algebraic
// bubble identities. All identities are evaluated against canonical coupon
// bases, with theta-pairing corrections at every contraction site and sigma
// rotation scalars where a cyclic reordering is needed.

#include <functional>

#include "tetratv/diagram.hpp"
#include "tetratv/graded.hpp"

namespace tetratv {

struct NotGood : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HypothesisViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GradeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Goodness

// A pair (i,j) is good when V_i x V_j splits into typicals with invertible
// modified dimension; for typical colors this happens exactly when i + j is
// not integral (all summands i+j+2t are then typical).
inline bool good_pair(Engine& e, cplx i, cplx j) {
  if (!e.is_typical(i) || !e.is_typical(j)) return false;
  cplx s = e.normalize(i) + e.normalize(j);
  if (e.flavor() == Flavor::truncated) return !is_integral(canonical_rep(e.root(), s));
  return !is_integral(s);
}

inline bool good_triple(Engine& e, std::array<cplx, 3> t) {
  return good_pair(e, t[0], t[1]) || good_pair(e, t[1], t[2]) || good_pair(e, t[2], t[0]);
}

struct GoodnessReport {
  bool good = false;           // all four face triples good
  bool strongly_good = false;  // m,n typical and (i,j),(j,l),(i,n),(k,l) good
  bool admissible = false;     // all colors typical and the twelve pairs good
};

inline GoodnessReport classify_tuple(Engine& e, std::array<cplx, 6> t) {
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
  GoodnessReport rep;
  auto triples = Engine::tetra_triples(e, t);
  rep.good = true;
  for (auto& tr : triples) rep.good = rep.good && good_triple(e, tr);
  rep.strongly_good = e.is_typical(m) && e.is_typical(n) && good_pair(e, i, j) &&
                      good_pair(e, j, l) && good_pair(e, i, n) && good_pair(e, k, l);
  bool all_typ = true;
  for (cplx c : t) all_typ = all_typ && e.is_typical(c);
  auto st = [&](cplx c) { return e.star(c); };
  rep.admissible = all_typ && good_pair(e, i, j) && good_pair(e, j, l) && good_pair(e, i, n) &&
                   good_pair(e, k, l) && good_pair(e, j, st(k)) && good_pair(e, st(k), i) &&
                   good_pair(e, l, st(m)) && good_pair(e, st(m), k) && good_pair(e, n, st(l)) &&
                   good_pair(e, st(j), n) && good_pair(e, m, st(n)) && good_pair(e, st(i), m);
  return rep;
}

// ---------------------------------------------------------------------------
// Pluggable 6j backend, so the identity checkers can run both on the computed
// symbols and on closed-form tables with unit pairings.

struct SixJBackend {
  std::function<cplx(std::array<cplx, 6>)> sixj;
  std::function<cplx(std::array<cplx, 3>)> theta;
  std::function<cplx(std::array<cplx, 3>)> sigma;
  std::function<cplx(cplx)> d;
  std::function<cplx(cplx)> star;
};

inline SixJBackend engine_backend(Engine& e) {
  SixJBackend b;
  b.sixj = [&e](std::array<cplx, 6> t) { return e.sixj(t); };
  b.theta = [&e](std::array<cplx, 3> t) { return e.theta(t); };
  b.sigma = [&e](std::array<cplx, 3> t) { return e.sigma_scalar(t); };
  b.d = [&e](cplx c) { return e.dim_d(c); };
  b.star = [&e](cplx c) { return e.star(c); };
  return b;
}

// ---------------------------------------------------------------------------
// Tetrahedral symmetries and reversion

// Residuals of |i j k; l m n| = |j k* i*; m n l| = |k l m; n* i j*| after
// converting canonical bases with sigma scalars.
inline std::array<double, 2> symmetry_residuals(Engine& e, std::array<cplx, 6> t) {
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
  auto st = [&](cplx c) { return e.star(c); };
  cplx n1 = e.sixj(t);
  cplx n2 = e.sixj({j, st(k), st(i), m, n, l});
  cplx n3 = e.sixj({k, l, m, st(n), i, st(j)});
  double scale = std::max(1.0, std::abs(n1));
  cplx conv2 = n2;
  if (n2 != cplx(0.0))
    conv2 = n2 * e.sigma_scalar({i, j, st(k)}) * e.sigma_scalar({m, st(n), st(i)}) *
            e.sigma_scalar({st(n), st(i), m}) * e.sigma_scalar({k, l, st(m)});
  cplx conv3 = n3;
  if (n3 != cplx(0.0))
    conv3 = n3 * e.sigma_scalar({n, st(l), st(j)}) * e.sigma_scalar({st(l), st(j), n});
  return {std::abs(conv2 - n1) / scale, std::abs(conv3 - n1) / scale};
}

// Reversion: re-evaluating with one edge reversed (label starred, pivotal
// coupon moved to the other side) must not change the cut value.
inline double reversion_residual_theta(Engine& e, std::array<cplx, 3> t) {
  static const SliceProgram rev = parse_program(programs::theta_cut_a_revc);
  Vec x = e.canonical_vector(t);
  Vec y = e.canonical_vector({e.star(t[2]), e.star(t[1]), e.star(t[0])});
  std::array<cplx, 6> binding{t[0], t[1], t[2], 0, 0, 0};
  cplx a = e.eval_scalar(e.theta_program(0), binding, {x, y});
  cplx b = e.eval_scalar(rev, binding, {x, y});
  return std::abs(a - b) / std::max(1.0, std::abs(a));
}

inline double reversion_residual_tetra(Engine& e, std::array<cplx, 6> t) {
  static const SliceProgram rev = parse_program(programs::tetra_cut_i_revn);
  auto triples = Engine::tetra_triples(e, t);
  for (auto& tr : triples)
    if (e.inv_dim(tr) == 0) return 0.0;
  std::vector<Vec> coupons;
  for (auto& tr : triples) coupons.push_back(e.canonical_vector(tr));
  cplx a = e.eval_scalar(e.tetra_program(0), t, coupons);
  cplx b = e.eval_scalar(rev, t, coupons);
  return std::abs(a - b) / std::max(1.0, std::abs(a));
}

// ---------------------------------------------------------------------------
// Biedenharn-Elliott identity
//
//   sum_{j in J} d(j) *_{j2 j3 j*} *_{j j4 j7*} *_{j1 j j6*}
//       ( |j1 j2 j5; j3 j6 j| x |j1 j j6; j4 j0 j7| x |j2 j3 j; j4 j7 j8| )
//   =  *_{j5 j8 j0*} ( |j5 j3 j6; j4 j0 j8| x |j1 j2 j5; j8 j0 j7| )
//
// All slot orders already match across the contractions, so each site
// contributes one inverse theta and no rotation scalar.

inline double be_residual(const SixJBackend& B, const RootData& rd, std::array<cplx, 9> js) {
  const cplx j0 = js[0], j1 = js[1], j2 = js[2], j3 = js[3], j4 = js[4], j5 = js[5],
             j6 = js[6], j7 = js[7], j8 = js[8];
  auto st = B.star;
  cplx lhs = 0.0;
  for (int h : allowed_heights(rd)) {
    cplx j = j2 + j3 - cplx(double(h));  // J = colors with H_j^{j2 j3} nonzero
    cplx s1 = B.sixj({j1, j2, j5, j3, j6, j});
    cplx s2 = B.sixj({j1, j, j6, j4, j0, j7});
    cplx s3 = B.sixj({j2, j3, j, j4, j7, j8});
    cplx term = s1 * s2 * s3;
    if (term == cplx(0.0)) continue;
    term /= B.theta({j2, j3, st(j)});
    term /= B.theta({j, j4, st(j7)});
    term /= B.theta({j1, j, st(j6)});
    lhs += B.d(j) * term;
  }
  cplx rhs = B.sixj({j5, j3, j6, j4, j0, j8}) * B.sixj({j1, j2, j5, j8, j0, j7});
  if (rhs != cplx(0.0)) rhs /= B.theta({j5, j8, st(j0)});
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

// ---------------------------------------------------------------------------
// Orthonormality
//
//   d(k) sum_{n in N} d(n) *_{i n m*} *_{j l n*}
//       ( |i j p; l m n| x |k j* i; n m l| )  =  delta_{k,p} Id(i,j,k*) x Id(k,l,m*)
//
// The *_{j l n*} site pairs a slot stored in the rotated order (l, n*, j), so
// it also picks up the rotation scalar s(j, l, n*). The right side equals
// theta(i,j,k*) theta(k,l,m*) on the canonical dual bases.

inline double orth_residual(const SixJBackend& B, const RootData& rd,
                            std::array<cplx, 6> t /* i j k l m p */) {
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], p = t[5];
  auto st = B.star;
  cplx lhs = 0.0;
  for (int h : allowed_heights(rd)) {
    cplx n = j + l - cplx(double(h));  // H^{jl}_n nonzero
    cplx u1 = B.sixj({i, j, p, l, m, n});
    cplx u2 = B.sixj({k, st(j), i, n, m, l});
    cplx term = u1 * u2;
    if (term == cplx(0.0)) continue;
    term *= B.sigma({j, l, st(n)});
    term /= B.theta({i, n, st(m)});
    term /= B.theta({j, l, st(n)});
    lhs += B.d(n) * term;
  }
  lhs *= B.d(k);
  bool kp = ColorKey(k) == ColorKey(p) || std::abs(k - p) <= kIntegralTol;
  cplx rhs = 0.0;
  if (kp) rhs = B.theta({i, j, st(k)}) * B.theta({k, l, st(m)});
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

// ---------------------------------------------------------------------------
// Algebraic bubble identity (truncated flavor)
//
//   d(k) sum_{l,m,n in I^{g4} x I^{g5} x I^{g6}} d(n) b(l) b(m)
//       *_{k l m*} *_{i n m*} *_{j l n*} ( |i j k; l m n| x |k j* i; n m l| )
//   = b(k) Id(i,j,k*)

inline double bubble_residual(Engine& e, std::array<cplx, 3> g /* g1 g2 g4 */,
                              std::array<cplx, 3> col /* i j k */) {
  if (e.flavor() != Flavor::truncated)
    throw GradeMismatch("bubble_residual: needs the truncated flavor");
  const RootData& rd = e.root();
  cplx g1 = g[0], g2 = g[1], g4 = g[2];
  cplx g3 = g1 + g2, g6 = g2 + g4, g5 = g1 + g6;
  for (cplx gg : {g1, g2, g3, g4, g5, g6})
    if (in_X(gg)) throw GradeMismatch("bubble_residual: grade in X");
  cplx i = col[0], j = col[1], k = col[2];
  if (!same_grade(grade_of(e.normalize(i)), grade_rep(g1)) ||
      !same_grade(grade_of(e.normalize(j)), grade_rep(g2)) ||
      !same_grade(grade_of(e.normalize(k)), grade_rep(g3)))
    throw GradeMismatch("bubble_residual: colors do not match the grades");
  auto st = [&](cplx c) { return e.star(c); };
  cplx lhs = 0.0;
  for (cplx l : index_set(rd, g4))
    for (cplx m : index_set(rd, g5))
      for (cplx n : index_set(rd, g6)) {
        cplx u1 = e.sixj({i, j, k, l, m, n});
        cplx u2 = e.sixj({k, st(j), i, n, m, l});
        cplx term = u1 * u2;
        if (term == cplx(0.0)) continue;
        term *= e.sigma_scalar({j, l, st(n)});
        term /= e.theta({k, l, st(m)});
        term /= e.theta({i, n, st(m)});
        term /= e.theta({j, l, st(n)});
        lhs += e.dim_d(n) * b_weight(rd, l) * b_weight(rd, m) * term;
      }
  lhs *= e.dim_d(k);
  cplx rhs = b_weight(rd, k) * e.theta({i, j, st(k)});
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

// ---------------------------------------------------------------------------
// Standard 6j-symbols from splittings Hom(V_m, V_i x V_j x V_l)

// Basis of Hom(V_c, V_a x V_b) by nullspace solving; empty when zero.
inline std::optional<Mat> hom_basis(Engine& e, cplx a, cplx b, cplx c) {
  const RootData& rd = e.root();
  WeightModule A = typical_module(rd, e.normalize(a), e.flavor());
  WeightModule B = typical_module(rd, e.normalize(b), e.flavor());
  WeightModule C = typical_module(rd, e.normalize(c), e.flavor());
  WeightModule AB = tensor(A, B);
  const long nt = AB.dim, ns = C.dim;
  // unknown M (nt x ns), conditions X_{AB} M - M X_C = 0
  std::vector<const Mat*> xs_t{&AB.E, &AB.F, &AB.K};
  std::vector<const Mat*> xs_s{&C.E, &C.F, &C.K};
  if (AB.has_h()) {
    xs_t.push_back(&AB.H);
    xs_s.push_back(&C.H);
  }
  long rows = long(xs_t.size()) * nt * ns;
  Mat cond = Mat::Zero(rows, nt * ns);
  for (size_t q = 0; q < xs_t.size(); ++q) {
    const Mat& xt = *xs_t[q];
    const Mat& xc = *xs_s[q];
    // vec(M) row-major: M(p, s) -> p*ns + s
    for (long p = 0; p < nt; ++p)
      for (long s = 0; s < ns; ++s) {
        long row = long(q) * nt * ns + p * ns + s;
        for (long pp = 0; pp < nt; ++pp) cond(row, pp * ns + s) += xt(p, pp);
        for (long ss = 0; ss < ns; ++ss) cond(row, p * ns + ss) -= xc(ss, s);
      }
  }
  Eigen::BDCSVD<Mat> svd(cond, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  std::vector<long> null_cols;
  for (long s = 0; s < sv.size(); ++s)
    if (sv(s) <= 1e-8 * std::max(smax, 1.0)) null_cols.push_back(s);
  if (null_cols.empty()) return std::nullopt;
  if (null_cols.size() > 1)
    throw DimAmbiguous("hom_basis: hom space has dimension > 1");
  Vec v = svd.matrixV().col(null_cols[0]);
  double amax = v.cwiseAbs().maxCoeff();
  long pivot = 0;
  for (long s = 0; s < v.size(); ++s)
    if (std::abs(v(s)) > 1e-6 * amax) {
      pivot = s;
      break;
    }
  v /= v(pivot);
  Mat m(nt, ns);
  for (long p = 0; p < nt; ++p)
    for (long s = 0; s < ns; ++s) m(p, s) = v(p * ns + s);
  return m;
}

// a_c^{ab} : Hom(V_c, V_a x V_b) -> H^{a b c*},  y |-> (y x w_{c*}^{-1}) b_{V_c}.
inline Vec a_iso(Engine& e, cplx a, cplx b, cplx c, const Mat& y) {
  const RootData& rd = e.root();
  const int r = rd.r;
  Mat winv = e.w_mat(e.star(c)).inverse();  // V_c^* -> V_{c*}
  Vec out = Vec::Zero(long(r) * r * r);
  // b_{V_c} = sum_s v_s x v_s^*; apply y to the first factor, w^{-1} to the second
  for (int s = 0; s < r; ++s)
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q) {
        cplx yv = y(p * r + q, s);
        if (yv == cplx(0.0)) continue;
        for (int u = 0; u < r; ++u) out((long(p) * r + q) * r + u) += yv * winv(u, s);
      }
  return out;
}

struct StandardSixJ {
  cplx value = 0.0;           // coefficient at the requested n
  double completeness = 0.0;  // expansion residual over all admissible n
};

// Standard 6j-symbol: expand (x1 x Id) x2 with x1: V_k -> V_i x V_j and
// x2: V_m -> V_k x V_l over the basis { (Id x y1^n) y2^n }.
inline StandardSixJ standard_sixj(Engine& e, std::array<cplx, 6> t) {
  const RootData& rd = e.root();
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
  if (!good_pair(e, i, j) || !good_pair(e, j, l))
    throw NotGood("standard_sixj: pairs (i,j) and (j,l) must be good");
  auto x1 = hom_basis(e, i, j, k);
  auto x2 = hom_basis(e, k, l, m);
  if (!x1 || !x2) throw DimZero("standard_sixj: empty source spaces");
  const int r = rd.r;
  const WeightModule& vi = e.module(i);
  Mat idl = Mat::Identity(r, r);
  Mat lhs = kron(*x1, idl) * (*x2);  // V_m -> V_i x V_j x V_l
  // candidates n' with Hom(V_{n'}, V_j x V_l) and Hom(V_m, V_i x V_{n'}) nonzero
  std::vector<cplx> cands;
  std::vector<Mat> basis_maps;
  for (int h : allowed_heights(rd)) {
    cplx np = j + l - cplx(double(h));
    auto y1 = hom_basis(e, j, l, np);
    if (!y1) continue;
    auto y2 = hom_basis(e, i, np, m);
    if (!y2) continue;
    cands.push_back(np);
    basis_maps.push_back(kron(Mat::Identity(vi.dim, vi.dim), *y1) * (*y2));
  }
  StandardSixJ out;
  if (cands.empty()) {
    out.completeness = lhs.cwiseAbs().maxCoeff();
    return out;
  }
  Mat a(lhs.size(), long(cands.size()));
  for (size_t s = 0; s < cands.size(); ++s)
    a.col(long(s)) = Eigen::Map<const Vec>(basis_maps[s].data(), basis_maps[s].size());
  Vec rhs = Eigen::Map<const Vec>(lhs.data(), lhs.size());
  Vec coef = a.colPivHouseholderQr().solve(rhs);
  out.completeness = (a * coef - rhs).cwiseAbs().maxCoeff() /
                     std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (size_t s = 0; s < cands.size(); ++s)
    if (ColorKey(e.normalize(cands[s])) == ColorKey(e.normalize(n))) out.value = coef(long(s));
  return out;
}

// Residual of {i j k; l m n}_+ = d(n) |i j k; l m n|: both sides are
// evaluated on the canonical coupons, transported through the a-isomorphisms.
inline double two_sixj_residual(Engine& e, std::array<cplx, 6> t) {
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
  if (!good_pair(e, i, j) || !good_pair(e, j, l) || !good_pair(e, i, n))
    throw NotGood("two_sixj_residual: pairs (i,j), (j,l), (i,n) must be good");
  auto st = [&](cplx c) { return e.star(c); };
  auto triples = Engine::tetra_triples(e, t);
  bool zero = false;
  for (auto& tr : triples) zero = zero || e.inv_dim(tr) == 0;
  cplx rhs = e.dim_d(n) * e.sixj(t);
  if (zero) return std::abs(rhs);

  auto yk = hom_basis(e, i, j, k);
  auto ym = hom_basis(e, k, l, m);
  auto y1 = hom_basis(e, j, l, n);
  auto y2 = hom_basis(e, i, n, m);
  if (!yk || !ym || !y1 || !y2) throw DimZero("two_sixj_residual: missing hom space");

  auto ratio_to_canonical = [&](std::array<cplx, 3> tr, const Vec& vec) {
    Vec canon = e.canonical_vector(tr);
    long pivot = 0;
    canon.cwiseAbs().maxCoeff(&pivot);
    cplx mu = vec(pivot) / canon(pivot);
    if ((vec - mu * canon).cwiseAbs().maxCoeff() >
        1e-7 * std::max(1.0, vec.cwiseAbs().maxCoeff()))
      throw NotScalar("two_sixj_residual: transported vector not proportional");
    return mu;
  };
  // x1, x2: preimages of the canonical coupons under the a-isomorphisms
  cplx mu1 = ratio_to_canonical({i, j, st(k)}, a_iso(e, i, j, k, *yk));
  cplx mu2 = ratio_to_canonical({k, l, st(m)}, a_iso(e, k, l, m, *ym));
  StandardSixJ sj = standard_sixj(e, t);
  // transported images of the target-side bases
  Vec a1 = a_iso(e, j, l, n, *y1);
  Vec a2 = a_iso(e, i, n, m, *y2);
  cplx p1 = e.theta_pairing({j, l, st(n)}, a1, e.canonical_vector({n, st(l), st(j)}));
  cplx p2 = e.theta_pairing({i, n, st(m)}, a2, e.canonical_vector({m, st(n), st(i)}));
  cplx lhs = (sj.value / (mu1 * mu2)) * p1 * p2;
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

}  // namespace tetratv
