#pragma once

// Explicit matrix realization of the typical weight modules over the unrolled
// quantum sl2 (colors in C) and over its truncation without the H generator
// (colors in C/2rZ), together with tensor products, duals, the duality
// morphisms, and the pivotal isomorphisms w_i : V_i -> (V_{i*})^*.

#include <Eigen/Dense>

#include <vector>

#include "tetratv/qarith.hpp"

namespace tetratv {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RowVec = Eigen::RowVectorXcd;

enum class Flavor { unrolled, truncated };

struct FlavorMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline Mat kron(const Mat& a, const Mat& b) {
  Mat c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return c;
}

// A weight module presented by its generator matrices. In the basis
// v_j = F^j v_0 the F action is the plain shift and E carries the whole
// formula. H is kept only for the unrolled flavor.
struct WeightModule {
  Flavor flavor = Flavor::unrolled;
  cplx color{};       // unrolled: color in C; truncated: canonical rep in [0,2r)
  cplx lambda{};      // highest weight color + r - 1
  int dim = 0;
  Mat E, F, K, Kinv, H;
  std::vector<cplx> weights;  // lambda - 2j, j = 0..dim-1

  bool has_h() const { return flavor == Flavor::unrolled; }
};

// Typical r-dimensional module of color c. For the truncated flavor c is
// reduced mod 2rZ first and must be a non-integral class.
inline WeightModule typical_module(const RootData& rd, cplx c, Flavor fl) {
  if (fl == Flavor::truncated) {
    c = canonical_rep(rd, c);
    if (!typical_class(rd, c))
      throw NotTypical("typical_module: integral class has no typical module");
  } else if (!typical(rd, c)) {
    throw NotTypical("typical_module: color outside (C \\ Z) u rZ");
  }
  const int r = rd.r;
  WeightModule m;
  m.flavor = fl;
  m.color = c;
  m.lambda = c + cplx(r - 1.0);
  m.dim = r;
  m.E = Mat::Zero(r, r);
  m.F = Mat::Zero(r, r);
  m.K = Mat::Zero(r, r);
  m.Kinv = Mat::Zero(r, r);
  m.H = Mat::Zero(r, r);
  for (int j = 0; j < r; ++j) {
    cplx w = m.lambda - cplx(2.0 * j);
    m.weights.push_back(w);
    m.K(j, j) = q_power(rd, w);
    m.Kinv(j, j) = q_power(rd, -w);
    m.H(j, j) = w;
    if (j + 1 < r) m.F(j + 1, j) = 1.0;
    if (j >= 1)
      m.E(j - 1, j) = qbracket(rd, cplx(double(j))) * qbracket(rd, m.lambda - cplx(j - 1.0));
  }
  return m;
}

// Tensor product via the coproduct
//   D(E) = 1 x E + E x K,  D(F) = K^{-1} x F + F x 1,  D(K) = K x K,
//   D(H) = H x 1 + 1 x H.
inline WeightModule tensor(const WeightModule& a, const WeightModule& b) {
  if (a.flavor != b.flavor)
    throw FlavorMismatch("tensor: mixed flavors");
  WeightModule m;
  m.flavor = a.flavor;
  m.color = a.color + b.color;
  m.lambda = a.lambda + b.lambda;
  m.dim = a.dim * b.dim;
  Mat Ia = Mat::Identity(a.dim, a.dim), Ib = Mat::Identity(b.dim, b.dim);
  m.E = kron(Ia, b.E) + kron(a.E, b.K);
  m.F = kron(a.Kinv, b.F) + kron(a.F, Ib);
  m.K = kron(a.K, b.K);
  m.Kinv = kron(a.Kinv, b.Kinv);
  m.H = kron(a.H, Ib) + kron(Ia, b.H);
  for (cplx wa : a.weights)
    for (cplx wb : b.weights) m.weights.push_back(wa + wb);
  return m;
}

// Dual module on the dual basis, acting through the antipode:
// (x . f)(v) = f(S(x) v), with S(E) = -E K^{-1}, S(F) = -K F, S(K) = K^{-1},
// S(H) = -H.
inline WeightModule dual(const WeightModule& a) {
  WeightModule m;
  m.flavor = a.flavor;
  m.color = a.color;  // informational only
  m.lambda = -a.lambda;
  m.dim = a.dim;
  m.E = (-a.E * a.Kinv).transpose();
  m.F = (-a.K * a.F).transpose();
  m.K = a.Kinv.transpose();
  m.Kinv = a.K.transpose();
  m.H = (-a.H).transpose();
  for (cplx w : a.weights) m.weights.push_back(-w);
  return m;
}

// Duality morphisms of the pivotal structure, as concrete tensors:
//   b  : C -> V x V^*,  1 |-> sum v_j x v_j^*
//   d  : V^* x V -> C,  f x w |-> f(w)
//   d' : V x V^* -> C,  v x f |-> f(K^{1-r} v)
//   b' : C -> V^* x V,  1 |-> sum v_j^* x K^{r-1} v_j
// Indexing of a two-factor space is row major: (a, b) -> a*dim + b.
struct DualityMorphisms {
  Vec b;      // dim^2
  RowVec d;   // dim^2
  RowVec dp;  // dim^2
  Vec bp;     // dim^2
};

// Diagonal of K^p on the module (entries q^{p * weight_j}).
inline Vec k_power_diag(const RootData& rd, const WeightModule& m, int p) {
  Vec v(m.dim);
  for (int j = 0; j < m.dim; ++j) v(j) = q_power(rd, cplx(double(p)) * m.weights[j]);
  return v;
}

inline DualityMorphisms duality_morphisms(const RootData& rd, const WeightModule& m) {
  const int n = m.dim;
  DualityMorphisms dm;
  dm.b = Vec::Zero(n * n);
  dm.d = RowVec::Zero(n * n);
  dm.dp = RowVec::Zero(n * n);
  dm.bp = Vec::Zero(n * n);
  Vec kup = k_power_diag(rd, m, rd.r - 1);
  Vec kdn = k_power_diag(rd, m, 1 - rd.r);
  for (int j = 0; j < n; ++j) {
    dm.b(j * n + j) = 1.0;
    dm.d(j * n + j) = 1.0;
    dm.dp(j * n + j) = kdn(j);
    dm.bp(j * n + j) = kup(j);
  }
  return dm;
}

// Residual of the defining relations on a module (or tensor product). Each
// relation is measured relative to the magnitudes entering its cancellation,
// so the result reflects genuine structural failure rather than the growth of
// intermediate products at complex colors.
inline double relations_residual(const RootData& rd, const WeightModule& m) {
  const cplx q2 = q_power(rd, 2.0), qm2 = q_power(rd, -2.0);
  const cplx denom = q_power(rd, 1.0) - q_power(rd, -1.0);
  double res = 0.0;
  auto upd = [&](const Mat& dev, double scale) {
    res = std::max(res, dev.cwiseAbs().maxCoeff() / std::max(1.0, scale));
  };
  auto amax = [](const Mat& x) { return x.cwiseAbs().maxCoeff(); };
  Mat id = Mat::Identity(m.dim, m.dim);
  upd(m.K * m.Kinv - id, amax(m.K) * amax(m.Kinv));
  upd(m.K * m.E * m.Kinv - q2 * m.E, amax(m.K) * amax(m.E) * amax(m.Kinv));
  upd(m.K * m.F * m.Kinv - qm2 * m.F, amax(m.K) * amax(m.F) * amax(m.Kinv));
  upd(m.E * m.F - m.F * m.E - (m.K - m.Kinv) / denom, amax(m.E) * amax(m.F));
  Mat ep = m.E, fp = m.F;
  Mat epa = m.E.cwiseAbs(), fpa = m.F.cwiseAbs();
  for (int i = 1; i < rd.r; ++i) {
    ep = ep * m.E;
    fp = fp * m.F;
    epa = epa * m.E.cwiseAbs();
    fpa = fpa * m.F.cwiseAbs();
  }
  upd(ep, amax(epa));
  upd(fp, amax(fpa));
  if (m.has_h()) {
    upd(m.H * m.E - m.E * m.H - 2.0 * m.E, amax(m.H) * amax(m.E));
    upd(m.H * m.F - m.F * m.H + 2.0 * m.F, amax(m.H) * amax(m.F));
    // q^H = K holds entrywise on the weight basis
    Mat qh = Mat::Zero(m.dim, m.dim);
    for (int j = 0; j < m.dim; ++j) qh(j, j) = q_power(rd, m.H(j, j));
    upd(qh - m.K, amax(m.K));
  }
  return res;
}

// Residual of M being a module map A -> B.
inline double intertwiner_residual(const WeightModule& a, const WeightModule& b, const Mat& m) {
  double res = 0.0;
  auto upd = [&](const Mat& x) { res = std::max(res, x.cwiseAbs().maxCoeff()); };
  upd(b.E * m - m * a.E);
  upd(b.F * m - m * a.F);
  upd(b.K * m - m * a.K);
  if (a.has_h() && b.has_h()) upd(b.H * m - m * a.H);
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return res / scale;
}

namespace detail {

// Star partner of a color within the given flavor.
inline cplx star_color(const RootData& rd, cplx c, Flavor fl) {
  return fl == Flavor::truncated ? class_involution(rd, c) : involution(c);
}

// Gauge rule for the pair {c, c*}: the partner whose canonical representative
// mod 2rZ is lexicographically larger in (Re, Im) carries the defining
// highest-weight normalization; the other one is solved from the
// compatibility equation. Comparing canonical representatives keeps the rule
// 2r-periodic, so the unrolled and truncated flavors share one gauge.
inline bool is_primary(const RootData& rd, cplx c, Flavor fl) {
  cplx cs = star_color(rd, c, fl);
  cplx a = canonical_rep(rd, c), b = canonical_rep(rd, cs);
  if (std::abs(a.real() - b.real()) > kIntegralTol) return a.real() > b.real();
  return a.imag() >= b.imag();
}

}  // namespace detail

// Pivotal isomorphism w_c : V_c -> (V_{c*})^*, returned as a dim x dim matrix
// whose column j holds the coordinates of w_c(v_j) on the dual basis of
// V_{c*}. The primary member of the pair {c, c*} is normalized by
// v_0 |-> v_{r-1}^*; its partner is forced by
//   d_{V_c}(w_{c*} x Id) = d'_{V_{c*}}(Id x w_c),
// which pins w_{c*} = w_c^T K_{V_{c*}}^{1-r}.
inline Mat pivotal_w(const RootData& rd, cplx c, Flavor fl) {
  auto propagate = [&](cplx col) {
    WeightModule src = typical_module(rd, col, fl);
    WeightModule dst = dual(typical_module(rd, detail::star_color(rd, col, fl), fl));
    Mat w = Mat::Zero(src.dim, src.dim);
    Vec v = Vec::Zero(src.dim);
    v(src.dim - 1) = 1.0;  // w(v_0) = v_{r-1}^*
    w.col(0) = v;
    for (int j = 1; j < src.dim; ++j) {
      v = dst.F * v;
      w.col(j) = v;
    }
    return w;
  };
  if (detail::is_primary(rd, c, fl)) return propagate(c);
  cplx cs = detail::star_color(rd, c, fl);
  Mat wp = propagate(cs);  // primary partner
  WeightModule vc = typical_module(rd, c, fl);
  Vec kdn = k_power_diag(rd, vc, 1 - rd.r);
  Mat w = wp.transpose();
  for (int b = 0; b < vc.dim; ++b) w.col(b) *= kdn(b);
  return w;
}

// Residual of the compatibility equation for the pair (w_c, w_{c*}), as
// bilinear forms on V_{c*} x V_c.
inline double family_iso_residual(const RootData& rd, cplx c, Flavor fl) {
  cplx cs = detail::star_color(rd, c, fl);
  Mat wc = pivotal_w(rd, c, fl);
  Mat wcs = pivotal_w(rd, cs, fl);
  WeightModule vcs = typical_module(rd, cs, fl);
  Vec kdn = k_power_diag(rd, vcs, 1 - rd.r);
  // lhs(u, v) = (w_{c*} u)(v);  rhs(u, v) = (w_c v)(K^{1-r} u)
  Mat lhs = wcs.transpose();
  Mat rhs = wc;
  for (int u = 0; u < vcs.dim; ++u) rhs.row(u) *= kdn(u);
  double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
  return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

}  // namespace tetratv
