#pragma once

// Grading data for the truncated category: grades in G = C/2Z with forbidden
// set X = Z/2Z, the finite index sets I^g, the constant b-map, and
// zero-total-height lifts from truncated to unrolled colors.

#include <optional>

#include "tetratv/qarith.hpp"

namespace tetratv {

struct ForbiddenGrade : std::domain_error {
  using std::domain_error::domain_error;
};

// Canonical representative of a grade, Re in [0, 2).
inline cplx grade_rep(cplx g) {
  double re = std::fmod(g.real(), 2.0);
  if (re < 0) re += 2.0;
  if (re >= 2.0) re -= 2.0;
  return {re, g.imag()};
}

inline bool in_X(cplx g) { return is_integral(grade_rep(g)); }

inline bool same_grade(cplx a, cplx b, double tol = kIntegralTol) {
  cplx d = a - b;
  if (std::abs(d.imag()) > tol) return false;
  double h = d.real() / 2.0;
  return std::abs(h - std::round(h)) * 2.0 <= tol;
}

// Grade of a truncated color: its class mod 2Z.
inline cplx grade_of(cplx c) { return grade_rep(c); }

// I^g = { g + 2t mod 2rZ : t = 0..r-1 } for g outside X.
inline std::vector<cplx> index_set(const RootData& rd, cplx g) {
  if (in_X(g)) throw ForbiddenGrade("index_set: grade lies in X");
  std::vector<cplx> out;
  cplx rep = grade_rep(g);
  for (int t = 0; t < rd.r; ++t) out.push_back(canonical_rep(rd, rep + cplx(2.0 * t)));
  return out;
}

// The constant b-map b = r^{-2} on non-integral classes.
inline cplx b_weight(const RootData& rd, cplx c) {
  if (!typical_class(rd, c))
    throw ForbiddenGrade("b_weight: integral class");
  return cplx(1.0 / (double(rd.r) * rd.r));
}

// Truncated multiplicity dimension rule: dim H(a,b,c) = 1 iff the class
// a+b+c mod 2rZ is an even integer, else 0.
inline bool truncated_triple_admissible(const RootData& rd, cplx a, cplx b, cplx c) {
  cplx s = a + b + c;
  if (!is_integral(canonical_rep(rd, s))) return false;
  long h = std::lround(canonical_rep(rd, s).real());
  return ((h % 2) + 2) % 2 == 0;
}

// Unrolled rule for non-integral colors: dim = 1 iff the height a+b+c is an
// even integer with |height| <= r-1.
inline bool unrolled_triple_admissible(const RootData& rd, cplx a, cplx b, cplx c) {
  cplx s = a + b + c;
  if (!is_integral(s)) return false;
  long h = std::lround(s.real());
  return ((h % 2) + 2) % 2 == 0 && std::llabs(h) <= rd.r - 1;
}

// Even heights allowed for a one-dimensional space: -(r-1), -(r-3), ..., r-1.
inline std::vector<int> allowed_heights(const RootData& rd) {
  std::vector<int> h;
  for (int v = -(rd.r - 1); v <= rd.r - 1; v += 2) h.push_back(v);
  return h;
}

// Residual of the b-map axiom
//   b(j) = sum_{j1 in I^{g1}, j2 in I^{g2}} b(j1) b(j2) dim H(j, j1, j2)
// for grade_of(j) + g1 + g2 = 0 with all three grades outside X.
inline double b_sum_residual(const RootData& rd, cplx g1, cplx g2, cplx j) {
  cplx g = grade_of(j);
  if (in_X(g) || in_X(g1) || in_X(g2))
    throw ForbiddenGrade("b_sum_residual: grade lies in X");
  if (!same_grade(g + g1 + g2, 0.0))
    throw ForbiddenGrade("b_sum_residual: grades do not sum to zero");
  cplx sum = 0.0;
  for (cplx j1 : index_set(rd, g1))
    for (cplx j2 : index_set(rd, g2))
      if (truncated_triple_admissible(rd, j, j1, j2))
        sum += b_weight(rd, j1) * b_weight(rd, j2);
  return std::abs(sum - b_weight(rd, j));
}

// Zero-total-height lift of the six colors of a tetrahedron. The four face
// heights are brought to their representatives in the allowed window by
// shifting the k, m, n lifts only; a lift exists iff every face class has an
// integral even height and the four targets sum to zero.
inline std::optional<std::array<cplx, 6>> lift_tetrahedron(const RootData& rd,
                                                           std::array<cplx, 6> q) {
  for (auto& c : q) c = canonical_rep(rd, c);
  const cplx i = q[0], j = q[1], k = q[2], l = q[3], m = q[4], n = q[5];
  std::array<cplx, 4> h = {i + j - k, k + l - m, n - l - j, m - n - i};
  std::array<double, 4> target{};
  double tsum = 0.0;
  for (int f = 0; f < 4; ++f) {
    cplx rep = canonical_rep(rd, h[size_t(f)]);
    if (!is_integral(rep)) return std::nullopt;
    long hh = std::lround(rep.real());
    if (((hh % 2) + 2) % 2 != 0) return std::nullopt;
    // representative in {-(r-1), ..., r-1}
    long tt = ((hh % (2 * rd.r)) + 2 * rd.r) % (2 * rd.r);
    if (tt > rd.r - 1) tt -= 2 * rd.r;
    target[size_t(f)] = double(tt);
    tsum += double(tt);
  }
  if (std::abs(tsum) > kIntegralTol) return std::nullopt;
  double c1 = target[0] - h[0].real();
  double c2 = target[1] - h[1].real();
  double c3 = target[2] - h[2].real();
  std::array<cplx, 6> lift = {i, j, k - c1, l, m - c1 - c2, n + c3};
  return lift;
}

}  // namespace tetratv
