#pragma once

// Closed-form 6j values at r = 3, q = exp(i pi / 3), for non-integral
// colors, given by three height-pattern families and their propagation
// through the symmetries of an oriented tetrahedron. Everything outside the
// families vanishes.

#include <set>

#include "tetratv/qarith.hpp"

namespace tetratv {

struct WrongRoot : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool near(cplx a, cplx b) { return std::abs(a - b) <= 1e-6; }

inline std::optional<cplx> table_r3_direct(const RootData& rd, const std::array<cplx, 6>& t) {
  const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
  if (near(k, i + j + 2.0) && near(l, n - j - 2.0) && near(m, n + i + 2.0))
    return qn(rd, n + 1.0) * qn(rd, n + 2.0);
  if (near(k, i + j) && near(l, n - j) && near(m, n + i + 2.0))
    return qn(rd, j + 2.0) * qn(rd, n + 1.0);
  if (near(k, i + j) && near(l, n - j) && near(m, n + i))
    return -(q_power(rd, i + j - n) + q_power(rd, i - j + n) + q_power(rd, -i + j + n) +
             q_power(rd, i - j - n) + q_power(rd, -i + j - n) + q_power(rd, -i - j + n));
  return std::nullopt;
}

}  // namespace detail

// Orientation-preserving tetrahedral relabelings, generated by
// (i,j,k,l,m,n) -> (j,k*,i*,m,n,l) and (i,j,k,l,m,n) -> (k,l,m,n*,i,j*);
// for non-integral colors the involution is negation.
inline std::vector<std::array<cplx, 6>> tetra_orbit(const std::array<cplx, 6>& t) {
  auto g1 = [](std::array<cplx, 6> u) {
    return std::array<cplx, 6>{u[1], -u[2], -u[0], u[4], u[5], u[3]};
  };
  auto g2 = [](std::array<cplx, 6> u) {
    return std::array<cplx, 6>{u[2], u[3], u[4], -u[5], u[0], -u[1]};
  };
  std::vector<std::array<cplx, 6>> orbit{t};
  std::set<std::array<ColorKey, 6>> seen;
  auto key = [](const std::array<cplx, 6>& u) {
    std::array<ColorKey, 6> k;
    for (int s = 0; s < 6; ++s) k[size_t(s)] = ColorKey(u[size_t(s)]);
    return k;
  };
  seen.insert(key(t));
  for (size_t s = 0; s < orbit.size() && orbit.size() < 24; ++s) {
    for (auto img : {g1(orbit[s]), g2(orbit[s])}) {
      if (seen.insert(key(img)).second) orbit.push_back(img);
    }
  }
  return orbit;
}

// Table value at r = 3 for a tuple of non-integral colors: a direct case
// match or a match after a tetrahedral relabeling; zero otherwise.
inline cplx table_r3(const RootData& rd, std::array<cplx, 6> t) {
  if (rd.r != 3) throw WrongRoot("table_r3: table is specific to r = 3");
  for (cplx c : t)
    if (is_integral(c)) throw NotTypical("table_r3: colors must be non-integral");
  for (const auto& u : tetra_orbit(t))
    if (auto v = detail::table_r3_direct(rd, u)) return *v;
  return 0.0;
}

}  // namespace tetratv
