#pragma once

// Scalar arithmetic at an odd root of unity: complex powers of q, quantum
// numbers, modified quantum dimensions, and tolerance-aware comparison.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tetratv {

using cplx = std::complex<double>;

inline constexpr double kIntegralTol = 1e-6;  // gate for "is an integer"
inline constexpr double kDefaultTol = 1e-9;

struct NotTypical : std::domain_error {
  using std::domain_error::domain_error;
};

// q = exp(k i pi / r) with r odd >= 3 and k odd coprime to r.
struct RootData {
  int r = 3;
  int k = 1;

  RootData() = default;
  RootData(int r_, int k_) : r(r_), k(k_) {
    if (r < 3 || r % 2 == 0)
      throw std::invalid_argument("RootData: r must be odd and >= 3");
    if (k % 2 == 0)
      throw std::invalid_argument("RootData: k must be odd");
    if (std::gcd(std::abs(k), r) != 1)
      throw std::invalid_argument("RootData: k must be coprime to r");
  }

  int rp() const { return (r - 1) / 2; }
};

// q^x = exp(x k i pi / r), for complex exponents x.
inline cplx q_power(const RootData& rd, cplx x) {
  return std::exp(cplx(0.0, 1.0) * x * (static_cast<double>(rd.k) * M_PI / rd.r));
}

// Quantum number <a> = q^a - q^{-a}.
inline cplx qn(const RootData& rd, cplx a) {
  return q_power(rd, a) - q_power(rd, -a);
}

// [x] = <x> / <1>.
inline cplx qbracket(const RootData& rd, cplx x) {
  return qn(rd, x) / qn(rd, cplx(1.0));
}

inline bool approx_eq(cplx a, cplx b, double tol = kDefaultTol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool is_integral(cplx z, double tol = kIntegralTol) {
  return std::abs(z.imag()) <= tol &&
         std::abs(z.real() - std::round(z.real())) <= tol;
}

// Colors of the unrolled flavor live in C; typical means i in (C \ Z) u rZ.
inline bool typical(const RootData& rd, cplx i) {
  if (!is_integral(i)) return true;
  long n = std::lround(i.real());
  return n % rd.r == 0;
}

// Involution on colors: i* = i for integral i, i* = -i otherwise.
inline cplx involution(cplx i) { return is_integral(i) ? i : -i; }

// Canonical representative of a class mod 2rZ, with Re in [0, 2r).
inline cplx canonical_rep(const RootData& rd, cplx c) {
  const double m = 2.0 * rd.r;
  double re = std::fmod(c.real(), m);
  if (re < 0) re += m;
  if (re >= m) re -= m;
  return {re, c.imag()};
}

inline bool same_class(const RootData& rd, cplx a, cplx b, double tol = kIntegralTol) {
  cplx d = a - b;
  if (std::abs(d.imag()) > tol) return false;
  double q = d.real() / (2.0 * rd.r);
  return std::abs(d.real() - 2.0 * rd.r * std::round(q)) <= tol;
}

// Truncated colors are classes in C/2rZ; typical classes are the non-integral
// ones.
inline bool typical_class(const RootData& rd, cplx c) {
  return !is_integral(canonical_rep(rd, c));
}

// Involution on classes: c* = -c mod 2rZ.
inline cplx class_involution(const RootData& rd, cplx c) {
  return canonical_rep(rd, -c);
}

// Modified quantum dimension d(i) = 1 / prod_{j=0}^{r-2} <i - j - 1>.
// Defined (finite, nonzero) exactly on typical colors.
inline cplx mod_dim(const RootData& rd, cplx i) {
  if (!typical(rd, i))
    throw NotTypical("mod_dim: color is not typical");
  cplx p(1.0);
  for (int j = 0; j <= rd.r - 2; ++j) p *= qn(rd, i - cplx(j + 1.0));
  return cplx(1.0) / p;
}

// Key for hashing colors: real/imag rounded to 12 decimal digits.
struct ColorKey {
  std::int64_t re = 0, im = 0;
  ColorKey() = default;
  explicit ColorKey(cplx c)
      : re(std::llround(c.real() * 1e12)), im(std::llround(c.imag() * 1e12)) {}
  friend bool operator==(const ColorKey& a, const ColorKey& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator<(const ColorKey& a, const ColorKey& b) {
    return a.re != b.re ? a.re < b.re : a.im < b.im;
  }
};

}  // namespace tetratv
