#pragma once

// Seeded sampling of colors, grades and test tuples. Every consumer of
// randomness takes one of these explicitly, so a fixed seed reproduces a run
// bit for bit.

#include <random>

#include "tetratv/graded.hpp"
#include "tetratv/qarith.hpp"

namespace tetratv {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  // Generic complex color, resampled until the integrality gates pass with
  // margin 1e-3. Real parts range over [-4, 4]; imaginary parts are kept in
  // [-1, 1] so that double-precision evaluation retains well over the 1e-8
  // accuracy every residual check demands.
  cplx generic_color(const RootData& rd) {
    for (;;) {
      cplx c{uniform(-4.0, 4.0), uniform(-1.0, 1.0)};
      if (margin_ok(c)) return c;
    }
  }

  // Several colors whose pairwise sums and differences are clearly
  // non-integral, so every relevant pair is good.
  std::vector<cplx> generic_colors(const RootData& rd, int count) {
    for (;;) {
      std::vector<cplx> cs;
      for (int s = 0; s < count; ++s) cs.push_back({uniform(-4.0, 4.0), uniform(-1.0, 1.0)});
      bool ok = true;
      for (size_t a = 0; a < cs.size() && ok; ++a) {
        ok = ok && margin_ok(cs[a]);
        for (size_t b = 0; b < cs.size() && ok; ++b)
          if (a != b) ok = ok && margin_ok(cs[a] + cs[b]) && margin_ok(cs[a] - cs[b]);
      }
      if (ok) return cs;
    }
  }

  // Grade outside X with margin.
  cplx generic_grade() {
    for (;;) {
      cplx g{uniform(0.0, 2.0), uniform(-1.0, 1.0)};
      if (margin_ok(g)) return g;
    }
  }

  // Tuple (i,j,k,l,m,n) whose four face triples all have allowed heights, so
  // the 6j-symbol is generically nonzero. Heights h1, h3, h4 are drawn from
  // the allowed even window with h2 = -h1-h3-h4 allowed too.
  std::array<cplx, 6> admissible_tuple(const RootData& rd) {
    auto hs = allowed_heights(rd);
    for (;;) {
      int h1 = hs[size_t(uniform_int(0, int(hs.size()) - 1))];
      int h3 = hs[size_t(uniform_int(0, int(hs.size()) - 1))];
      int h4 = hs[size_t(uniform_int(0, int(hs.size()) - 1))];
      int h2 = -h1 - h3 - h4;
      if (std::abs(h2) > rd.r - 1 || ((h2 % 2) + 2) % 2 != 0) continue;
      auto cs = generic_colors(rd, 3);
      cplx i = cs[0], j = cs[1], n = cs[2];
      cplx k = i + j - cplx(double(h1));
      cplx l = n - j - cplx(double(h3));
      cplx m = n + i + cplx(double(h4));
      std::array<cplx, 6> t{i, j, k, l, m, n};
      bool ok = true;
      for (size_t a = 0; a < 6 && ok; ++a) {
        ok = margin_ok(t[a]);
        for (size_t b = a + 1; b < 6 && ok; ++b)
          ok = margin_ok(t[a] + t[b]) && margin_ok(t[a] - t[b]);
      }
      if (ok) return t;
    }
  }

  static bool margin_ok(cplx z, double margin = 1e-3) {
    if (std::abs(z.imag()) > margin) return true;
    return std::abs(z.real() - std::round(z.real())) > margin;
  }

  std::mt19937_64& raw() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace tetratv
