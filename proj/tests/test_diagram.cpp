#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "tetratv/diagram.hpp"
#include "tetratv/rng.hpp"

using namespace tetratv;

namespace {
std::array<cplx, 3> good_triple_sample(Sampler& rng, const RootData& rd, int height) {
  for (;;) {
    auto cs = rng.generic_colors(rd, 2);
    cplx a = cs[0], b = cs[1];
    cplx c = cplx(double(height)) - a - b;
    if (Sampler::margin_ok(c) && Sampler::margin_ok(a + c) && Sampler::margin_ok(b + c))
      return {a, b, c};
  }
}
}  // namespace

TEST_CASE("slice programs parse and typecheck") {
  for (const char* text : programs::theta_cuts) CHECK_NOTHROW(parse_program(text));
  for (const char* text : programs::tetra_cuts) CHECK_NOTHROW(parse_program(text));
  CHECK_NOTHROW(parse_program(programs::theta_cut_a_revc));
  CHECK_NOTHROW(parse_program(programs::tetra_cut_i_revn));
}

TEST_CASE("fixtures mirror the embedded programs") {
  auto body = [](const char* text) {
    std::string s(text);
    return s.substr(s.find_first_not_of('\n'));
  };
  std::map<std::string, std::string> files = {
      {"theta_cut_a", body(programs::theta_cut_a)},
      {"theta_cut_b", body(programs::theta_cut_b)},
      {"theta_cut_c", body(programs::theta_cut_c)},
      {"theta_cut_a_revc", body(programs::theta_cut_a_revc)},
      {"tetra_cut_i", body(programs::tetra_cut_i)},
      {"tetra_cut_j", body(programs::tetra_cut_j)},
      {"tetra_cut_k", body(programs::tetra_cut_k)},
      {"tetra_cut_l", body(programs::tetra_cut_l)},
      {"tetra_cut_m", body(programs::tetra_cut_m)},
      {"tetra_cut_n", body(programs::tetra_cut_n)},
      {"tetra_cut_i_revn", body(programs::tetra_cut_i_revn)},
  };
  for (const auto& [name, text] : files) {
    std::ifstream in(std::string(TETRATV_FIXTURES_DIR) + "/diagrams/" + name + ".txt");
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == text);
  }
}

TEST_CASE("identity and zig-zag programs evaluate to the identity") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  std::array<cplx, 6> binding{cplx(0.4, 0.2), 0, 0, 0, 0, 0};
  SliceProgram id_prog = parse_program("graph id\nslots a\ncut a\nlayer id\n");
  Mat m = eng.eval_open(id_prog, binding, {});
  CHECK((m - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  SliceProgram zig = parse_program("graph zig\nslots a\ncut a\nlayer b:a id\nlayer id d:a\n");
  m = eng.eval_open(zig, binding, {});
  CHECK((m - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  SliceProgram zag = parse_program("graph zag\nslots a\ncut a\nlayer id bp:a\nlayer dp:a id\n");
  m = eng.eval_open(zag, binding, {});
  CHECK((m - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pivotal compatibility as a diagram identity") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(3);
  SliceProgram left =
      parse_program("graph fam_left\nslots c\ncut c\nbottom c* c\nlayer w:c* id\nlayer d:c\n");
  SliceProgram right =
      parse_program("graph fam_right\nslots c\ncut c\nbottom c* c\nlayer id w:c\nlayer dp:c*\n");
  for (int s = 0; s < 5; ++s) {
    std::array<cplx, 6> binding{rng.generic_color(rd), 0, 0, 0, 0, 0};
    Mat a = eng.eval_open(left, binding, {});
    Mat b = eng.eval_open(right, binding, {});
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("height rule for invariant spaces") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  CHECK(eng.inv_dim({cplx(0.5), cplx(0.7), cplx(0.8)}) == 1);
  CHECK(eng.inv_dim({cplx(0.5), cplx(0.7), cplx(0.9)}) == 0);
  CHECK(eng.inv_dim({cplx(0.5), cplx(0.7), cplx(2.8)}) == 0);
  Sampler rng(17);
  int checked = 0;
  while (checked < 60) {
    auto cs = rng.generic_colors(rd, 2);
    int h = rng.uniform_int(-rd.r - 2, rd.r + 2);
    cplx c = cplx(double(h)) - cs[0] - cs[1];
    if (!Sampler::margin_ok(c)) continue;
    int dim = eng.inv_dim({cs[0], cs[1], c});
    bool allowed = (std::abs(h) <= rd.r - 1) && (((h % 2) + 2) % 2 == 0);
    CHECK(dim == (allowed ? 1 : 0));
    ++checked;
  }
}

TEST_CASE("canonical vectors are deterministic invariant vectors") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  std::array<cplx, 3> t{cplx(0.5), cplx(0.7), cplx(0.8)};
  Vec v1 = eng.canonical_vector(t);
  Engine eng2(rd, Flavor::unrolled);
  Vec v2 = eng2.canonical_vector(t);
  CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
  WeightModule full = tensor(tensor(eng.module(t[0]), eng.module(t[1])), eng.module(t[2]));
  CHECK((full.E * v1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((full.F * v1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((full.K * v1 - v1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((full.H * v1).cwiseAbs().maxCoeff() < 1e-9);
  // pivot coordinate is exactly one
  long pivot = -1;
  double amax = v1.cwiseAbs().maxCoeff();
  for (long s = 0; s < v1.size(); ++s)
    if (std::abs(v1(s)) > 1e-6 * amax) {
      pivot = s;
      break;
    }
  CHECK(v1(pivot) == cplx(1.0));
}

TEST_CASE("sigma rotation scalars") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  Sampler rng(29);
  for (int s = 0; s < 10; ++s) {
    auto t = good_triple_sample(rng, rd, (s % 2) ? 0 : 2);
    cplx p = eng.sigma_scalar(t) * eng.sigma_scalar({t[1], t[2], t[0]}) *
             eng.sigma_scalar({t[2], t[0], t[1]});
    CHECK(std::abs(eng.sigma_scalar(t)) > 1e-12);
    CHECK(approx_eq(p, 1.0, 1e-8));
  }
}

TEST_CASE("theta pairing: cut independence, symmetry, cyclic rotation") {
  Sampler rng(37);
  for (int r : {3, 5}) {
    RootData rd(r, 1);
    Engine eng(rd, Flavor::unrolled);
    for (int s = 0; s < (r == 3 ? 10 : 4); ++s) {
      auto t = good_triple_sample(rng, rd, 0);
      auto st = [&](cplx c) { return eng.star(c); };
      Vec x = eng.canonical_vector(t);
      Vec y = eng.canonical_vector({st(t[2]), st(t[1]), st(t[0])});
      cplx v0 = eng.theta_pairing(t, x, y, 0);
      cplx v1 = eng.theta_pairing(t, x, y, 1);
      cplx v2 = eng.theta_pairing(t, x, y, 2);
      double scale = std::max(1.0, std::abs(v0));
      CHECK(std::abs(v0 - v1) / scale < 1e-8);
      CHECK(std::abs(v0 - v2) / scale < 1e-8);
      CHECK(std::abs(v0) > 1e-10);
      // (x,y)_{abc} = (y,x)_{c*b*a*}
      std::array<cplx, 3> td{st(t[2]), st(t[1]), st(t[0])};
      cplx w = eng.theta_pairing(td, y, x);
      CHECK(std::abs(v0 - w) / scale < 1e-8);
      // pairing of the symmetrized modules is invariant under rotation:
      // theta(a,b,c) = s(a,b,c) s(c*,b*,a*) s(b*,a*,c*) theta(b,c,a)
      cplx pred = eng.sigma_scalar(t) * eng.sigma_scalar(td) *
                  eng.sigma_scalar({st(t[1]), st(t[0]), st(t[2])}) *
                  eng.theta({t[1], t[2], t[0]});
      CHECK(std::abs(eng.theta(t) - pred) / scale < 1e-8);
    }
  }
}

TEST_CASE("tetrahedron evaluation: cut independence") {
  Sampler rng(43);
  RootData rd(3, 1);
  Engine eng(rd, Flavor::unrolled);
  for (int s = 0; s < 5; ++s) {
    auto t = rng.admissible_tuple(rd);
    cplx v0 = eng.sixj_cut(t, 0);
    CHECK(std::abs(v0) > 1e-10);
    for (int cut = 1; cut < 6; ++cut) {
      cplx vc = eng.sixj_cut(t, cut);
      CHECK(std::abs(v0 - vc) / std::max(1.0, std::abs(v0)) < 1e-8);
    }
  }
  // zero when a triple space vanishes
  auto t = rng.admissible_tuple(rd);
  t[2] += 0.5;  // breaks the height of (i,j,k*)
  CHECK(eng.sixj(t) == cplx(0.0));
}

TEST_CASE("truncated invariant spaces match unrolled ones at lifts") {
  RootData rd(3, 1);
  Engine u(rd, Flavor::unrolled);
  Engine c(rd, Flavor::truncated);
  Sampler rng(53);
  for (int s = 0; s < 5; ++s) {
    auto t = good_triple_sample(rng, rd, 2);
    // canonical representatives of the same classes
    std::array<cplx, 3> tc{canonical_rep(rd, t[0]), canonical_rep(rd, t[1]),
                           canonical_rep(rd, t[2])};
    // the truncated space ignores H, so dimensions agree only if the lift has
    // an allowed height; here it does by construction
    CHECK(u.inv_dim(t) == 1);
    CHECK(c.inv_dim(tc) == 1);
    Vec vu = u.canonical_vector(t);
    Vec vc = c.canonical_vector(tc);
    CHECK((vu - vc).cwiseAbs().maxCoeff() < 1e-8);
  }
}
