#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "tetratv/statesum.hpp"

using namespace tetratv;

namespace {

TriangulationData load_fixture() {
  std::ifstream in(std::string(TETRATV_FIXTURES_DIR) + "/s3_unknot.json");
  REQUIRE(in.good());
  return triangulation_from_json(nlohmann::json::parse(in));
}

GColoring fixture_coloring(const HTriangulation& tri) {
  std::ifstream in(std::string(TETRATV_FIXTURES_DIR) + "/s3_unknot_cocycle.json");
  REQUIRE(in.good());
  return coloring_from_json(tri, nlohmann::json::parse(in));
}

double rel_dev(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

// corner relabeling by one even permutation applied to every tetrahedron
TriangulationData relabel(const TriangulationData& d, const std::array<int, 4>& perm) {
  std::array<int, 4> inv{};
  for (int c = 0; c < 4; ++c) inv[size_t(perm[size_t(c)])] = c;
  TriangulationData out;
  out.n_tets = d.n_tets;
  for (const auto& g : d.gluings) {
    GluingRec r;
    r.tet = g.tet;
    r.face = perm[size_t(g.face)];
    r.to_tet = g.to_tet;
    r.to_face = perm[size_t(g.to_face)];
    std::array<int, 4> full{-1, -1, -1, -1};
    auto src = tetratv::detail::face_corners_sorted(g.face);
    for (int s = 0; s < 3; ++s) full[size_t(src[size_t(s)])] = g.corner_map[size_t(s)];
    auto nsrc = tetratv::detail::face_corners_sorted(r.face);
    for (int s = 0; s < 3; ++s)
      r.corner_map[size_t(s)] = perm[size_t(full[size_t(inv[size_t(nsrc[size_t(s)])])])];
    out.gluings.push_back(r);
  }
  for (const auto& le : d.link)
    out.link.push_back({le.tet, {perm[size_t(le.corners[0])], perm[size_t(le.corners[1])]}});
  return out;
}

}  // namespace

TEST_CASE("state sum on the fixture") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  TVResult res = tv(eng, tri, col);
  CHECK(res.states == 729);  // 3^6
  CHECK(res.surviving > 0);
  CHECK(std::isfinite(res.value.real()));
  CHECK(std::isfinite(res.value.imag()));
  // non-admissible coloring is rejected
  GColoring bad = coboundary_coloring(tri, {cplx(0.0), cplx(1.0), cplx(0.3), cplx(0.7)});
  CHECK_THROWS_AS(tv(eng, tri, bad), NotAdmissible);
}

TEST_CASE("pruning soundness") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  StateSum ss(eng, tri, col);
  // the pruned states evaluate to exactly zero through the full product
  int checked = 0;
  for (long s = 0; s < 729 && checked < 20; s += 7) {
    cplx term = ss.evaluate_state(s);
    if (term == cplx(0.0)) ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("cohomologous colorings give the same value") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  cplx v0 = tv(eng, tri, col).value;
  GColoring col2 = col;
  col2.add_coboundary(tri, 0, cplx(0.57, 0.13));
  REQUIRE(col2.is_admissible(tri));
  cplx v1 = tv(eng, tri, col2).value;
  CHECK(rel_dev(v0, v1) < 1e-8);
  // an entirely different cocycle in the same (trivial) class
  GColoring col3 = coboundary_coloring(
      tri, {cplx(0.21, 0.4), cplx(1.13, -0.2), cplx(0.77, 0.1), cplx(1.55, 0.33)});
  REQUIRE(col3.is_admissible(tri));
  cplx v2 = tv(eng, tri, col3).value;
  CHECK(rel_dev(v0, v2) < 1e-8);
}

TEST_CASE("move invariance") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  cplx v0 = tv(eng, tri, col).value;
  Sampler rng(11);

  // bubble
  auto bub = bubble_add(tri, col, 0, 0, {1, 2}, rng);
  HTriangulation tb(bub.data);
  REQUIRE(bub.coloring.is_admissible(tb));
  CHECK(rel_dev(v0, tv(eng, tb, bub.coloring).value) < 1e-8);

  // pachner 2->3 on the bubbled complex
  auto p23 = pachner_23(tb, bub.coloring, bub.created_vertex_slot_tet, 3);
  HTriangulation tp(p23.data);
  GColoring pc = p23.coloring;
  if (!pc.is_admissible(tp)) pc = make_admissible(tp, pc, rng);
  CHECK(rel_dev(v0, tv(eng, tp, pc).value) < 1e-8);

  // pachner 3->2 back
  auto p32 = pachner_32(tp, p23.coloring, p23.created_edge[0], p23.created_edge[1],
                        p23.created_edge[2]);
  HTriangulation tq(p32.data);
  CHECK(rel_dev(v0, tv(eng, tq, p32.coloring).value) < 1e-8);

  // bubble back
  auto unb = bubble_remove(tb, bub.coloring, tb.vertex_class(bub.created_vertex_slot_tet, 3));
  HTriangulation tu(unb.data);
  CHECK(rel_dev(v0, tv(eng, tu, unb.coloring).value) < 1e-8);

  // lune there and back
  auto lun = lune_add(tri, col, 0, 0, 0, 1);
  HTriangulation tl(lun.data);
  GColoring lc = lun.coloring;
  if (!lc.is_admissible(tl)) lc = make_admissible(tl, lc, rng);
  CHECK(rel_dev(v0, tv(eng, tl, lc).value) < 1e-8);
  auto unl = lune_remove(tl, lun.coloring, lun.created_edge[0], lun.created_edge[1],
                         lun.created_edge[2]);
  HTriangulation tm(unl.data);
  CHECK(rel_dev(v0, tv(eng, tm, unl.coloring).value) < 1e-8);
}

TEST_CASE("gauge and relabeling invariance") {
  RootData rd(3, 1);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  Engine eng(rd, Flavor::truncated);
  cplx v0 = tv(eng, tri, col).value;
  // rescale one canonical coupon through the test hook
  Engine eng2(rd, Flavor::truncated);
  cplx g = col.value(tri, 0, 1, 0);
  auto is = index_set(rd, g);
  eng2.set_gauge({is[0], is[1], eng2.star(canonical_rep(rd, is[0] + is[1]))}, cplx(1.3, -0.4));
  cplx v1 = tv(eng2, tri, col).value;
  CHECK(rel_dev(v0, v1) < 1e-9);
  // corner relabeling by an even permutation
  std::array<int, 4> perm{1, 2, 0, 3};
  TriangulationData rd2 = relabel(tri.data(), perm);
  HTriangulation tri2(rd2);
  std::vector<cplx> vals(size_t(tri2.n_oriented()));
  for (int o = 0; o < tri2.n_oriented(); ++o) {
    auto [t, a, b] = tri2.oclass_members(o)[0];
    std::array<int, 4> inv{};
    for (int c = 0; c < 4; ++c) inv[size_t(perm[size_t(c)])] = c;
    vals[size_t(o)] = col.value(tri, t, inv[size_t(a)], inv[size_t(b)]);
  }
  GColoring col2(tri2, std::move(vals));
  REQUIRE(col2.is_admissible(tri2));
  Engine eng3(rd, Flavor::truncated);
  cplx v2 = tv(eng3, tri2, col2).value;
  CHECK(rel_dev(v0, v2) < 1e-8);
}

TEST_CASE("tet color conventions") {
  RootData rd(3, 1);
  Engine eng(rd, Flavor::truncated);
  HTriangulation tri(load_fixture());
  GColoring col = fixture_coloring(tri);
  StateSum ss(eng, tri, col);
  std::vector<cplx> state;
  for (int e = 0; e < tri.n_edges(); ++e) {
    cplx g = col.value_oclass(tri.canonical_oclass(e));
    state.push_back(index_set(rd, g)[size_t(e % 3)]);
  }
  auto tup = tet_colors(eng, tri, 0, state);
  // i = phi(1->0): reversing the orientation stars the color
  auto [e10, s10] = tri.edge_class(0, 1, 0);
  cplx raw = state[size_t(e10)];
  CHECK(ColorKey(tup[0]) == ColorKey(s10 > 0 ? raw : eng.star(raw)));
  auto [e01, s01] = tri.edge_class(0, 0, 1);
  CHECK(s01 == -s10);
}
