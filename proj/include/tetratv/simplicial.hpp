#pragma once

// Quasi-regular triangulations with Hamiltonian links, G-valued 1-cocycles,
// admissibility repair, and the three elementary moves (Pachner 2<->3,
// bubble, lune) with coloring transport.
//
// Conventions: face f of a tetrahedron is the face opposite corner f; the
// declared corner order (0,1,2,3) of every tetrahedron is positively
// oriented; gluings record the images of the sorted corners of the source
// face and must reverse the induced boundary cycles.

#include <algorithm>
#include <optional>
#include <set>

#include "tetratv/graded.hpp"
#include "tetratv/rng.hpp"

#include <nlohmann/json.hpp>

namespace tetratv {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotOrientable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotQuasiRegular : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotHamiltonian : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotCocycle : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAdmissible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadSite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LinkObstruction : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Induced boundary cycle of face f on a positively oriented tetrahedron.
inline constexpr int kFaceCycle[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

struct GluingRec {
  int tet = 0, face = 0, to_tet = 0, to_face = 0;
  std::array<int, 3> corner_map{};  // images of the sorted source-face corners
};

struct LinkEdgeRef {
  int tet = 0;
  std::array<int, 2> corners{};
};

struct TriangulationData {
  int n_tets = 0;
  std::vector<GluingRec> gluings;
  std::vector<LinkEdgeRef> link;
};

namespace detail {

inline std::array<int, 3> face_corners_sorted(int f) {
  std::array<int, 3> c{};
  int q = 0;
  for (int s = 0; s < 4; ++s)
    if (s != f) c[size_t(q++)] = s;
  return c;
}

inline bool cyclic_equal(std::array<int, 3> a, std::array<int, 3> b) {
  for (int rot = 0; rot < 3; ++rot) {
    if (a[0] == b[0] && a[1] == b[1] && a[2] == b[2]) return true;
    std::rotate(b.begin(), b.begin() + 1, b.end());
  }
  return false;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(size_t(n)) {
    for (int s = 0; s < n; ++s) parent[size_t(s)] = s;
  }
  int find(int x) {
    while (parent[size_t(x)] != x) {
      parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
      x = parent[size_t(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[size_t(find(a))] = find(b); }
};

}  // namespace detail

class HTriangulation {
 public:
  explicit HTriangulation(TriangulationData data) : data_(std::move(data)) { build(); }

  const TriangulationData& data() const { return data_; }
  int n_tets() const { return data_.n_tets; }

  // ---- face pairing -------------------------------------------------------
  bool has_partner(int t, int f) const { return glue_to_[slot(t, f)].first >= 0; }
  std::pair<int, int> partner(int t, int f) const { return glue_to_[slot(t, f)]; }
  // full corner bijection of the gluing at (t, f); entry for corner f is -1
  const std::array<int, 4>& corner_bijection(int t, int f) const {
    return glue_map_[slot(t, f)];
  }

  // ---- derived classes ----------------------------------------------------
  int n_vertices() const { return n_vcls_; }
  int n_edges() const { return n_ecls_; }
  int n_faces() const { return int(data_.gluings.size()); }
  int vertex_class(int t, int c) const {
    if (t < 0 || t >= data_.n_tets || c < 0 || c > 3)
      throw std::out_of_range("triangulation: corner reference out of range");
    return vcls_[size_t(4 * t + c)];
  }
  // oriented edge class of the edge a -> b inside tet t
  int oriented_class(int t, int a, int b) const { return ocls_[oslot(t, a, b)]; }
  int reverse_oclass(int o) const { return orev_[size_t(o)]; }
  int n_oriented() const { return n_ocls_; }
  // unoriented edge class and the sign of (a -> b) against its canonical
  // orientation
  std::pair<int, int> edge_class(int t, int a, int b) const {
    int o = oriented_class(t, a, b);
    return {ecls_of_ocls_[size_t(o)], osign_[size_t(o)]};
  }
  // canonical oriented class of an unoriented edge class
  int canonical_oclass(int e) const { return ecls_canon_[size_t(e)]; }
  const std::vector<std::array<int, 3>>& oclass_members(int o) const {
    return omembers_[size_t(o)];
  }
  std::array<int, 2> edge_endpoints(int e) const { return eends_[size_t(e)]; }

  const std::set<int>& link() const { return link_; }
  bool in_link(int edge_cls) const { return link_.count(edge_cls) > 0; }

  int euler_characteristic() const {
    return n_vcls_ - n_ecls_ + n_faces() - data_.n_tets;
  }

  // Move-site reporting
  struct SiteInfo {
    std::array<int, 3> created_edge{-1, -1, -1};  // (tet, a, b)
    int created_vertex = -1;                      // vertex class id
  };

 private:
  size_t slot(int t, int f) const {
    if (t < 0 || t >= data_.n_tets || f < 0 || f > 3)
      throw std::out_of_range("triangulation: face reference out of range");
    return size_t(4 * t + f);
  }
  size_t oslot(int t, int a, int b) const {
    if (t < 0 || t >= data_.n_tets || a < 0 || a > 3 || b < 0 || b > 3 || a == b)
      throw std::out_of_range("triangulation: edge reference out of range");
    return size_t(12 * t + 3 * a + b - (b > a ? 1 : 0));
  }

  void build() {
    const int n = data_.n_tets;
    if (n <= 0) throw ParseError("triangulation: no tetrahedra");
    glue_to_.assign(size_t(4 * n), {-1, -1});
    glue_map_.assign(size_t(4 * n), {-1, -1, -1, -1});
    for (const auto& g : data_.gluings) {
      auto chk = [&](int t, int f) {
        if (t < 0 || t >= n || f < 0 || f > 3) throw ParseError("gluing out of range");
      };
      chk(g.tet, g.face);
      chk(g.to_tet, g.to_face);
      if (g.tet == g.to_tet && g.face == g.to_face)
        throw ParseError("gluing of a face to itself");
      std::array<int, 4> fwd{-1, -1, -1, -1}, bwd{-1, -1, -1, -1};
      auto src = detail::face_corners_sorted(g.face);
      for (int s = 0; s < 3; ++s) {
        int img = g.corner_map[size_t(s)];
        if (img < 0 || img > 3 || img == g.to_face)
          throw ParseError("gluing corner map out of range");
        fwd[size_t(src[size_t(s)])] = img;
        bwd[size_t(img)] = src[size_t(s)];
      }
      auto put = [&](int t, int f, std::pair<int, int> to, const std::array<int, 4>& m) {
        if (glue_to_[slot(t, f)].first >= 0) throw NotClosed("face glued twice");
        glue_to_[slot(t, f)] = to;
        glue_map_[slot(t, f)] = m;
      };
      put(g.tet, g.face, {g.to_tet, g.to_face}, fwd);
      put(g.to_tet, g.to_face, {g.tet, g.face}, bwd);
    }
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f)
        if (glue_to_[slot(t, f)].first < 0) throw NotClosed("unglued face");

    // orientation: every gluing must reverse the induced boundary cycles
    for (const auto& g : data_.gluings) {
      std::array<int, 3> img{};
      const auto& m = glue_map_[slot(g.tet, g.face)];
      for (int s = 0; s < 3; ++s) img[size_t(s)] = m[size_t(kFaceCycle[g.face][s])];
      std::array<int, 3> tgt{kFaceCycle[g.to_face][0], kFaceCycle[g.to_face][2],
                             kFaceCycle[g.to_face][1]};  // reversed cycle
      if (!detail::cyclic_equal(img, tgt))
        throw NotOrientable("gluing does not reverse orientation");
    }

    // vertex classes
    detail::UnionFind vuf(4 * n);
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f) {
        auto [tt, ff] = glue_to_[slot(t, f)];
        const auto& m = glue_map_[slot(t, f)];
        for (int c = 0; c < 4; ++c)
          if (c != f) vuf.unite(4 * t + c, 4 * tt + m[size_t(c)]);
        (void)ff;
      }
    vcls_.assign(size_t(4 * n), -1);
    n_vcls_ = 0;
    std::vector<int> vroot(size_t(4 * n), -1);
    for (int s = 0; s < 4 * n; ++s) {
      int rt = vuf.find(s);
      if (vroot[size_t(rt)] < 0) vroot[size_t(rt)] = n_vcls_++;
      vcls_[size_t(s)] = vroot[size_t(rt)];
    }

    // oriented edge classes
    detail::UnionFind ouf(12 * n);
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f) {
        const auto& m = glue_map_[slot(t, f)];
        auto fc = detail::face_corners_sorted(f);
        for (int ai = 0; ai < 3; ++ai)
          for (int bi = 0; bi < 3; ++bi) {
            if (ai == bi) continue;
            int a = fc[size_t(ai)], b = fc[size_t(bi)];
            auto [tt, ff] = glue_to_[slot(t, f)];
            (void)ff;
            ouf.unite(int(oslot(t, a, b)), int(oslot(tt, m[size_t(a)], m[size_t(b)])));
          }
      }
    ocls_.assign(size_t(12 * n), -1);
    n_ocls_ = 0;
    std::vector<int> oroot(size_t(12 * n), -1);
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (a == b) continue;
          int s = int(oslot(t, a, b));
          int rt = ouf.find(s);
          if (oroot[size_t(rt)] < 0) oroot[size_t(rt)] = n_ocls_++;
          ocls_[size_t(s)] = oroot[size_t(rt)];
        }
    omembers_.assign(size_t(n_ocls_), {});
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (a != b) omembers_[size_t(ocls_[oslot(t, a, b)])].push_back({t, a, b});
    orev_.assign(size_t(n_ocls_), -1);
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (a == b) continue;
          int o = ocls_[oslot(t, a, b)], ro = ocls_[oslot(t, b, a)];
          if (orev_[size_t(o)] >= 0 && orev_[size_t(o)] != ro)
            throw ParseError("inconsistent edge reversal");
          orev_[size_t(o)] = ro;
        }

    // unoriented classes: canonical orientation = smaller oriented class id
    ecls_of_ocls_.assign(size_t(n_ocls_), -1);
    osign_.assign(size_t(n_ocls_), 0);
    n_ecls_ = 0;
    for (int o = 0; o < n_ocls_; ++o) {
      if (ecls_of_ocls_[size_t(o)] >= 0) continue;
      int ro = orev_[size_t(o)];
      int canon = std::min(o, ro);
      int e = n_ecls_++;
      ecls_canon_.push_back(canon);
      ecls_of_ocls_[size_t(o)] = e;
      ecls_of_ocls_[size_t(ro)] = e;
      osign_[size_t(canon)] = 1;
      osign_[size_t(orev_[size_t(canon)])] = (ro == o) ? 1 : -1;
    }

    // endpoints, quasi-regularity
    eends_.assign(size_t(n_ecls_), {-1, -1});
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          int o = ocls_[oslot(t, a, b)];
          int e = ecls_of_ocls_[size_t(o)];
          int canon = ecls_canon_[size_t(e)];
          int va = vcls_[size_t(4 * t + a)], vb = vcls_[size_t(4 * t + b)];
          std::array<int, 2> ends = (o == canon) ? std::array<int, 2>{va, vb}
                                                 : std::array<int, 2>{vb, va};
          if (eends_[size_t(e)][0] < 0)
            eends_[size_t(e)] = ends;
          else if (eends_[size_t(e)] != ends)
            throw ParseError("inconsistent edge endpoints");
        }
    for (int e = 0; e < n_ecls_; ++e)
      if (eends_[size_t(e)][0] == eends_[size_t(e)][1])
        throw NotQuasiRegular("edge with equal endpoints");

    // Hamiltonian link
    link_.clear();
    for (const auto& le : data_.link) {
      if (le.tet < 0 || le.tet >= n || le.corners[0] == le.corners[1])
        throw ParseError("bad link edge reference");
      link_.insert(edge_class(le.tet, le.corners[0], le.corners[1]).first);
    }
    if (!data_.link.empty()) {
      std::vector<int> deg(size_t(n_vcls_), 0);
      for (int e : link_)
        for (int v : eends_[size_t(e)]) deg[size_t(v)] += 1;
      for (int v = 0; v < n_vcls_; ++v)
        if (deg[size_t(v)] != 2)
          throw NotHamiltonian("link vertex degree is not 2");
    }
  }

  TriangulationData data_;
  std::vector<std::pair<int, int>> glue_to_;
  std::vector<std::array<int, 4>> glue_map_;
  std::vector<int> vcls_;
  int n_vcls_ = 0;
  std::vector<int> ocls_, orev_, ecls_of_ocls_, osign_, ecls_canon_;
  int n_ocls_ = 0, n_ecls_ = 0;
  std::vector<std::vector<std::array<int, 3>>> omembers_;
  std::vector<std::array<int, 2>> eends_;
  std::set<int> link_;
};

// ---------------------------------------------------------------------------
// G-colorings (1-cocycles on oriented edges)

class GColoring {
 public:
  GColoring() = default;
  GColoring(const HTriangulation& tri, std::vector<cplx> by_oclass)
      : val_(std::move(by_oclass)) {
    if (int(val_.size()) != tri.n_oriented())
      throw MissingEdge("coloring does not cover all oriented edges");
  }

  cplx value_oclass(int o) const { return val_[size_t(o)]; }
  cplx value(const HTriangulation& tri, int t, int a, int b) const {
    return val_[size_t(tri.oriented_class(t, a, b))];
  }
  cplx value_edge(const HTriangulation& tri, int e) const {
    return val_[size_t(tri.canonical_oclass(e))];
  }
  std::vector<cplx>& raw() { return val_; }
  const std::vector<cplx>& raw() const { return val_; }

  bool is_cocycle(const HTriangulation& tri, double tol = kIntegralTol) const {
    for (int o = 0; o < tri.n_oriented(); ++o) {
      cplx s = val_[size_t(o)] + val_[size_t(tri.reverse_oclass(o))];
      if (!same_grade(s, 0.0, tol)) return false;
    }
    for (const auto& g : tri.data().gluings) {
      const int t = g.tet, f = g.face;
      cplx s = 0.0;
      for (int e = 0; e < 3; ++e) {
        int a = kFaceCycle[f][e], b = kFaceCycle[f][(e + 1) % 3];
        s += value(tri, t, a, b);
      }
      if (!same_grade(s, 0.0, tol)) return false;
    }
    return true;
  }

  bool is_admissible(const HTriangulation& tri) const {
    if (!is_cocycle(tri)) return false;
    for (int o = 0; o < tri.n_oriented(); ++o)
      if (in_X(val_[size_t(o)])) return false;
    return true;
  }

  // Add the coboundary of the 0-cochain assigning g to vertex class v.
  void add_coboundary(const HTriangulation& tri, int v, cplx g) {
    for (int o = 0; o < tri.n_oriented(); ++o) {
      const auto& mem = tri.oclass_members(o);
      if (mem.empty()) continue;
      auto [t, a, b] = mem[0];
      cplx delta = 0.0;
      if (tri.vertex_class(t, b) == v) delta += g;
      if (tri.vertex_class(t, a) == v) delta -= g;
      val_[size_t(o)] = grade_rep(val_[size_t(o)] + delta);
    }
  }

 private:
  std::vector<cplx> val_;
};

// Build a coloring from the coboundary of vertex values (always a cocycle).
inline GColoring coboundary_coloring(const HTriangulation& tri, const std::vector<cplx>& c) {
  std::vector<cplx> vals(size_t(tri.n_oriented()));
  for (int o = 0; o < tri.n_oriented(); ++o) {
    auto [t, a, b] = tri.oclass_members(o)[0];
    vals[size_t(o)] = grade_rep(c[size_t(tri.vertex_class(t, b))] -
                                c[size_t(tri.vertex_class(t, a))]);
  }
  return GColoring(tri, std::move(vals));
}

// Admissibility repair: repeatedly shift by a coboundary supported on one bad
// vertex, with the shift sampled away from the finitely many forbidden
// translates of X.
inline GColoring make_admissible(const HTriangulation& tri, GColoring col, Sampler& rng,
                                 int max_rounds = -1) {
  if (!col.is_cocycle(tri)) throw NotCocycle("make_admissible: input is not a cocycle");
  if (max_rounds < 0) max_rounds = 4 * tri.n_vertices() + 8;
  for (int round = 0; round < max_rounds; ++round) {
    int bad = -1;
    for (int v = 0; v < tri.n_vertices() && bad < 0; ++v) {
      for (int o = 0; o < tri.n_oriented() && bad < 0; ++o) {
        auto [t, a, b] = tri.oclass_members(o)[0];
        if (tri.vertex_class(t, a) == v && in_X(col.value_oclass(o))) bad = v;
      }
    }
    if (bad < 0) return col;
    // sample g with g not in value(e) + X for any edge out of the bad vertex
    cplx g;
    for (;;) {
      g = cplx(rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0));
      bool ok = Sampler::margin_ok(g);
      for (int o = 0; o < tri.n_oriented() && ok; ++o) {
        auto [t, a, b] = tri.oclass_members(o)[0];
        if (tri.vertex_class(t, a) != bad && tri.vertex_class(t, b) != bad) continue;
        cplx nv = col.value_oclass(o);
        if (tri.vertex_class(t, b) == bad) nv += g;
        if (tri.vertex_class(t, a) == bad) nv -= g;
        ok = Sampler::margin_ok(nv);
      }
      if (ok) break;
    }
    col.add_coboundary(tri, bad, g);
  }
  throw NotAdmissible("make_admissible: did not terminate");
}

// ---------------------------------------------------------------------------
// JSON formats

inline TriangulationData triangulation_from_json(const nlohmann::json& j) {
  TriangulationData d;
  try {
    d.n_tets = j.at("tetrahedra").get<int>();
    for (const auto& g : j.at("gluings")) {
      GluingRec r;
      r.tet = g.at("tet").get<int>();
      r.face = g.at("face").get<int>();
      r.to_tet = g.at("to_tet").get<int>();
      r.to_face = g.at("to_face").get<int>();
      auto cm = g.at("corner_map");
      for (int s = 0; s < 3; ++s) r.corner_map[size_t(s)] = cm.at(size_t(s)).get<int>();
      d.gluings.push_back(r);
    }
    if (j.contains("link"))
      for (const auto& le : j.at("link")) {
        LinkEdgeRef r;
        r.tet = le.at("tet").get<int>();
        r.corners = {le.at("corners").at(0).get<int>(), le.at("corners").at(1).get<int>()};
        d.link.push_back(r);
      }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("triangulation json: ") + e.what());
  }
  return d;
}

inline nlohmann::json triangulation_to_json(const TriangulationData& d) {
  nlohmann::json j;
  j["tetrahedra"] = d.n_tets;
  j["gluings"] = nlohmann::json::array();
  for (const auto& g : d.gluings)
    j["gluings"].push_back({{"tet", g.tet},
                            {"face", g.face},
                            {"to_tet", g.to_tet},
                            {"to_face", g.to_face},
                            {"corner_map", g.corner_map}});
  j["link"] = nlohmann::json::array();
  for (const auto& le : d.link)
    j["link"].push_back({{"tet", le.tet}, {"corners", le.corners}});
  return j;
}

// Cocycle file: entries on oriented edges, lower corner -> higher corner.
inline GColoring coloring_from_json(const HTriangulation& tri, const nlohmann::json& j) {
  std::vector<cplx> vals(size_t(tri.n_oriented()));
  std::vector<bool> have(size_t(tri.n_oriented()), false);
  try {
    for (const auto& ent : j) {
      int t = ent.at("tet").get<int>();
      int a = ent.at("corners").at(0).get<int>();
      int b = ent.at("corners").at(1).get<int>();
      cplx v{ent.at("value").at(0).get<double>(), ent.at("value").at(1).get<double>()};
      int o = tri.oriented_class(t, a, b), ro = tri.reverse_oclass(o);
      if (have[size_t(o)] && !same_grade(vals[size_t(o)], v))
        throw ParseError("cocycle file: conflicting values on one edge class");
      vals[size_t(o)] = grade_rep(v);
      vals[size_t(ro)] = grade_rep(-v);
      have[size_t(o)] = have[size_t(ro)] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cocycle json: ") + e.what());
  }
  for (bool h : have)
    if (!h) throw MissingEdge("cocycle file does not cover all edges");
  return GColoring(tri, std::move(vals));
}

inline nlohmann::json coloring_to_json(const HTriangulation& tri, const GColoring& col) {
  nlohmann::json out = nlohmann::json::array();
  std::set<int> done;
  for (int t = 0; t < tri.n_tets(); ++t)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        int e = tri.edge_class(t, a, b).first;
        if (!done.insert(e).second) continue;
        cplx v = col.value(tri, t, a, b);
        out.push_back({{"tet", t},
                       {"corners", std::array<int, 2>{a, b}},
                       {"value", std::array<double, 2>{v.real(), v.imag()}}});
      }
  return out;
}

// ---------------------------------------------------------------------------
// Moves. Every move rebuilds the triangulation from scratch, transports the
// coloring through corner provenance, and re-derives all classes.

struct MoveResult {
  TriangulationData data;
  GColoring coloring;
  bool admissible = true;
  std::array<int, 3> created_edge{-1, -1, -1};  // slot (tet, a, b) in the new complex
  int created_vertex_slot_tet = -1;             // tet whose corner 3 is the new vertex
};

namespace detail {

using Prov = std::vector<std::array<std::pair<int, int>, 4>>;  // (-1,-1) = new corner

struct SlotRemap {
  // old face slot (t,f) -> new (tet, face) + corner map old-corner -> new-corner
  std::map<std::pair<int, int>, std::tuple<int, int, std::array<int, 4>>> map;
};

// Rewrite the surviving gluings of `old_d`, rerouting endpoints that lived on
// removed tetrahedra through `remap`; `tet_new` maps surviving old tets to new
// indices (-1 = removed).
inline void rewrite_gluings(const TriangulationData& old_d, const std::vector<int>& tet_new,
                            const SlotRemap& remap, const std::set<std::pair<int, int>>& drop,
                            TriangulationData& out) {
  for (const auto& g : old_d.gluings) {
    if (drop.count({g.tet, g.face}) || drop.count({g.to_tet, g.to_face})) continue;
    // endpoint -> (new tet, new face, old-corner -> new-corner map)
    auto route = [&](int t, int f) -> std::tuple<int, int, std::array<int, 4>> {
      if (tet_new[size_t(t)] >= 0) {
        std::array<int, 4> ident{0, 1, 2, 3};
        return {tet_new[size_t(t)], f, ident};
      }
      auto it = remap.map.find({t, f});
      if (it == remap.map.end()) throw BadSite("internal: unrouted face slot");
      return it->second;
    };
    auto [t1, f1, m1] = route(g.tet, g.face);
    auto [t2, f2, m2] = route(g.to_tet, g.to_face);
    // old full bijection on the source side
    std::array<int, 4> old_fwd{-1, -1, -1, -1};
    auto src = face_corners_sorted(g.face);
    for (int s = 0; s < 3; ++s) old_fwd[size_t(src[size_t(s)])] = g.corner_map[size_t(s)];
    GluingRec r;
    r.tet = t1;
    r.face = f1;
    r.to_tet = t2;
    r.to_face = f2;
    auto nsrc = face_corners_sorted(f1);
    // invert m1 to land on old corners, push through old_fwd then m2
    std::array<int, 4> m1inv{-1, -1, -1, -1};
    for (int c = 0; c < 4; ++c)
      if (c != g.face && m1[size_t(c)] >= 0) m1inv[size_t(m1[size_t(c)])] = c;
    for (int s = 0; s < 3; ++s) {
      int oldc = m1inv[size_t(nsrc[size_t(s)])];
      r.corner_map[size_t(s)] = m2[size_t(old_fwd[size_t(oldc)])];
    }
    out.gluings.push_back(r);
  }
}

// Transport an old coloring to the rebuilt complex. `explicit_vals` carries
// values for edges without old provenance, keyed by new oriented slots.
inline GColoring transport_coloring(const HTriangulation& old_tri, const GColoring& old_col,
                                    const HTriangulation& new_tri, const Prov& prov,
                                    const std::map<std::array<int, 3>, cplx>& explicit_vals) {
  std::vector<cplx> vals(size_t(new_tri.n_oriented()));
  std::vector<bool> have(size_t(new_tri.n_oriented()), false);
  auto assign = [&](int o, cplx v) {
    if (have[size_t(o)] && !same_grade(vals[size_t(o)], v))
      throw NotCocycle("move transport: inconsistent edge values");
    vals[size_t(o)] = grade_rep(v);
    int ro = new_tri.reverse_oclass(o);
    vals[size_t(ro)] = grade_rep(-v);
    have[size_t(o)] = have[size_t(ro)] = true;
  };
  for (const auto& [slot, v] : explicit_vals)
    assign(new_tri.oriented_class(slot[0], slot[1], slot[2]), v);
  for (int t = 0; t < new_tri.n_tets(); ++t)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        int o = new_tri.oriented_class(t, a, b);
        if (have[size_t(o)]) continue;
        auto pa = prov[size_t(t)][size_t(a)], pb = prov[size_t(t)][size_t(b)];
        if (pa.first < 0 || pb.first < 0 || pa.first != pb.first) continue;
        assign(o, old_col.value(old_tri, pa.first, pa.second, pb.second));
      }
  for (bool h : have)
    if (!h) throw MissingEdge("move transport: uncovered edge");
  return GColoring(new_tri, std::move(vals));
}

// Link transport by vertex-class matching plus explicit removals/additions.
inline std::vector<LinkEdgeRef> transport_link(const HTriangulation& old_tri,
                                               const HTriangulation& new_tri, const Prov& prov,
                                               const std::set<int>& removed_classes,
                                               const std::vector<LinkEdgeRef>& additions) {
  std::vector<LinkEdgeRef> out = additions;
  std::set<int> covered;
  for (const auto& le : additions)
    covered.insert(new_tri.edge_class(le.tet, le.corners[0], le.corners[1]).first);
  for (int e : old_tri.link()) {
    if (removed_classes.count(e)) continue;
    bool found = false;
    for (int t = 0; t < new_tri.n_tets() && !found; ++t)
      for (int a = 0; a < 4 && !found; ++a)
        for (int b = a + 1; b < 4 && !found; ++b) {
          auto pa = prov[size_t(t)][size_t(a)], pb = prov[size_t(t)][size_t(b)];
          if (pa.first < 0 || pb.first < 0 || pa.first != pb.first) continue;
          if (old_tri.edge_class(pa.first, pa.second, pb.second).first != e) continue;
          int ne = new_tri.edge_class(t, a, b).first;
          if (covered.insert(ne).second) out.push_back({t, {a, b}});
          found = true;
        }
    if (!found) throw LinkObstruction("move transport: lost a link edge");
  }
  return out;
}

}  // namespace detail

// ---- Pachner 2 -> 3 -------------------------------------------------------

inline MoveResult pachner_23(const HTriangulation& tri, const GColoring& col, int tA, int fA) {
  if (!tri.has_partner(tA, fA)) throw BadSite("pachner_23: no such face");
  auto [tB, fB] = tri.partner(tA, fA);
  if (tA == tB) throw BadSite("pachner_23: face interior to a single tetrahedron");
  // the new edge joins the two apexes; quasi-regularity needs distinct ends
  if (tri.vertex_class(tA, fA) == tri.vertex_class(tB, fB))
    throw BadSite("pachner_23: apex vertices coincide");
  const auto& g = tri.corner_bijection(tA, fA);
  std::array<int, 3> c{kFaceCycle[fA][0], kFaceCycle[fA][1], kFaceCycle[fA][2]};
  const auto& old_d = tri.data();

  std::vector<int> tet_new(size_t(old_d.n_tets), -1);
  int nn = 0;
  for (int t = 0; t < old_d.n_tets; ++t)
    if (t != tA && t != tB) tet_new[size_t(t)] = nn++;
  int base = nn;  // N_0, N_1, N_2 = base, base+1, base+2

  TriangulationData d;
  d.n_tets = nn + 3;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  for (int t = 0; t < old_d.n_tets; ++t)
    if (tet_new[size_t(t)] >= 0)
      for (int cidx = 0; cidx < 4; ++cidx)
        prov[size_t(tet_new[size_t(t)])][size_t(cidx)] = {t, cidx};
  // N_s corners: (0: c_s, 1: c_{s+1}, 2: apexA, 3: apexB)
  for (int s = 0; s < 3; ++s) {
    prov[size_t(base + s)][0] = {tA, c[size_t(s)]};
    prov[size_t(base + s)][1] = {tA, c[size_t((s + 1) % 3)]};
    prov[size_t(base + s)][2] = {tA, fA};
    prov[size_t(base + s)][3] = {tB, fB};
  }

  detail::SlotRemap remap;
  std::set<std::pair<int, int>> drop{{tA, fA}, {tB, fB}};
  for (int s = 0; s < 3; ++s) {
    // A's face opposite c_{s+2} -> N_s face 3; corners (c_s, c_{s+1}, apexA) -> (0,1,2)
    std::array<int, 4> mA{-1, -1, -1, -1};
    mA[size_t(c[size_t(s)])] = 0;
    mA[size_t(c[size_t((s + 1) % 3)])] = 1;
    mA[size_t(fA)] = 2;
    remap.map[{tA, c[size_t((s + 2) % 3)]}] = {base + s, 3, mA};
    // B's face opposite g(c_{s+2}) -> N_s face 2; (g(c_s), g(c_{s+1}), apexB) -> (0,1,3)
    std::array<int, 4> mB{-1, -1, -1, -1};
    mB[size_t(g[size_t(c[size_t(s)])])] = 0;
    mB[size_t(g[size_t(c[size_t((s + 1) % 3)])])] = 1;
    mB[size_t(fB)] = 3;
    remap.map[{tB, g[size_t(c[size_t((s + 2) % 3)])]}] = {base + s, 2, mB};
  }
  detail::rewrite_gluings(old_d, tet_new, remap, drop, d);
  // internal gluings: N_s face 1 <-> N_{s-1} face 0, corners (0,2,3) -> (1,2,3)
  for (int s = 0; s < 3; ++s) {
    GluingRec r;
    r.tet = base + s;
    r.face = 1;
    r.to_tet = base + (s + 2) % 3;
    r.to_face = 0;
    r.corner_map = {1, 2, 3};
    d.gluings.push_back(r);
  }
  d.link.clear();  // rebuilt below

  HTriangulation nt(d);
  // forced value on the new edge (apexA -> apexB): through c_0
  cplx forced = col.value(tri, tA, fA, c[0]) + col.value(tri, tB, g[size_t(c[0])], fB);
  std::map<std::array<int, 3>, cplx> ev;
  ev[{base, 2, 3}] = grade_rep(forced);
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, ev);
  auto link_refs = detail::transport_link(tri, nt, prov, {}, {});
  d.link = link_refs;

  MoveResult out{std::move(d), std::move(ncol), true, {base, 2, 3}, -1};
  out.admissible = !in_X(forced);
  return out;
}

// ---- Pachner 3 -> 2 -------------------------------------------------------

inline MoveResult pachner_32(const HTriangulation& tri, const GColoring& col, int t0, int a0,
                             int b0) {
  auto [ecls, sign] = tri.edge_class(t0, a0, b0);
  (void)sign;
  if (tri.in_link(ecls)) throw LinkObstruction("pachner_32: edge lies on the link");
  int o = tri.oriented_class(t0, a0, b0);
  auto members = tri.oclass_members(o);
  std::set<int> tets;
  for (auto& m : members) tets.insert(m[0]);
  if (members.size() != 3 || tets.size() != 3)
    throw BadSite("pachner_32: edge is not interior to exactly three tetrahedra");

  // walk the three tetrahedra around the edge
  struct Mem {
    int tet, ea, eb;  // edge corners, oriented ea -> eb
    int u, v;         // remaining corners
  };
  auto mem_of = [&](int tet) {
    for (auto& m : members)
      if (m[0] == tet) {
        Mem mm{m[0], m[1], m[2], -1, -1};
        for (int cc = 0; cc < 4; ++cc)
          if (cc != m[1] && cc != m[2]) (mm.u < 0 ? mm.u : mm.v) = cc;
        return mm;
      }
    throw BadSite("pachner_32: missing member");
  };
  Mem m0 = mem_of(t0);
  // Each member reads as the positive order (c_s, c_{s+1}, ea, eb), so the
  // permutation (c_s corner, c_{s+1} corner, ea, eb) of (0,1,2,3) is even;
  // this pins which of u, v plays c_s.
  auto orient_mem = [&](Mem& m) {
    auto parity = [](std::array<int, 4> p) {
      int inv = 0;
      for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y)
          if (p[size_t(x)] > p[size_t(y)]) ++inv;
      return inv % 2;
    };
    if (parity({m.u, m.v, m.ea, m.eb}) != 0) std::swap(m.u, m.v);
  };
  orient_mem(m0);
  // crossing the face opposite the c_s corner reaches the member sharing
  // c_{s+1}
  auto cross = [&](const Mem& m) {
    auto [pt, pf] = tri.partner(m.tet, m.u);
    if (!tets.count(pt)) throw BadSite("pachner_32: edge star is not a 3-book");
    (void)pf;
    Mem next = mem_of(pt);
    orient_mem(next);
    return next;
  };
  Mem m1 = cross(m0);
  if (m1.tet == m0.tet) throw BadSite("pachner_32: degenerate star");
  Mem m2 = cross(m1);
  if (m2.tet == m0.tet || m2.tet == m1.tet) throw BadSite("pachner_32: degenerate star");
  if (cross(m2).tet != m0.tet) throw BadSite("pachner_32: edge star does not close up");

  // with the orientation fixed, member m_s carries (c_s, c_{s+1}) = (u, v)
  int c0_in0 = m0.u, c1_in0 = m0.v;
  int c1_in1 = m1.u, c2_in1 = m1.v;
  int c2_in2 = m2.u, c0_in2 = m2.v;
  auto vc = [&](int t, int c) { return tri.vertex_class(t, c); };
  if (vc(m0.tet, c1_in0) != vc(m1.tet, c1_in1) || vc(m1.tet, c2_in1) != vc(m2.tet, c2_in2) ||
      vc(m2.tet, c0_in2) != vc(m0.tet, c0_in0))
    throw BadSite("pachner_32: equator vertices do not close up");

  const auto& old_d = tri.data();
  std::vector<int> tet_new(size_t(old_d.n_tets), -1);
  int nn = 0;
  for (int t = 0; t < old_d.n_tets; ++t)
    if (!tets.count(t)) tet_new[size_t(t)] = nn++;
  int iA = nn, iB = nn + 1;

  TriangulationData d;
  d.n_tets = nn + 2;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  for (int t = 0; t < old_d.n_tets; ++t)
    if (tet_new[size_t(t)] >= 0)
      for (int cidx = 0; cidx < 4; ++cidx)
        prov[size_t(tet_new[size_t(t)])][size_t(cidx)] = {t, cidx};
  // A = (c0, c2, c1, apexA), B = (c0, c1, c2, apexB)
  prov[size_t(iA)][0] = {m0.tet, c0_in0};
  prov[size_t(iA)][1] = {m2.tet, c2_in2};
  prov[size_t(iA)][2] = {m1.tet, c1_in1};
  prov[size_t(iA)][3] = {m0.tet, m0.ea};
  prov[size_t(iB)][0] = {m0.tet, c0_in0};
  prov[size_t(iB)][1] = {m0.tet, c1_in0};
  prov[size_t(iB)][2] = {m2.tet, c2_in2};
  prov[size_t(iB)][3] = {m0.tet, m0.eb};

  // route member outer faces: member m_s has equator corners c_s, c_{s+1}
  // A-side outer face of m_s: the face opposite eb (contains ea = apexA)
  // B-side outer face of m_s: the face opposite ea
  struct Eq {
    int in_mem_s;    // corner of m_s
    int a_pos, b_pos;  // positions in A and B
  };
  auto eqmap = [&](const Mem& m, int cs, int cs1, int a_cs, int a_cs1, int b_cs, int b_cs1) {
    std::array<int, 4> mA{-1, -1, -1, -1}, mB{-1, -1, -1, -1};
    mA[size_t(cs)] = a_cs;
    mA[size_t(cs1)] = a_cs1;
    mA[size_t(m.ea)] = 3;
    mB[size_t(cs)] = b_cs;
    mB[size_t(cs1)] = b_cs1;
    mB[size_t(m.eb)] = 3;
    return std::pair<std::array<int, 4>, std::array<int, 4>>{mA, mB};
  };
  // positions: A = (c0@0, c2@1, c1@2), B = (c0@0, c1@1, c2@2)
  detail::SlotRemap remap;
  std::set<std::pair<int, int>> drop;
  // internal faces (containing the edge) are dropped
  for (const Mem& m : {m0, m1, m2}) {
    drop.insert({m.tet, m.u});
    drop.insert({m.tet, m.v});
  }
  {
    auto [mA, mB] = eqmap(m0, c0_in0, c1_in0, 0, 2, 0, 1);
    remap.map[{m0.tet, m0.eb}] = {iA, [&] {
      // A face containing (apexA, c0, c1) is opposite c2 -> position 1
      return 1;
    }(), mA};
    remap.map[{m0.tet, m0.ea}] = {iB, 2, mB};  // B face with (b, c0, c1): opposite c2@2
  }
  {
    // m1: equator (c1, c2)
    std::array<int, 4> mA{-1, -1, -1, -1}, mB{-1, -1, -1, -1};
    mA[size_t(c1_in1)] = 2;
    mA[size_t(c2_in1)] = 1;
    mA[size_t(m1.ea)] = 3;
    mB[size_t(c1_in1)] = 1;
    mB[size_t(c2_in1)] = 2;
    mB[size_t(m1.eb)] = 3;
    remap.map[{m1.tet, m1.eb}] = {iA, 0, mA};  // A face (a, c1, c2): opposite c0@0
    remap.map[{m1.tet, m1.ea}] = {iB, 0, mB};
  }
  {
    // m2: equator (c2, c0)
    std::array<int, 4> mA{-1, -1, -1, -1}, mB{-1, -1, -1, -1};
    mA[size_t(c2_in2)] = 1;
    mA[size_t(c0_in2)] = 0;
    mA[size_t(m2.ea)] = 3;
    mB[size_t(c2_in2)] = 2;
    mB[size_t(c0_in2)] = 0;
    mB[size_t(m2.eb)] = 3;
    remap.map[{m2.tet, m2.eb}] = {iA, 2, mA};  // A face (a, c2, c0): opposite c1@2
    remap.map[{m2.tet, m2.ea}] = {iB, 1, mB};
  }
  detail::rewrite_gluings(old_d, tet_new, remap, drop, d);
  // the restored face: A.face3 <-> B.face3, corners (0,1,2) -> (0,2,1)
  GluingRec r;
  r.tet = iA;
  r.face = 3;
  r.to_tet = iB;
  r.to_face = 3;
  r.corner_map = {0, 2, 1};
  d.gluings.push_back(r);

  HTriangulation nt(d);
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, {});
  d.link = detail::transport_link(tri, nt, prov, {}, {});
  MoveResult out{std::move(d), std::move(ncol), true, {-1, -1, -1}, -1};
  return out;
}

// ---- Bubble moves ---------------------------------------------------------

inline MoveResult bubble_add(const HTriangulation& tri, const GColoring& col, int t, int f,
                             std::array<int, 2> link_edge_corners, Sampler& rng) {
  if (!tri.has_partner(t, f)) throw BadSite("bubble_add: no such face");
  auto fc = detail::face_corners_sorted(f);
  auto in_face = [&](int c) { return c == fc[0] || c == fc[1] || c == fc[2]; };
  int y = link_edge_corners[0], z = link_edge_corners[1];
  if (!in_face(y) || !in_face(z) || y == z) throw BadSite("bubble_add: edge not on the face");
  auto [ecls, esign] = tri.edge_class(t, y, z);
  (void)esign;
  if (!tri.in_link(ecls)) throw LinkObstruction("bubble_add: chosen edge is not on the link");
  auto [tp, fp] = tri.partner(t, f);
  const auto& g = tri.corner_bijection(t, f);

  const auto& old_d = tri.data();
  TriangulationData d;
  d.n_tets = old_d.n_tets + 2;
  int i1 = old_d.n_tets, i2 = old_d.n_tets + 1;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  std::vector<int> tet_new(size_t(old_d.n_tets));
  for (int s = 0; s < old_d.n_tets; ++s) {
    tet_new[size_t(s)] = s;
    for (int cidx = 0; cidx < 4; ++cidx) prov[size_t(s)][size_t(cidx)] = {s, cidx};
  }
  // T1 corners 0,1,2 follow the cycle of face (t,f); corner 3 is the new vertex
  std::array<int, 3> cyc{kFaceCycle[f][0], kFaceCycle[f][1], kFaceCycle[f][2]};
  std::array<int, 3> cycp{kFaceCycle[fp][0], kFaceCycle[fp][1], kFaceCycle[fp][2]};
  for (int s = 0; s < 3; ++s) {
    prov[size_t(i1)][size_t(s)] = {t, cyc[size_t(s)]};
    prov[size_t(i2)][size_t(s)] = {tp, cycp[size_t(s)]};
  }
  // keep all old gluings except the split face
  detail::SlotRemap remap;
  std::set<std::pair<int, int>> drop;  // nothing dropped; the face gluing is replaced
  for (const auto& gr : old_d.gluings) {
    if (gr.tet == t && gr.face == f) continue;
    if (gr.tet == tp && gr.face == fp && tri.partner(tp, fp) == std::make_pair(t, f)) continue;
    d.gluings.push_back(gr);
  }
  (void)remap;
  (void)drop;
  // outer gluings: T1.face3 <-> (t,f), T2.face3 <-> (tp,fp)
  {
    GluingRec r;
    r.tet = i1;
    r.face = 3;
    r.to_tet = t;
    r.to_face = f;
    r.corner_map = {cyc[0], cyc[1], cyc[2]};
    d.gluings.push_back(r);
  }
  {
    GluingRec r;
    r.tet = i2;
    r.face = 3;
    r.to_tet = tp;
    r.to_face = fp;
    r.corner_map = {cycp[0], cycp[1], cycp[2]};
    d.gluings.push_back(r);
  }
  // internal gluings T1.face_p <-> T2.face_p' with p' matching through g
  auto pos_in = [&](const std::array<int, 3>& cycle, int corner) {
    for (int s = 0; s < 3; ++s)
      if (cycle[size_t(s)] == corner) return s;
    throw BadSite("bubble_add: corner not on face");
  };
  for (int p = 0; p < 3; ++p) {
    int pprime = pos_in(cycp, g[size_t(cyc[size_t(p)])]);
    GluingRec r;
    r.tet = i1;
    r.face = p;
    r.to_tet = i2;
    r.to_face = pprime;
    auto src = detail::face_corners_sorted(p);
    for (int s = 0; s < 3; ++s) {
      int c = src[size_t(s)];
      r.corner_map[size_t(s)] =
          (c == 3) ? 3 : pos_in(cycp, g[size_t(cyc[size_t(c)])]);
    }
    d.gluings.push_back(r);
  }

  HTriangulation nt(d);
  // new-vertex edge values: free parameter on (v -> corner0), others forced
  int py = pos_in(cyc, y), pz = pos_in(cyc, z);
  std::map<std::array<int, 3>, cplx> ev;
  for (;;) {
    cplx gfree{rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0)};
    std::array<cplx, 3> vals;
    vals[0] = gfree;  // value on (v -> cyc[0])
    vals[1] = gfree + col.value(tri, t, cyc[0], cyc[1]);
    vals[2] = gfree + col.value(tri, t, cyc[0], cyc[2]);
    bool ok = true;
    for (auto v : vals) ok = ok && Sampler::margin_ok(v);
    if (!ok) continue;
    for (int p = 0; p < 3; ++p) ev[{i1, 3, p}] = grade_rep(vals[size_t(p)]);
    break;
  }
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, ev);
  std::vector<LinkEdgeRef> add{{i1, {3, py}}, {i1, {3, pz}}};
  d.link = detail::transport_link(tri, nt, prov, {ecls}, add);

  MoveResult out{std::move(d), std::move(ncol), true, {-1, -1, -1}, i1};
  out.admissible = out.coloring.is_admissible(nt);
  return out;
}

inline MoveResult bubble_remove(const HTriangulation& tri, const GColoring& col, int vcls) {
  // locate the two tetrahedra holding the vertex class
  std::vector<std::pair<int, int>> slots;
  for (int t = 0; t < tri.n_tets(); ++t)
    for (int c = 0; c < 4; ++c)
      if (tri.vertex_class(t, c) == vcls) slots.push_back({t, c});
  if (slots.size() != 2 || slots[0].first == slots[1].first)
    throw BadSite("bubble_remove: vertex star is not a bubble");
  auto [t1, c1] = slots[0];
  auto [t2, c2] = slots[1];
  // the three faces of t1 containing the vertex must glue to t2
  std::array<int, 4> corr{-1, -1, -1, -1};  // t1 corner -> t2 corner
  corr[size_t(c1)] = c2;
  for (int fface = 0; fface < 4; ++fface) {
    if (fface == c1) continue;  // outer face
    auto [pt, pf] = tri.partner(t1, fface);
    (void)pf;
    if (pt != t2) throw BadSite("bubble_remove: star face leaves the bubble");
    const auto& m = tri.corner_bijection(t1, fface);
    for (int cc = 0; cc < 4; ++cc) {
      if (cc == fface) continue;
      if (corr[size_t(cc)] >= 0 && corr[size_t(cc)] != m[size_t(cc)])
        throw BadSite("bubble_remove: inconsistent bubble identification");
      corr[size_t(cc)] = m[size_t(cc)];
    }
  }
  auto [o1t, o1f] = tri.partner(t1, c1);  // ambient partner of T1's outer face
  auto [o2t, o2f] = tri.partner(t2, c2);
  if ((o1t == t1 || o1t == t2) || (o2t == t1 || o2t == t2))
    throw BadSite("bubble_remove: bubble is not embedded in an ambient complex");
  // link edges at the vertex
  std::vector<int> vlink;
  for (int e : tri.link()) {
    auto ends = tri.edge_endpoints(e);
    if (ends[0] == vcls || ends[1] == vcls) vlink.push_back(e);
  }
  if (vlink.size() != 2) throw BadSite("bubble_remove: vertex is not on two link edges");
  // the opposite endpoints y, z as corners of t1
  std::array<int, 2> yz{-1, -1};
  for (size_t s = 0; s < 2; ++s)
    for (int cc = 0; cc < 4; ++cc) {
      if (cc == c1) continue;
      auto ends = tri.edge_endpoints(vlink[s]);
      int other = ends[0] == vcls ? ends[1] : ends[0];
      if (tri.vertex_class(t1, cc) == other) yz[s] = cc;
    }
  if (yz[0] < 0 || yz[1] < 0 || yz[0] == yz[1])
    throw BadSite("bubble_remove: link edges do not span the outer face");

  const auto& old_d = tri.data();
  std::vector<int> tet_new(size_t(old_d.n_tets), -1);
  int nn = 0;
  for (int t = 0; t < old_d.n_tets; ++t)
    if (t != t1 && t != t2) tet_new[size_t(t)] = nn++;
  TriangulationData d;
  d.n_tets = nn;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  for (int t = 0; t < old_d.n_tets; ++t)
    if (tet_new[size_t(t)] >= 0)
      for (int cidx = 0; cidx < 4; ++cidx)
        prov[size_t(tet_new[size_t(t)])][size_t(cidx)] = {t, cidx};
  // re-glue the ambient partners through T1 -> T2
  detail::SlotRemap remap;
  std::set<std::pair<int, int>> drop;
  for (int fface = 0; fface < 4; ++fface) {
    drop.insert({t1, fface});
    drop.insert({t2, fface});
  }
  TriangulationData tmp;
  detail::rewrite_gluings(old_d, tet_new, remap, drop, tmp);
  d.gluings = tmp.gluings;
  {
    // compose: partner1 corner -> t1 -> t2 -> partner2 corner
    const auto& m1 = tri.corner_bijection(t1, c1);  // t1 -> o1t (on the outer face)
    const auto& m2 = tri.corner_bijection(t2, c2);  // t2 -> o2t
    GluingRec r;
    r.tet = tet_new[size_t(o1t)];
    r.face = o1f;
    r.to_tet = tet_new[size_t(o2t)];
    r.to_face = o2f;
    std::array<int, 4> m1inv{-1, -1, -1, -1};
    for (int cc = 0; cc < 4; ++cc)
      if (cc != c1 && m1[size_t(cc)] >= 0) m1inv[size_t(m1[size_t(cc)])] = cc;
    auto src = detail::face_corners_sorted(o1f);
    for (int s = 0; s < 3; ++s) {
      int in_t1 = m1inv[size_t(src[size_t(s)])];
      r.corner_map[size_t(s)] = m2[size_t(corr[size_t(in_t1)])];
    }
    d.gluings.push_back(r);
  }
  HTriangulation nt(d);
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, {});
  std::vector<LinkEdgeRef> add;
  {
    // restore the (y,z) link edge via the ambient representative
    const auto& m1 = tri.corner_bijection(t1, c1);
    add.push_back({tet_new[size_t(o1t)],
                   {m1[size_t(yz[0])], m1[size_t(yz[1])]}});
  }
  std::set<int> removed{vlink[0], vlink[1]};
  d.link = detail::transport_link(tri, nt, prov, removed, add);
  return MoveResult{std::move(d), std::move(ncol), true, {-1, -1, -1}, -1};
}

// ---- Lune moves -----------------------------------------------------------

// Walk the face slots around an edge, starting through the tetrahedron of
// `slot`. Returns the ordered slots encountered (excluding the start).
inline std::vector<std::pair<int, int>> edge_face_walk(const HTriangulation& tri,
                                                       std::pair<int, int> slot, int ca, int cb) {
  std::vector<std::pair<int, int>> out;
  int t = slot.first, f = slot.second;
  int a = ca, b = cb;
  for (int guard = 0; guard < 4 * tri.n_tets() + 4; ++guard) {
    // the other face of t containing the edge (a,b)
    int fnext = -1;
    for (int ff = 0; ff < 4; ++ff)
      if (ff != a && ff != b && ff != f) fnext = ff;
    out.push_back({t, fnext});
    auto [pt, pf] = tri.partner(t, fnext);
    const auto& m = tri.corner_bijection(t, fnext);
    int na = m[size_t(a)], nb = m[size_t(b)];
    t = pt;
    f = pf;
    a = na;
    b = nb;
    out.push_back({t, f});
    if (std::make_pair(t, f) == slot) break;
  }
  return out;
}

inline MoveResult lune_add(const HTriangulation& tri, const GColoring& col, int ta, int fa,
                           int tb, int fb) {
  if (!tri.has_partner(ta, fa) || !tri.has_partner(tb, fb)) throw BadSite("lune_add: no face");
  if (std::make_pair(ta, fa) == std::make_pair(tb, fb) ||
      tri.partner(ta, fa) == std::make_pair(tb, fb))
    throw BadSite("lune_add: the two faces coincide");
  // shared edge class
  auto fca = detail::face_corners_sorted(fa);
  auto fcb = detail::face_corners_sorted(fb);
  int ya = -1, za = -1, yb = -1, zb = -1;
  int shared = -1;
  for (int s1 = 0; s1 < 3; ++s1)
    for (int s2 = s1 + 1; s2 < 3; ++s2) {
      int e1 = tri.edge_class(ta, fca[size_t(s1)], fca[size_t(s2)]).first;
      for (int u1 = 0; u1 < 3; ++u1)
        for (int u2 = u1 + 1; u2 < 3; ++u2) {
          int e2 = tri.edge_class(tb, fcb[size_t(u1)], fcb[size_t(u2)]).first;
          if (e1 != e2) continue;
          if (shared >= 0 && shared != e1)
            throw BadSite("lune_add: faces share more than one edge");
          shared = e1;
          ya = fca[size_t(s1)];
          za = fca[size_t(s2)];
          yb = fcb[size_t(u1)];
          zb = fcb[size_t(u2)];
        }
    }
  if (shared < 0) throw BadSite("lune_add: faces share no edge");
  if (tri.in_link(shared)) throw LinkObstruction("lune_add: shared edge lies on the link");
  // orient: align (yb,zb) with (ya,za) by vertex class
  if (tri.vertex_class(tb, yb) != tri.vertex_class(ta, ya)) std::swap(yb, zb);
  if (tri.vertex_class(tb, yb) != tri.vertex_class(ta, ya) ||
      tri.vertex_class(tb, zb) != tri.vertex_class(ta, za))
    throw BadSite("lune_add: shared edge endpoints do not match");
  int wa = -1, xb = -1;
  for (int s = 0; s < 3; ++s) {
    if (fca[size_t(s)] != ya && fca[size_t(s)] != za) wa = fca[size_t(s)];
    if (fcb[size_t(s)] != yb && fcb[size_t(s)] != zb) xb = fcb[size_t(s)];
  }
  if (tri.vertex_class(ta, wa) == tri.vertex_class(tb, xb))
    throw BadSite("lune_add: opposite corners coincide");

  // find which slot of face B bounds the region seen from (ta, fa)
  std::pair<int, int> sB{-1, -1};
  for (auto s : edge_face_walk(tri, {ta, fa}, ya, za)) {
    if ((s.first == tb && s.second == fb)) {
      sB = s;
      break;
    }
    auto p = tri.partner(tb, fb);
    if (s == p) {
      sB = s;
      break;
    }
  }
  if (sB.first < 0) throw BadSite("lune_add: faces do not share the edge cycle");
  // name the four slots: pillow P1 joins (ta,fa) and sB; P2 joins the partners
  auto sA2 = tri.partner(ta, fa);
  std::pair<int, int> sB2 = tri.partner(sB.first, sB.second);
  // express the B-side data on the slot sB
  int tsb = sB.first, fsb = sB.second;
  int ysb, zsb, xsb = -1;
  {
    auto fcs = detail::face_corners_sorted(fsb);
    ysb = zsb = -1;
    for (int s = 0; s < 3; ++s) {
      int c = fcs[size_t(s)];
      if (tri.vertex_class(tsb, c) == tri.vertex_class(ta, ya) && ysb < 0)
        ysb = c;
      else if (tri.vertex_class(tsb, c) == tri.vertex_class(ta, za) && zsb < 0)
        zsb = c;
      else
        xsb = c;
    }
    if (ysb < 0 || zsb < 0 || xsb < 0) throw BadSite("lune_add: B-side corners not matched");
  }

  // pillow corner orders from the glued faces' own cycles
  auto cycle_from = [&](int f, int start) {
    std::array<int, 3> c{kFaceCycle[f][0], kFaceCycle[f][1], kFaceCycle[f][2]};
    while (c[0] != start) std::rotate(c.begin(), c.begin() + 1, c.end());
    return c;
  };
  auto cyca = cycle_from(fa, wa);   // (wa, P, Q)
  auto cycb = cycle_from(fsb, xsb); // (xsb, P', Q')
  // P1 = (0: w, 1: x, 2: alpha, 3: beta) with alpha = cyca[1], beta = cyca[2]
  int alpha_a = cyca[1], beta_a = cyca[2];
  auto corner_b = [&](int corner_a) {
    return tri.vertex_class(ta, corner_a) == tri.vertex_class(tsb, ysb) ? ysb : zsb;
  };
  int alpha_b = corner_b(alpha_a), beta_b = corner_b(beta_a);
  // the two sheets bound a common region, so their cycles traverse the shared
  // edge in opposite directions
  if (cycb[1] != beta_b || cycb[2] != alpha_b)
    throw BadSite("lune_add: face sides are not coherently oriented");

  // P2 on the partner slots
  auto [ta2, fa2] = sA2;
  auto [tb2, fb2] = sB2;
  const auto& ga = tri.corner_bijection(ta, fa);
  const auto& gb = tri.corner_bijection(tsb, fsb);
  int wa2 = ga[size_t(wa)], alpha_a2 = ga[size_t(alpha_a)], beta_a2 = ga[size_t(beta_a)];
  int xb2 = gb[size_t(xsb)], alpha_b2 = gb[size_t(alpha_b)], beta_b2 = gb[size_t(beta_b)];

  const auto& old_d = tri.data();
  TriangulationData d;
  d.n_tets = old_d.n_tets + 2;
  int i1 = old_d.n_tets, i2 = old_d.n_tets + 1;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  for (int s = 0; s < old_d.n_tets; ++s)
    for (int cidx = 0; cidx < 4; ++cidx) prov[size_t(s)][size_t(cidx)] = {s, cidx};
  // P2 carries the mirrored chirality: its alpha/beta corners are swapped so
  // that its outer gluings reverse the partner-side cycles
  prov[size_t(i1)] = {std::pair<int, int>{ta, wa}, {tsb, xsb}, {ta, alpha_a}, {ta, beta_a}};
  prov[size_t(i2)] = {std::pair<int, int>{ta2, wa2}, {tb2, xb2}, {ta2, beta_a2},
                      {ta2, alpha_a2}};

  for (const auto& gr : old_d.gluings) {
    bool is_a = (gr.tet == ta && gr.face == fa) || (gr.to_tet == ta && gr.to_face == fa);
    bool is_b = (gr.tet == tsb && gr.face == fsb) || (gr.to_tet == tsb && gr.to_face == fsb);
    if (is_a || is_b) continue;
    d.gluings.push_back(gr);
  }
  auto push = [&](int t1_, int f1_, int t2_, int f2_, std::array<int, 4> corner_of) {
    GluingRec r;
    r.tet = t1_;
    r.face = f1_;
    r.to_tet = t2_;
    r.to_face = f2_;
    auto src = detail::face_corners_sorted(f1_);
    for (int s = 0; s < 3; ++s) r.corner_map[size_t(s)] = corner_of[size_t(src[size_t(s)])];
    d.gluings.push_back(r);
  };
  // P1 face1 (w, alpha, beta) <-> (ta, fa); P1 face0 (x, alpha, beta) <-> sB
  push(i1, 1, ta, fa, {wa, -1, alpha_a, beta_a});
  push(i1, 0, tsb, fsb, {-1, xsb, alpha_b, beta_b});
  // P2 holds beta at slot 2 and alpha at slot 3
  push(i2, 1, ta2, fa2, {wa2, -1, beta_a2, alpha_a2});
  push(i2, 0, tb2, fb2, {-1, xb2, beta_b2, alpha_b2});
  // internal pillow faces: alpha-corners and beta-corners matched
  push(i1, 2, i2, 3, {0, 1, -1, 2});
  push(i1, 3, i2, 2, {0, 1, 3, -1});

  HTriangulation nt(d);
  std::map<std::array<int, 3>, cplx> ev;
  // new edge (w, x): forced through alpha
  cplx forced = col.value(tri, ta, wa, alpha_a) + col.value(tri, tsb, corner_b(alpha_a), xsb);
  ev[{i1, 0, 1}] = grade_rep(forced);
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, ev);
  d.link = detail::transport_link(tri, nt, prov, {}, {});
  MoveResult out{std::move(d), std::move(ncol), true, {i1, 0, 1}, -1};
  out.admissible = !in_X(forced);
  return out;
}

inline MoveResult lune_remove(const HTriangulation& tri, const GColoring& col, int t0, int wa,
                              int xa) {
  auto [ecls, es] = tri.edge_class(t0, wa, xa);
  (void)es;
  if (tri.in_link(ecls)) throw LinkObstruction("lune_remove: disappearing edge is on the link");
  int o = tri.oriented_class(t0, wa, xa);
  auto members = tri.oclass_members(o);
  std::set<int> tets;
  for (auto& m : members) tets.insert(m[0]);
  if (members.size() != 2 || tets.size() != 2)
    throw BadSite("lune_remove: edge star is not a pillow");
  auto m1 = members[0], m2 = members[1];
  int p1 = m1[0], p2 = m2[0];
  // the two faces of p1 containing the edge must both glue to p2
  std::array<int, 2> inner{-1, -1};
  int q = 0;
  for (int ff = 0; ff < 4; ++ff)
    if (ff != m1[1] && ff != m1[2]) inner[size_t(q++)] = ff;
  std::array<int, 4> corr{-1, -1, -1, -1};
  for (int s = 0; s < 2; ++s) {
    int ff = inner[size_t(s)];
    auto [pt, pf] = tri.partner(p1, ff);
    (void)pf;
    if (pt != p2) throw BadSite("lune_remove: pillow face leaves the pillow");
    const auto& m = tri.corner_bijection(p1, ff);
    for (int cc = 0; cc < 4; ++cc) {
      if (cc == ff) continue;
      if (corr[size_t(cc)] >= 0 && corr[size_t(cc)] != m[size_t(cc)])
        throw BadSite("lune_remove: inconsistent pillow identification");
      corr[size_t(cc)] = m[size_t(cc)];
    }
  }
  // outer faces of p1: opposite the edge corners
  auto [o1t, o1f] = tri.partner(p1, m1[1]);
  auto [o2t, o2f] = tri.partner(p1, m1[2]);
  auto [q1t, q1f] = tri.partner(p2, corr[size_t(m1[1])]);
  auto [q2t, q2f] = tri.partner(p2, corr[size_t(m1[2])]);
  for (int tcheck : {o1t, o2t, q1t, q2t})
    if (tcheck == p1 || tcheck == p2)
      throw BadSite("lune_remove: pillow is not embedded in an ambient complex");

  const auto& old_d = tri.data();
  std::vector<int> tet_new(size_t(old_d.n_tets), -1);
  int nn = 0;
  for (int t = 0; t < old_d.n_tets; ++t)
    if (t != p1 && t != p2) tet_new[size_t(t)] = nn++;
  TriangulationData d;
  d.n_tets = nn;
  detail::Prov prov(size_t(d.n_tets),
                    {std::pair<int, int>{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}});
  for (int t = 0; t < old_d.n_tets; ++t)
    if (tet_new[size_t(t)] >= 0)
      for (int cidx = 0; cidx < 4; ++cidx)
        prov[size_t(tet_new[size_t(t)])][size_t(cidx)] = {t, cidx};
  std::set<std::pair<int, int>> drop;
  for (int ff = 0; ff < 4; ++ff) {
    drop.insert({p1, ff});
    drop.insert({p2, ff});
  }
  detail::SlotRemap remap;
  TriangulationData tmp;
  detail::rewrite_gluings(old_d, tet_new, remap, drop, tmp);
  d.gluings = tmp.gluings;
  auto compose = [&](int face_p1, int ot, int of, int qt, int qf) {
    const auto& ma = tri.corner_bijection(p1, face_p1);        // p1 -> ot
    const auto& mb = tri.corner_bijection(p2, corr[size_t(face_p1)]);  // p2 -> qt
    GluingRec r;
    r.tet = tet_new[size_t(ot)];
    r.face = of;
    r.to_tet = tet_new[size_t(qt)];
    r.to_face = qf;
    std::array<int, 4> mainv{-1, -1, -1, -1};
    for (int cc = 0; cc < 4; ++cc)
      if (cc != face_p1 && ma[size_t(cc)] >= 0) mainv[size_t(ma[size_t(cc)])] = cc;
    auto src = detail::face_corners_sorted(of);
    for (int s = 0; s < 3; ++s) {
      int in_p1 = mainv[size_t(src[size_t(s)])];
      r.corner_map[size_t(s)] = mb[size_t(corr[size_t(in_p1)])];
    }
    d.gluings.push_back(r);
  };
  compose(m1[1], o1t, o1f, q1t, q1f);
  compose(m1[2], o2t, o2f, q2t, q2f);

  HTriangulation nt(d);
  GColoring ncol = detail::transport_coloring(tri, col, nt, prov, {});
  d.link = detail::transport_link(tri, nt, prov, {ecls}, {});
  return MoveResult{std::move(d), std::move(ncol), true, {-1, -1, -1}, -1};
}

}  // namespace tetratv
