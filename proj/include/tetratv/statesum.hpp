#pragma once

// The state sum over admissible colorings: states assign an element of
// I^{grade(e)} to every edge, each tetrahedron contributes its 6j-symbol in
// the orientation convention below, and glued faces are contracted through
// the theta pairing with rotation scalars reconciling the two cyclic reads.

#include <chrono>
#include <thread>

#include "tetratv/diagram.hpp"
#include "tetratv/simplicial.hpp"

namespace tetratv {

struct Overflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TVOptions {
  long max_states = 10'000'000;
  int threads = 0;  // 0 = TETRATV_THREADS or hardware
};

struct TVResult {
  cplx value{};
  long states = 0;     // enumerated
  long surviving = 0;  // states past pruning
  double seconds = 0.0;
};

namespace detail {

// Per-face read cycle of the tetrahedron colors, as tuples of local corners
// (u, v, w) with triple = (phi(v->u), phi(w->v), phi(u->w)). Indexed by the
// face (= opposite corner).
inline constexpr int kReadCycle[4][3] = {{1, 3, 2}, {0, 2, 3}, {0, 3, 1}, {0, 1, 2}};

struct FacePlan {
  // canonical triple entries: oriented edge refs (edge class, +1 = canonical
  // orientation, -1 = reversed)
  std::array<std::pair<int, int>, 3> entries;
  int rot1 = 0, rot2 = 0;  // rotation offsets of the two reads
};

struct TetPlan {
  std::array<std::pair<int, int>, 6> entries;  // (edge class, sign) for i..n
};

}  // namespace detail

// Colors (i,j,k,l,m,n) of one tetrahedron under a state, following the
// orientation convention i = phi(v2 -> v1), j = phi(v3 -> v2), k = phi(v3 ->
// v1), l = phi(v4 -> v3), m = phi(v4 -> v1), n = phi(v4 -> v2).
inline std::array<std::pair<int, int>, 6> tet_edge_refs(const HTriangulation& tri, int t) {
  auto ref = [&](int from, int to) { return tri.edge_class(t, from, to); };
  return {ref(1, 0), ref(2, 1), ref(2, 0), ref(3, 2), ref(3, 0), ref(3, 1)};
}

inline std::array<cplx, 6> tet_colors(Engine& eng, const HTriangulation& tri, int t,
                                      const std::vector<cplx>& state) {
  std::array<cplx, 6> out;
  auto refs = tet_edge_refs(tri, t);
  for (int s = 0; s < 6; ++s) {
    auto [e, sign] = refs[size_t(s)];
    cplx c = state[size_t(e)];
    out[size_t(s)] = sign > 0 ? c : eng.star(c);
  }
  return out;
}

class StateSum {
 public:
  StateSum(Engine& eng, const HTriangulation& tri, const GColoring& col)
      : eng_(eng), tri_(tri), col_(col) {
    if (eng.flavor() != Flavor::truncated)
      throw std::invalid_argument("state sum requires a truncated-flavor engine");
    if (!col.is_admissible(tri)) throw NotAdmissible("state sum: coloring is not admissible");
    const RootData& rd = eng.root();
    for (int e = 0; e < tri.n_edges(); ++e) {
      cplx g = col.value_oclass(tri.canonical_oclass(e));
      index_sets_.push_back(index_set(rd, g));
    }
    for (int t = 0; t < tri.n_tets(); ++t) tets_.push_back({tet_edge_refs(tri, t)});
    for (const auto& g : tri.data().gluings) {
      bool side1_first = std::make_pair(g.tet, g.face) < std::make_pair(g.to_tet, g.to_face);
      int t1 = side1_first ? g.tet : g.to_tet, f1 = side1_first ? g.face : g.to_face;
      auto [t2, f2] = tri.partner(t1, f1);
      const auto& bij = tri.corner_bijection(t1, f1);
      std::array<int, 3> cyc1{detail::kReadCycle[f1][0], detail::kReadCycle[f1][1],
                              detail::kReadCycle[f1][2]};
      int u0 = std::min({cyc1[0], cyc1[1], cyc1[2]});
      int rot1 = 0;
      while (cyc1[0] != u0) {
        std::rotate(cyc1.begin(), cyc1.begin() + 1, cyc1.end());
        ++rot1;
      }
      std::array<int, 3> cyc2{detail::kReadCycle[f2][0], detail::kReadCycle[f2][1],
                              detail::kReadCycle[f2][2]};
      int u0p = bij[size_t(u0)];
      int rot2 = 0;
      while (cyc2[0] != u0p) {
        std::rotate(cyc2.begin(), cyc2.begin() + 1, cyc2.end());
        ++rot2;
      }
      if (cyc2[1] != bij[size_t(cyc1[2])] || cyc2[2] != bij[size_t(cyc1[1])])
        throw NotOrientable("state sum: face reads are not mutually reversed");
      detail::FacePlan fp;
      fp.rot1 = rot1;
      fp.rot2 = rot2;
      // triple(u,v,w) = (phi(v->u), phi(w->v), phi(u->w))
      fp.entries = {tri.edge_class(t1, cyc1[1], cyc1[0]), tri.edge_class(t1, cyc1[2], cyc1[1]),
                    tri.edge_class(t1, cyc1[0], cyc1[2])};
      faces_.push_back(fp);
    }
  }

  long n_states() const {
    long total = 1;
    for (const auto& is : index_sets_) {
      if (total > (1L << 60) / long(is.size())) return -1;
      total *= long(is.size());
    }
    return total;
  }

  TVResult run(const TVOptions& opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    long total = n_states();
    if (total < 0 || total > opt.max_states)
      throw Overflow("state sum: state count exceeds max_states");
    int threads = opt.threads;
    if (threads <= 0) {
      if (const char* env = std::getenv("TETRATV_THREADS")) threads = std::atoi(env);
      if (threads <= 0) threads = int(std::thread::hardware_concurrency());
      if (threads <= 0) threads = 1;
    }
    threads = int(std::min<long>(threads, std::max<long>(total / 64, 1)));
    long chunk = (total + threads - 1) / threads;
    std::vector<cplx> sums(size_t(threads), 0.0);
    std::vector<long> alive(size_t(threads), 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        long lo = w * chunk, hi = std::min(total, (w + 1) * chunk);
        cplx acc = 0.0;
        long live = 0;
        for (long s = lo; s < hi; ++s) {
          cplx term = evaluate_state(s);
          if (term != cplx(0.0)) {
            acc += term;
            ++live;
          }
        }
        sums[size_t(w)] = acc;
        alive[size_t(w)] = live;
      });
    for (auto& th : pool) th.join();
    TVResult res;
    for (int w = 0; w < threads; ++w) {
      res.value += sums[size_t(w)];
      res.surviving += alive[size_t(w)];
    }
    res.states = total;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  // Term of one state (0 when pruned); exposed for the pruning soundness test.
  cplx evaluate_state(long index) {
    std::vector<cplx> state(size_t(tri_.n_edges()));
    long rem = index;
    for (int e = 0; e < tri_.n_edges(); ++e) {
      const auto& is = index_sets_[size_t(e)];
      state[size_t(e)] = is[size_t(rem % long(is.size()))];
      rem /= long(is.size());
    }
    return evaluate_state(state);
  }

  cplx evaluate_state(const std::vector<cplx>& state) {
    const RootData& rd = eng_.root();
    // prune on face admissibility
    for (const auto& fp : faces_) {
      cplx sum = 0.0;
      for (auto [e, sign] : fp.entries)
        sum += sign > 0 ? state[size_t(e)] : eng_.star(state[size_t(e)]);
      if (!is_integral(canonical_rep(rd, sum)) ||
          (std::lround(canonical_rep(rd, sum).real()) % 2 + 2) % 2 != 0)
        return 0.0;
    }
    cplx term = 1.0;
    for (int e = 0; e < tri_.n_edges(); ++e) {
      if (tri_.in_link(e))
        term *= b_weight(rd, state[size_t(e)]);
      else
        term *= eng_.dim_d(state[size_t(e)]);
    }
    for (int t = 0; t < tri_.n_tets(); ++t) {
      std::array<cplx, 6> tup;
      for (int s = 0; s < 6; ++s) {
        auto [e, sign] = tets_[size_t(t)].entries[size_t(s)];
        tup[size_t(s)] = sign > 0 ? state[size_t(e)] : eng_.star(state[size_t(e)]);
      }
      cplx n6j = eng_.sixj(tup);
      if (n6j == cplx(0.0)) return 0.0;
      term *= n6j;
    }
    for (const auto& fp : faces_) {
      std::array<cplx, 3> tr;
      for (int s = 0; s < 3; ++s) {
        auto [e, sign] = fp.entries[size_t(s)];
        tr[size_t(s)] = sign > 0 ? state[size_t(e)] : eng_.star(state[size_t(e)]);
      }
      term *= rotation_factor(tr, fp.rot1);
      std::array<cplx, 3> dual{eng_.star(tr[2]), eng_.star(tr[1]), eng_.star(tr[0])};
      term *= rotation_factor(dual, fp.rot2);
      term /= eng_.theta(tr);
    }
    return term;
  }

 private:
  // Conversion factor for a slot whose stored read is the canonical triple
  // rotated right by `rot` steps.
  cplx rotation_factor(const std::array<cplx, 3>& t, int rot) {
    if (rot == 0) return 1.0;
    if (rot == 2) return eng_.sigma_scalar(t);
    return eng_.sigma_scalar(t) * eng_.sigma_scalar({t[1], t[2], t[0]});
  }

  Engine& eng_;
  const HTriangulation& tri_;
  const GColoring& col_;
  std::vector<std::vector<cplx>> index_sets_;
  std::vector<detail::TetPlan> tets_;
  std::vector<detail::FacePlan> faces_;
};

inline TVResult tv(Engine& eng, const HTriangulation& tri, const GColoring& col,
                   const TVOptions& opt = {}) {
  StateSum ss(eng, tri, col);
  return ss.run(opt);
}

}  // namespace tetratv
