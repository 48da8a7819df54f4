#pragma once

// Planar diagram evaluation: invariant (multiplicity) spaces with canonical
// basis vectors, cyclic rotation scalars, slice-program evaluation for the
// theta and tetrahedron graphs, and the memoizing engine shared by all
// higher-level computations.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tetratv/programs.hpp"
#include "tetratv/repcat.hpp"

namespace tetratv {

struct DimZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimAmbiguous : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotScalar : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoTypicalColor : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TypeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Slice programs

struct SliceProgram {
  struct ColorRef {
    int slot = -1;
    bool star = false;
  };
  struct Coupon {
    std::string name;
    std::array<ColorRef, 3> legs;
  };
  struct Block {
    enum class Kind { id, coupon, w, b, bp, d, dp } kind = Kind::id;
    ColorRef color;    // for w/b/bp/d/dp
    int coupon = -1;   // for coupon blocks
  };
  std::string graph;
  std::vector<std::string> slots;
  std::vector<Coupon> coupons;
  ColorRef cut;
  std::vector<ColorRef> bottom;  // defaults to {cut}
  std::vector<std::vector<Block>> layers;
};

inline SliceProgram parse_program(const std::string& text) {
  SliceProgram p;
  std::istringstream in(text);
  std::string line;
  auto parse_ref = [&](const std::string& tok) {
    SliceProgram::ColorRef r;
    std::string name = tok;
    if (!name.empty() && name.back() == '*') {
      r.star = true;
      name.pop_back();
    }
    for (size_t s = 0; s < p.slots.size(); ++s)
      if (p.slots[s] == name) r.slot = int(s);
    if (r.slot < 0) throw TypeMismatch("slice program: unknown color '" + tok + "'");
    return r;
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word) || word[0] == '#') continue;
    if (word == "graph") {
      ls >> p.graph;
    } else if (word == "slots") {
      std::string s;
      while (ls >> s) p.slots.push_back(s);
    } else if (word == "coupon") {
      SliceProgram::Coupon c;
      std::string a, b, d;
      ls >> c.name >> a >> b >> d;
      c.legs = {parse_ref(a), parse_ref(b), parse_ref(d)};
      p.coupons.push_back(c);
    } else if (word == "cut") {
      std::string s;
      ls >> s;
      p.cut = parse_ref(s);
      if (p.bottom.empty()) p.bottom = {p.cut};
    } else if (word == "bottom") {
      p.bottom.clear();
      std::string s;
      while (ls >> s) p.bottom.push_back(parse_ref(s));
    } else if (word == "layer") {
      std::vector<SliceProgram::Block> layer;
      std::string tok;
      while (ls >> tok) {
        SliceProgram::Block b;
        if (tok == "id") {
          b.kind = SliceProgram::Block::Kind::id;
        } else if (tok.rfind("w:", 0) == 0) {
          b.kind = SliceProgram::Block::Kind::w;
          b.color = parse_ref(tok.substr(2));
        } else if (tok.rfind("bp:", 0) == 0) {
          b.kind = SliceProgram::Block::Kind::bp;
          b.color = parse_ref(tok.substr(3));
        } else if (tok.rfind("b:", 0) == 0) {
          b.kind = SliceProgram::Block::Kind::b;
          b.color = parse_ref(tok.substr(2));
        } else if (tok.rfind("dp:", 0) == 0) {
          b.kind = SliceProgram::Block::Kind::dp;
          b.color = parse_ref(tok.substr(3));
        } else if (tok.rfind("d:", 0) == 0) {
          b.kind = SliceProgram::Block::Kind::d;
          b.color = parse_ref(tok.substr(2));
        } else {
          b.kind = SliceProgram::Block::Kind::coupon;
          for (size_t c = 0; c < p.coupons.size(); ++c)
            if (p.coupons[c].name == tok) b.coupon = int(c);
          if (b.coupon < 0) throw TypeMismatch("slice program: unknown block '" + tok + "'");
        }
        layer.push_back(b);
      }
      if (!layer.empty()) p.layers.push_back(std::move(layer));
    } else {
      throw TypeMismatch("slice program: unknown directive '" + word + "'");
    }
  }
  if (p.slots.empty() || p.layers.empty())
    throw TypeMismatch("slice program: missing slots or layers");
  return p;
}

// ---------------------------------------------------------------------------
// Invariant spaces

struct InvSpace {
  int dim = 0;
  Mat basis;      // columns span the invariant subspace
  Vec canonical;  // set when dim == 1
};

// ---------------------------------------------------------------------------
// Engine: one root datum + one flavor, with memoized modules, pivotal
// isomorphisms, invariant spaces, rotation scalars, theta pairings and
// 6j-symbols. The caches tolerate concurrent use; racing recomputations are
// benign because every cached value is a pure function of its key.

class Engine {
 public:
  Engine(RootData rd, Flavor fl) : rd_(rd), fl_(fl) {
    for (int c = 0; c < 3; ++c) theta_prog_[c] = parse_program(programs::theta_cuts[c]);
    for (int c = 0; c < 6; ++c) tetra_prog_[c] = parse_program(programs::tetra_cuts[c]);
  }

  const RootData& root() const { return rd_; }
  Flavor flavor() const { return fl_; }

  cplx normalize(cplx c) const {
    return fl_ == Flavor::truncated ? canonical_rep(rd_, c) : c;
  }
  cplx star(cplx c) const {
    return fl_ == Flavor::truncated ? class_involution(rd_, c) : involution(c);
  }
  bool is_typical(cplx c) const {
    return fl_ == Flavor::truncated ? typical_class(rd_, c) : typical(rd_, c);
  }
  cplx dim_d(cplx c) const { return mod_dim(rd_, normalize(c)); }

  const WeightModule& module(cplx c) {
    cplx cc = normalize(c);
    std::lock_guard<std::mutex> g(mu_);
    auto it = modules_.find(ColorKey(cc));
    if (it == modules_.end())
      it = modules_.emplace(ColorKey(cc), typical_module(rd_, cc, fl_)).first;
    return it->second;
  }

  const Mat& w_mat(cplx c) {
    cplx cc = normalize(c);
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = wmats_.find(ColorKey(cc));
      if (it != wmats_.end()) return it->second;
    }
    Mat w = pivotal_w(rd_, cc, fl_);
    std::lock_guard<std::mutex> g(mu_);
    return wmats_.emplace(ColorKey(cc), std::move(w)).first->second;
  }

  using TripleKey = std::array<ColorKey, 3>;
  TripleKey triple_key(std::array<cplx, 3> t) const {
    return {ColorKey(normalize(t[0])), ColorKey(normalize(t[1])), ColorKey(normalize(t[2]))};
  }

  const InvSpace& inv_space(std::array<cplx, 3> t) {
    TripleKey key = triple_key(t);
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = spaces_.find(key);
      if (it != spaces_.end()) return it->second;
    }
    InvSpace sp = compute_inv_space(t);
    std::lock_guard<std::mutex> g(mu_);
    return spaces_.emplace(key, std::move(sp)).first->second;
  }

  int inv_dim(std::array<cplx, 3> t) { return inv_space(t).dim; }

  // Canonical vector of a one-dimensional invariant space; normalized so the
  // first coordinate above 1e-6 of the max modulus equals 1 exactly.
  Vec canonical_vector(std::array<cplx, 3> t) {
    const InvSpace& sp = inv_space(t);
    if (sp.dim == 0) throw DimZero("canonical_vector: invariant space is zero");
    if (sp.dim > 1) throw DimAmbiguous("canonical_vector: invariant space has dim > 1");
    Vec v = sp.canonical;
    std::lock_guard<std::mutex> g(mu_);
    auto it = gauge_.find(triple_key(t));
    if (it != gauge_.end()) v *= it->second;
    return v;
  }

  // Test hook: rescale the canonical vector of one triple. All acceptance
  // quantities must be invariant under this.
  void set_gauge(std::array<cplx, 3> t, cplx mult) {
    std::lock_guard<std::mutex> g(mu_);
    gauge_[triple_key(t)] = mult;
    sigmas_.clear();
    thetas_.clear();
    sixjs_.clear();
  }
  void clear_gauge() {
    std::lock_guard<std::mutex> g(mu_);
    gauge_.clear();
    sigmas_.clear();
    thetas_.clear();
    sixjs_.clear();
  }

  // Rotation scalar s with sigma(a,b,c)(x(a,b,c)) = s * x(b,c,a).
  cplx sigma_scalar(std::array<cplx, 3> t) {
    TripleKey key = triple_key(t);
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = sigmas_.find(key);
      if (it != sigmas_.end()) return it->second;
    }
    cplx s = compute_sigma(t);
    std::lock_guard<std::mutex> g(mu_);
    sigmas_.emplace(key, s);
    return s;
  }

  // Rotation image sigma(a,b,c)(x) in H^{bca}, for an arbitrary x in H^{abc}.
  Vec sigma_apply(std::array<cplx, 3> t, const Vec& x) {
    const int r = rd_.r;
    Vec kup = k_power_diag(rd_, module(t[0]), rd_.r - 1);
    Vec out(r * r * r);
    for (int q = 0; q < r; ++q)
      for (int w = 0; w < r; ++w)
        for (int tt = 0; tt < r; ++tt)
          out((q * r + w) * r + tt) = kup(tt) * x((tt * r + q) * r + w);
    return out;
  }

  // Theta pairing of arbitrary vectors x in H^{abc}, y in H^{c*b*a*},
  // evaluated from the cut presentation at edge `cut` (0,1,2 for a,b,c;
  // -1 = first typical edge).
  cplx theta_pairing(std::array<cplx, 3> t, const Vec& x, const Vec& y, int cut = -1) {
    if (cut < 0) cut = first_typical(std::vector<cplx>(t.begin(), t.end()));
    std::array<cplx, 6> binding{t[0], t[1], t[2], 0, 0, 0};
    cplx lam = eval_scalar(theta_prog_[cut], binding, {x, y});
    return dim_d(t[size_t(cut)]) * lam;
  }

  // Canonical theta scalar theta(a,b,c) = (x(a,b,c), x(c*,b*,a*)).
  cplx theta(std::array<cplx, 3> t) {
    TripleKey key = triple_key(t);
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = thetas_.find(key);
      if (it != thetas_.end()) return it->second;
    }
    Vec x = canonical_vector(t);
    Vec y = canonical_vector({star(t[2]), star(t[1]), star(t[0])});
    cplx v = theta_pairing(t, x, y);
    std::lock_guard<std::mutex> g(mu_);
    thetas_.emplace(key, v);
    return v;
  }

  static std::array<std::array<cplx, 3>, 4> tetra_triples(Engine& e, const std::array<cplx, 6>& t) {
    const cplx i = t[0], j = t[1], k = t[2], l = t[3], m = t[4], n = t[5];
    return {std::array<cplx, 3>{i, j, e.star(k)}, {k, l, e.star(m)},
            {n, e.star(l), e.star(j)}, {m, e.star(n), e.star(i)}};
  }

  // Modified 6j-symbol of (i,j,k,l,m,n) against the canonical coupon bases.
  // Zero whenever one of the four triple spaces vanishes.
  cplx sixj(std::array<cplx, 6> t) {
    std::array<ColorKey, 6> key;
    for (int s = 0; s < 6; ++s) key[size_t(s)] = ColorKey(normalize(t[size_t(s)]));
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = sixjs_.find(key);
      if (it != sixjs_.end()) return it->second;
    }
    cplx v = sixj_cut(t, -1);
    std::lock_guard<std::mutex> g(mu_);
    sixjs_.emplace(key, v);
    return v;
  }

  // Same, with an explicit cut edge (0..5 for i,j,k,l,m,n); uncached.
  cplx sixj_cut(std::array<cplx, 6> t, int cut) {
    auto triples = tetra_triples(*this, t);
    for (const auto& tr : triples)
      if (inv_dim(tr) == 0) return 0.0;
    std::vector<Vec> coupons;
    for (const auto& tr : triples) coupons.push_back(canonical_vector(tr));
    return eval_tetra_graph(t, coupons, cut);
  }

  // d-weighted cut evaluation of the tetrahedral graph on explicit coupons
  // x1..x4 in H(i,j,k*), H(k,l,m*), H(n,l*,j*), H(m,n*,i*).
  cplx eval_tetra_graph(const std::array<cplx, 6>& t, const std::vector<Vec>& coupons, int cut) {
    if (cut < 0) cut = first_typical(std::vector<cplx>(t.begin(), t.end()));
    cplx lam = eval_scalar(tetra_prog_[cut], t, coupons);
    return dim_d(t[size_t(cut)]) * lam;
  }

  // Evaluate an arbitrary open slice program; returns the matrix from the
  // bottom object to the top object (all strands r-dimensional). `peak`, when
  // given, receives the largest intermediate state magnitude, which bounds
  // the roundoff scale of the result.
  Mat eval_open(const SliceProgram& p, const std::array<cplx, 6>& binding,
                const std::vector<Vec>& coupons, double* peak = nullptr) {
    std::vector<Strand> bottom;
    for (auto ref : p.bottom) bottom.push_back({resolve(p, binding, ref), false});
    long dim_in = 1;
    for (size_t s = 0; s < bottom.size(); ++s) dim_in *= rd_.r;
    Mat result;
    double pk = 0.0;
    for (long a = 0; a < dim_in; ++a) {
      Vec state = Vec::Zero(dim_in);
      state(a) = 1.0;
      std::vector<Strand> strands = bottom;
      pk = std::max(pk, run_layers(p, binding, coupons, strands, state));
      if (a == 0) result = Mat::Zero(state.size(), dim_in);
      result.col(a) = state;
    }
    if (peak) *peak = pk;
    return result;
  }

  // Scalar of a (1,1) cut program: the evaluation must be a multiple of the
  // identity on the cut strand, up to roundoff at the scale of the largest
  // intermediate.
  cplx eval_scalar(const SliceProgram& p, const std::array<cplx, 6>& binding,
                   const std::vector<Vec>& coupons) {
    double peak = 0.0;
    Mat m = eval_open(p, binding, coupons, &peak);
    if (m.rows() != m.cols())
      throw NotScalar("eval_scalar: program is not an endomorphism");
    double amax = m.cwiseAbs().maxCoeff();
    double noise = 1e-10 * std::max(1.0, peak);
    if (amax <= noise) return 0.0;
    cplx lam = m.trace() / double(m.rows());
    Mat dev = m - lam * Mat::Identity(m.rows(), m.cols());
    if (dev.cwiseAbs().maxCoeff() > 1e-7 * amax + noise)
      throw NotScalar("eval_scalar: cut evaluation is not a multiple of the identity");
    return lam;
  }

  int first_typical(const std::vector<cplx>& colors) const {
    for (size_t e = 0; e < colors.size(); ++e)
      if (is_typical(colors[e])) return int(e);
    throw NoTypicalColor("no typical color in tuple");
  }

  const SliceProgram& theta_program(int cut) const { return theta_prog_[cut]; }
  const SliceProgram& tetra_program(int cut) const { return tetra_prog_[cut]; }

 private:
  struct Strand {
    cplx color;
    bool dual;
  };

  cplx resolve(const SliceProgram& p, const std::array<cplx, 6>& binding,
               SliceProgram::ColorRef ref) const {
    cplx c = binding[size_t(ref.slot)];
    return normalize(ref.star ? star(c) : c);
  }

  static bool same_color(cplx a, cplx b) { return ColorKey(a) == ColorKey(b); }

  double run_layers(const SliceProgram& p, const std::array<cplx, 6>& binding,
                    const std::vector<Vec>& coupons, std::vector<Strand>& strands, Vec& state) {
    const int r = rd_.r;
    double peak = 1.0;
    for (const auto& layer : p.layers) {
      size_t pos = 0;
      for (const auto& blk : layer) {
        using K = SliceProgram::Block::Kind;
        if (blk.kind == K::id) {
          if (pos >= strands.size()) throw TypeMismatch(p.graph + ": id beyond last strand");
          ++pos;
          continue;
        }
        std::vector<Strand> in, out;
        Mat b;
        switch (blk.kind) {
          case K::coupon: {
            const auto& cp = p.coupons[size_t(blk.coupon)];
            for (auto leg : cp.legs) out.push_back({resolve(p, binding, leg), false});
            if (blk.coupon >= int(coupons.size()))
              throw TypeMismatch(p.graph + ": missing coupon tensor");
            b = coupons[size_t(blk.coupon)];
            break;
          }
          case K::w: {
            cplx c = resolve(p, binding, blk.color);
            in.push_back({c, false});
            out.push_back({star(c), true});
            b = w_mat(c);
            break;
          }
          case K::b: {
            cplx c = resolve(p, binding, blk.color);
            out.push_back({c, false});
            out.push_back({c, true});
            b = Mat(duality_morphisms(rd_, module(c)).b);
            break;
          }
          case K::bp: {
            cplx c = resolve(p, binding, blk.color);
            out.push_back({c, true});
            out.push_back({c, false});
            b = Mat(duality_morphisms(rd_, module(c)).bp);
            break;
          }
          case K::d: {
            cplx c = resolve(p, binding, blk.color);
            in.push_back({c, true});
            in.push_back({c, false});
            b = Mat(duality_morphisms(rd_, module(c)).d);
            break;
          }
          case K::dp: {
            cplx c = resolve(p, binding, blk.color);
            in.push_back({c, false});
            in.push_back({c, true});
            b = Mat(duality_morphisms(rd_, module(c)).dp);
            break;
          }
          default:
            throw TypeMismatch("unreachable");
        }
        if (pos + in.size() > strands.size())
          throw TypeMismatch(p.graph + ": block consumes past the last strand");
        for (size_t s = 0; s < in.size(); ++s) {
          const Strand& have = strands[pos + s];
          if (!same_color(have.color, in[s].color) || have.dual != in[s].dual)
            throw TypeMismatch(p.graph + ": strand color/orientation mismatch");
        }
        state = apply_at(state, int(pos), int(in.size()), int(out.size()), b);
        strands.erase(strands.begin() + long(pos), strands.begin() + long(pos + in.size()));
        strands.insert(strands.begin() + long(pos), out.begin(), out.end());
        pos += out.size();
      }
      if (pos != strands.size())
        throw TypeMismatch(p.graph + ": layer does not cover all strands");
      if (state.size() > 0) peak = std::max(peak, state.cwiseAbs().maxCoeff());
    }
    return peak;
  }

  Vec apply_at(const Vec& state, int pos, int n_in, int n_out, const Mat& b) const {
    const int r = rd_.r;
    long in_dim = 1, out_dim = 1, left = 1;
    for (int s = 0; s < n_in; ++s) in_dim *= r;
    for (int s = 0; s < n_out; ++s) out_dim *= r;
    for (int s = 0; s < pos; ++s) left *= r;
    long right = state.size() / (left * in_dim);
    if (b.rows() != out_dim || b.cols() != in_dim)
      throw TypeMismatch("apply_at: block shape mismatch");
    using RMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Vec out(left * out_dim * right);
    for (long l = 0; l < left; ++l) {
      Eigen::Map<const RMat> src(state.data() + l * in_dim * right, in_dim, right);
      Eigen::Map<RMat> dst(out.data() + l * out_dim * right, out_dim, right);
      dst = b * src;
    }
    return out;
  }

  InvSpace compute_inv_space(std::array<cplx, 3> t) {
    for (cplx c : t)
      if (!is_typical(c) && fl_ == Flavor::truncated)
        throw NotTypical("inv_space: integral truncated class");
    WeightModule a = typical_module(rd_, normalize(t[0]), fl_);
    WeightModule b = typical_module(rd_, normalize(t[1]), fl_);
    WeightModule c = typical_module(rd_, normalize(t[2]), fl_);
    WeightModule full = tensor(tensor(a, b), c);
    const long n = full.dim;
    int nrows = full.has_h() ? 4 : 3;
    Mat cond(nrows * n, n);
    cond.block(0, 0, n, n) = full.E;
    cond.block(n, 0, n, n) = full.F;
    cond.block(2 * n, 0, n, n) = full.K - Mat::Identity(n, n);
    if (full.has_h()) cond.block(3 * n, 0, n, n) = full.H;
    Eigen::BDCSVD<Mat> svd(cond, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    InvSpace sp;
    std::vector<long> null_cols;
    for (long s = 0; s < sv.size(); ++s)
      if (sv(s) <= 1e-8 * std::max(smax, 1.0)) null_cols.push_back(s);
    sp.dim = int(null_cols.size());
    sp.basis = Mat(n, sp.dim);
    for (size_t s = 0; s < null_cols.size(); ++s) sp.basis.col(long(s)) = svd.matrixV().col(null_cols[s]);
    if (sp.dim == 1) {
      Vec v = sp.basis.col(0);
      double amax = v.cwiseAbs().maxCoeff();
      long pivot = -1;
      for (long s = 0; s < v.size(); ++s)
        if (std::abs(v(s)) > 1e-6 * amax) {
          pivot = s;
          break;
        }
      sp.canonical = v / v(pivot);
    }
    return sp;
  }

  cplx compute_sigma(std::array<cplx, 3> t) {
    Vec x = canonical_vector(t);
    Vec rot = sigma_apply(t, x);
    Vec tgt = canonical_vector({t[1], t[2], t[0]});
    long pivot = 0;
    tgt.cwiseAbs().maxCoeff(&pivot);
    cplx s = rot(pivot) / tgt(pivot);
    if ((rot - s * tgt).cwiseAbs().maxCoeff() > 1e-7 * std::max(1.0, rot.cwiseAbs().maxCoeff()))
      throw NotScalar("sigma_scalar: rotation image is not proportional to the canonical vector");
    return s;
  }

  RootData rd_;
  Flavor fl_;
  std::array<SliceProgram, 3> theta_prog_;
  std::array<SliceProgram, 6> tetra_prog_;

  mutable std::mutex mu_;
  std::map<ColorKey, WeightModule> modules_;
  std::map<ColorKey, Mat> wmats_;
  std::map<TripleKey, InvSpace> spaces_;
  std::map<TripleKey, cplx> sigmas_;
  std::map<TripleKey, cplx> thetas_;
  std::map<TripleKey, cplx> gauge_;
  std::map<std::array<ColorKey, 6>, cplx> sixjs_;
};

}  // namespace tetratv
