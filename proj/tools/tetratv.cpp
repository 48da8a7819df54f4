// Command-line interface: 6j-symbol evaluation, named verification suites,
// state-sum runs with move scripts, and triangulation utilities. All reports
// go to stdout as JSON; human-readable summaries go to stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "tetratv/statesum.hpp"
#include "tetratv/verify.hpp"

using namespace tetratv;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

// Complex literals: "a", "ai", "a+bi", "a-bi", "i", "-i".
cplx parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw CliError(2, "empty color literal");
  auto num = [](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw CliError(2, "bad number '" + t + "'");
    return v;
  };
  try {
    if (s.back() == 'i' || s.back() == 'I') {
      std::string body = s.substr(0, s.size() - 1);
      for (size_t p = body.size(); p-- > 1;) {
        if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E')
          return {num(body.substr(0, p)), num(body.substr(p))};
      }
      return {0.0, num(body)};
    }
    return {num(s), 0.0};
  } catch (const std::invalid_argument&) {
    throw CliError(2, "bad color literal '" + s + "'");
  }
}

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw CliError(2, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CliError(2, std::string("ParseError: ") + e.what());
  }
}

struct Inputs {
  HTriangulation tri;
  GColoring col;
};

Inputs load_inputs(const std::string& tri_path, const std::string& coc_path) {
  HTriangulation tri(triangulation_from_json(load_json(tri_path)));
  GColoring col = coloring_from_json(tri, load_json(coc_path));
  return {std::move(tri), std::move(col)};
}

struct MoveState {
  TriangulationData data;
  GColoring coloring;
};

MoveState apply_scripted_move(const MoveState& st, const json& op, Sampler& rng) {
  HTriangulation tri(st.data);
  const std::string name = op.at("op").get<std::string>();
  MoveResult mv;
  if (name == "pachner23") {
    mv = pachner_23(tri, st.coloring, op.at("tet").get<int>(), op.at("face").get<int>());
  } else if (name == "pachner32") {
    auto c = op.at("corners");
    mv = pachner_32(tri, st.coloring, op.at("tet").get<int>(), c.at(0).get<int>(),
                    c.at(1).get<int>());
  } else if (name == "bubble_add") {
    auto e = op.at("edge");
    mv = bubble_add(tri, st.coloring, op.at("tet").get<int>(), op.at("face").get<int>(),
                    {e.at(0).get<int>(), e.at(1).get<int>()}, rng);
  } else if (name == "bubble_remove") {
    int v = tri.vertex_class(op.at("tet").get<int>(), op.at("corner").get<int>());
    mv = bubble_remove(tri, st.coloring, v);
  } else if (name == "lune_add") {
    mv = lune_add(tri, st.coloring, op.at("tet_a").get<int>(), op.at("face_a").get<int>(),
                  op.at("tet_b").get<int>(), op.at("face_b").get<int>());
  } else if (name == "lune_remove") {
    auto c = op.at("corners");
    mv = lune_remove(tri, st.coloring, op.at("tet").get<int>(), c.at(0).get<int>(),
                     c.at(1).get<int>());
  } else if (name == "coboundary") {
    auto v = op.at("value");
    GColoring col = st.coloring;
    col.add_coboundary(tri, op.at("vertex").get<int>(),
                       {v.at(0).get<double>(), v.at(1).get<double>()});
    return {st.data, std::move(col)};
  } else {
    throw CliError(2, "unknown move op '" + name + "'");
  }
  HTriangulation nt(mv.data);
  GColoring col = mv.coloring;
  if (!col.is_admissible(nt)) col = make_admissible(nt, col, rng);
  return {std::move(mv.data), std::move(col)};
}

int cmd_sixj(const RootData& rd, Flavor fl, const std::string& colors_csv) {
  std::vector<cplx> cs;
  std::stringstream ss(colors_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) cs.push_back(parse_complex(tok));
  if (cs.size() != 6) throw CliError(2, "--colors needs six comma-separated values");
  Engine eng(rd, fl);
  std::array<cplx, 6> t;
  std::copy(cs.begin(), cs.end(), t.begin());
  bool any_typical = false;
  for (cplx c : t) any_typical = any_typical || eng.is_typical(c);
  if (!any_typical) throw CliError(3, "NoTypicalColor: no color in the tuple is typical");
  json out;
  out["r"] = rd.r;
  out["k"] = rd.k;
  out["flavor"] = fl == Flavor::unrolled ? "unrolled" : "truncated";
  cplx v = eng.sixj(t);
  out["value"] = cplx_json(v);
  json dims = json::array();
  for (auto& tr : Engine::tetra_triples(eng, t)) dims.push_back(eng.inv_dim(tr));
  out["triple_dims"] = dims;
  auto rep = classify_tuple(eng, t);
  out["goodness"] = {{"good", rep.good},
                     {"strongly_good", rep.strongly_good},
                     {"admissible", rep.admissible}};
  std::cout << out.dump(2) << "\n";
  std::cerr << "6j value (" << v.real() << ", " << v.imag() << ")\n";
  return 0;
}

int cmd_verify(const RootData& rd, const std::string& suite, std::uint64_t seed, int samples,
               double tol) {
  SuiteReport rep = run_suite(suite, rd, seed, samples, tol);
  json out;
  out["suite"] = rep.suite;
  out["r"] = rd.r;
  out["k"] = rd.k;
  out["seed"] = seed;
  out["samples"] = rep.samples;
  out["max_residual"] = rep.max_residual;
  out["tolerance"] = rep.tolerance;
  out["pass"] = rep.pass;
  if (!rep.notes.empty()) out["notes"] = rep.notes;
  std::cout << out.dump(2) << "\n";
  std::cerr << "suite " << rep.suite << ": max residual " << rep.max_residual
            << (rep.pass ? " (pass)\n" : " (RESIDUAL BREACH)\n");
  return rep.pass ? 0 : 1;
}

int cmd_tv(const RootData& rd, const std::string& tri_path, const std::string& coc_path,
           const std::string& moves_path, std::uint64_t seed, long max_states, double tol,
           const std::string& out_path) {
  auto in = load_inputs(tri_path, coc_path);
  if (!in.col.is_admissible(in.tri))
    throw CliError(3, "NotAdmissible: run `tetratv tri make-admissible` first");
  Engine eng(rd, Flavor::truncated);
  TVOptions opt;
  opt.max_states = max_states;
  TVResult base = tv(eng, in.tri, in.col, opt);
  json out;
  out["value"] = cplx_json(base.value);
  out["states"] = base.states;
  out["pruned"] = base.states - base.surviving;
  out["seconds"] = base.seconds;
  if (!moves_path.empty()) {
    json script = load_json(moves_path);
    Sampler rng(seed);
    MoveState st{in.tri.data(), in.col};
    double max_dev = 0.0;
    json steps = json::array();
    for (const auto& op : script) {
      st = apply_scripted_move(st, op, rng);
      HTriangulation t2(st.data);
      TVResult res = tv(eng, t2, st.coloring, opt);
      double dev = std::abs(res.value - base.value) / std::max(1.0, std::abs(base.value));
      max_dev = std::max(max_dev, dev);
      steps.push_back({{"op", op.at("op")},
                       {"value", cplx_json(res.value)},
                       {"tets", t2.n_tets()},
                       {"deviation", dev}});
    }
    out["moves"] = steps;
    out["max_deviation"] = max_dev;
    out["pass"] = max_dev <= tol;
  }
  std::string text = out.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << text;
  }
  std::cout << text;
  std::cerr << "TV = (" << base.value.real() << ", " << base.value.imag() << ") over "
            << base.states << " states\n";
  if (!moves_path.empty() && !out["pass"].get<bool>()) return 1;
  return 0;
}

int cmd_tri(const std::string& sub, const std::string& tri_path, const std::string& coc_path,
            const std::string& move_spec, std::uint64_t seed, const std::string& out_prefix) {
  if (sub == "validate") {
    HTriangulation tri(triangulation_from_json(load_json(tri_path)));
    json out;
    out["ok"] = true;
    out["tetrahedra"] = tri.n_tets();
    out["vertices"] = tri.n_vertices();
    out["edges"] = tri.n_edges();
    out["faces"] = tri.n_faces();
    out["euler_characteristic"] = tri.euler_characteristic();
    out["link_edges"] = int(tri.link().size());
    if (!coc_path.empty()) {
      GColoring col = coloring_from_json(tri, load_json(coc_path));
      out["cocycle"] = col.is_cocycle(tri);
      out["admissible"] = col.is_admissible(tri);
    }
    std::cout << out.dump(2) << "\n";
    std::cerr << "ok\n";
    return 0;
  }
  auto in = load_inputs(tri_path, coc_path);
  Sampler rng(seed);
  if (sub == "make-admissible") {
    GColoring col = make_admissible(in.tri, in.col, rng);
    std::ofstream f(out_prefix + ".cocycle.json");
    f << coloring_to_json(in.tri, col).dump(2) << "\n";
    std::cout << json{{"admissible", col.is_admissible(in.tri)},
                      {"out", out_prefix + ".cocycle.json"}}
                     .dump(2)
              << "\n";
    return 0;
  }
  if (sub == "apply-move") {
    // move spec: op:site, e.g. pachner23:tet0.face2 or pachner32:tet1.e2-3
    json op;
    auto colon = move_spec.find(':');
    if (colon == std::string::npos) throw CliError(2, "--move needs op:site");
    std::string name = move_spec.substr(0, colon), site = move_spec.substr(colon + 1);
    auto grab = [&](const std::string& key) {
      auto p = site.find(key);
      if (p == std::string::npos) throw CliError(2, "move site missing '" + key + "'");
      return std::atoi(site.c_str() + p + key.size());
    };
    if (name == "pachner23") {
      op = {{"op", "pachner23"}, {"tet", grab("tet")}, {"face", grab("face")}};
    } else if (name == "pachner32" || name == "luneremove") {
      auto p = site.find(".e");
      if (p == std::string::npos) throw CliError(2, "move site needs .eA-B");
      int a = std::atoi(site.c_str() + p + 2);
      auto dash = site.find('-', p);
      if (dash == std::string::npos) throw CliError(2, "move site needs .eA-B");
      int b = std::atoi(site.c_str() + dash + 1);
      op = {{"op", name == "pachner32" ? "pachner32" : "lune_remove"},
            {"tet", grab("tet")},
            {"corners", json::array({a, b})}};
    } else {
      throw CliError(2, "unsupported --move op '" + name + "'");
    }
    MoveState st{in.tri.data(), in.col};
    st = apply_scripted_move(st, op, rng);
    std::ofstream f1(out_prefix + ".tri.json");
    f1 << triangulation_to_json(st.data).dump(2) << "\n";
    HTriangulation nt(st.data);
    std::ofstream f2(out_prefix + ".cocycle.json");
    f2 << coloring_to_json(nt, st.coloring).dump(2) << "\n";
    std::cout << json{{"ok", true},
                      {"tri", out_prefix + ".tri.json"},
                      {"cocycle", out_prefix + ".cocycle.json"}}
                     .dump(2)
              << "\n";
    return 0;
  }
  throw CliError(2, "unknown tri subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modified 6j-symbols and Turaev-Viro-type state sums for quantum sl2 at odd "
               "roots of unity"};
  app.require_subcommand(1);

  int r = 3, k = 1, samples = 20;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  long max_states = 10'000'000;
  std::string flavor = "unrolled", colors, tri_path, coc_path, link_path, moves_path, out_path;
  app.add_option("--r", r, "odd root order (>= 3)");
  app.add_option("--k", k, "odd exponent coprime to r");
  app.add_option("--tol", tol, "residual tolerance");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--samples", samples, "sample count for verification suites");
  app.add_option("--max-states", max_states, "state-sum size guard");
  app.add_option("--flavor", flavor, "unrolled | truncated");
  app.add_option("--colors", colors, "six comma-separated complex colors");
  app.add_option("--tri", tri_path, "triangulation json");
  app.add_option("--cocycle", coc_path, "cocycle json");
  app.add_option("--link", link_path, "link json (normally embedded in --tri)");
  app.add_option("--moves", moves_path, "move script json");
  app.add_option("--out", out_path, "output path / prefix");

  auto* sixj = app.add_subcommand("sixj", "evaluate one modified 6j-symbol");
  sixj->fallthrough();
  auto* verify = app.add_subcommand("verify", "run a named residual suite");
  verify->fallthrough();
  std::string suite;
  verify
      ->add_option("--suite", suite,
                   "duality|relations|heights|tambi|symmetry|be|orth|two6j|bubble|bsum|table-r3")
      ->required();
  auto* tvc = app.add_subcommand("tv", "evaluate the state sum (optionally under a move script)");
  tvc->fallthrough();
  auto* tric = app.add_subcommand("tri", "triangulation utilities");
  tric->fallthrough();
  std::string tri_sub, move_spec;
  tric->add_option("subcommand", tri_sub, "validate | make-admissible | apply-move")->required();
  tric->add_option("--move", move_spec, "move spec, e.g. pachner23:tet0.face2");

  CLI11_PARSE(app, argc, argv);

  try {
    RootData rd(r, k);
    Flavor fl = flavor == "truncated" ? Flavor::truncated : Flavor::unrolled;
    if (sixj->parsed()) return cmd_sixj(rd, fl, colors);
    if (verify->parsed()) return cmd_verify(rd, suite, seed, samples, tol);
    if (tvc->parsed())
      return cmd_tv(rd, tri_path, coc_path, moves_path, seed, max_states, tol, out_path);
    if (tric->parsed())
      return cmd_tri(tri_sub, tri_path, coc_path, move_spec, seed,
                     out_path.empty() ? "tetratv_out" : out_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
