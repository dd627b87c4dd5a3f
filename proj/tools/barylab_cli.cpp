// barylab: command-line front end.
// Exit codes: 0 success, 1 bound violation or failed check, 2 input error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "barylab/barycenter.hpp"
#include "barylab/bcg.hpp"
#include "barylab/json_io.hpp"
#include "barylab/natural_map.hpp"
#include "barylab/net_fixture.hpp"
#include "barylab/simplicial.hpp"
#include "barylab/stallings.hpp"
#include "barylab/transport.hpp"

namespace fs = std::filesystem;
using namespace barylab;
using io::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::optional<double> tol;
  unsigned threads = 1;
  std::string out_dir;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Report envelope shared by all commands. The digest covers the command's
/// parameters (not --threads or --out-dir) and the bytes of every input file.
class Report {
 public:
  Report(std::string command, const Globals& g) : command_(std::move(command)), g_(g) {
    config_ = json::object();
    config_["seed"] = g.seed;
    if (g.tol) config_["tol"] = *g.tol;
  }

  json& config() { return config_; }

  void input(const std::string& key, const std::string& path) {
    config_[key] = path;
    config_[key + "_fnv1a"] = hex(fnv1a(read_file(path)));
  }

  void csv(const std::string& name, const std::string& text) {
    if (!g_.out_dir.empty()) files_.emplace_back(name, text);
  }

  int finish(json result, bool ok) {
    json out;
    out["tool"] = "barylab";
    out["version"] = BARYLAB_VERSION;
    out["command"] = command_;
    out["config"] = config_;
    out["config_digest"] = hex(fnv1a(command_ + "\n" + config_.dump()));
    out["result"] = std::move(result);
    out["status"] = ok ? "ok" : "violation";
    const std::string text = out.dump(2) + "\n";
    if (!g_.out_dir.empty()) {
      fs::create_directories(g_.out_dir);
      files_.emplace_back(command_ + "_summary.json", text);
      for (const auto& [name, body] : files_) {
        std::ofstream f(fs::path(g_.out_dir) / name, std::ios::binary);
        if (!f) throw InvalidInput("cannot write to '" + g_.out_dir + "'");
        f << body;
      }
    }
    std::cout << text;
    return ok ? 0 : 1;
  }

 private:
  std::string command_;
  const Globals& g_;
  json config_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// ------------------------------------------------------------------ entropy

struct EntropyArgs {
  std::string graph;
  std::string basepoint = "0";
  double r_min = 1.0, r_max = 10.0, step = 1.0;
};

int cmd_entropy(const EntropyArgs& a, const Globals& g) {
  Report rep("entropy", g);
  rep.input("graph", a.graph);
  rep.config()["basepoint"] = a.basepoint;
  rep.config()["window"] = {a.r_min, a.r_max, a.step};
  const MMGraph graph = io::graph_from_json(io::read_json_file(a.graph));
  const EntropyEstimate e = volume_entropy(graph, graph.index_of(a.basepoint), a.r_min, a.r_max, a.step);
  std::string csv = "R,log_mass\n";
  for (std::size_t i = 0; i < e.radii.size(); ++i) csv += num(e.radii[i]) + "," + num(e.log_mass[i]) + "\n";
  rep.csv("entropy.csv", csv);
  return rep.finish({{"h", e.h}, {"residual", e.residual}, {"r_min", e.r_min}, {"r_max", e.r_max},
                     {"vertices", graph.size()}},
                    true);
}

// --------------------------------------------------------------- barycenter

int cmd_barycenter(const std::string& path, const Globals& g) {
  Report rep("barycenter", g);
  rep.input("measure", path);
  const PointMeasure mu = io::point_measure_from_json(io::read_json_file(path));
  BarycenterOptions opt;
  if (g.tol) opt.tol = *g.tol;
  const BarycenterResult r = barycenter(mu, opt);
  return rep.finish({{"point", io::to_json(r.point)},
                     {"objective", r.objective},
                     {"gradient_norm", r.gradient_norm},
                     {"iterations", r.iterations},
                     {"atoms", mu.size()}},
                    true);
}

// -------------------------------------------------------------- wasserstein

int cmd_wasserstein(const std::string& pa, const std::string& pb, const Globals& g) {
  Report rep("wasserstein", g);
  rep.input("mu", pa);
  rep.input("nu", pb);
  const PointMeasure mu = io::point_measure_from_json(io::read_json_file(pa));
  const PointMeasure nu = io::point_measure_from_json(io::read_json_file(pb));
  const TransportResult r = wasserstein1(mu, nu);
  std::string csv = "source,target,mass\n";
  for (const auto& f : r.plan.flows) csv += std::to_string(f.source) + "," + std::to_string(f.target) + "," + num(f.mass) + "\n";
  rep.csv("plan.csv", csv);
  return rep.finish({{"w1", r.cost}, {"flows", r.plan.flows.size()}}, true);
}

// --------------------------------------------------------------- naturalmap

int cmd_naturalmap(const std::string& path, const Globals& g) {
  Report rep("naturalmap", g);
  rep.input("config_file", path);
  const json cfg_json = io::read_json_file(path);
  const double tol = g.tol.value_or(1e-6);
  const fs::path base = fs::path(path).parent_path();

  MMGraph graph;
  std::vector<hyp::HPoint> emb;
  int center = 0;
  if (cfg_json.contains("fixture")) {
    const json& fx = cfg_json.at("fixture");
    auto net = fixtures::symmetric_net(fx.value("radius", 2.2), fx.value("spacing", 0.5), fx.value("connection", 1.1),
                                       fx.value("seed", std::uint64_t{3}));
    graph = std::move(net.graph);
    emb = std::move(net.points);
    center = net.center;
  } else {
    const std::string gp = (base / cfg_json.value("graph", "")).string();
    const std::string ep = (base / cfg_json.value("embedding", "")).string();
    rep.input("graph", gp);
    rep.input("embedding", ep);
    graph = io::graph_from_json(io::read_json_file(gp));
    for (const auto& p : io::read_json_file(ep)) emb.push_back(io::point_from_json(p));
    center = graph.index_of(cfg_json.value("center", graph.label(0)));
  }
  if (static_cast<int>(emb.size()) != graph.size()) throw InvalidInput("embedding needs one point per vertex");

  // Entropy estimate: explicit, or fitted on a window from the centre.
  double h = 0.0, residual = 0.0;
  if (cfg_json.contains("h_estimate")) {
    h = cfg_json.at("h_estimate").get<double>();
    residual = cfg_json.value("h_residual", 0.0);
  } else {
    const json w = cfg_json.value("entropy_window", json::array({1.0, 2.0, 0.25}));
    if (!w.is_array() || w.size() != 3) throw InvalidInput("entropy_window is [r_min, r_max, step]");
    const EntropyEstimate e = volume_entropy(graph, center, w[0].get<double>(), w[1].get<double>(), w[2].get<double>());
    h = e.h;
    residual = e.residual;
  }

  std::vector<double> s_values;
  if (cfg_json.contains("s"))
    for (const auto& s : cfg_json.at("s")) s_values.push_back(s.get<double>());
  if (cfg_json.contains("s_factors"))
    for (const auto& f : cfg_json.at("s_factors")) s_values.push_back(f.get<double>() * h);
  if (s_values.empty()) throw InvalidInput("config needs 's' or 's_factors'");

  std::vector<int> samples;
  if (cfg_json.contains("samples")) {
    for (const auto& l : cfg_json.at("samples")) samples.push_back(graph.index_of(l.get<std::string>()));
  } else {
    const int count = cfg_json.value("sample_count", 6);
    const double radius = cfg_json.value("sample_radius", 1.0);
    for (int v = 0; v < graph.size() && static_cast<int>(samples.size()) < count; ++v)
      if (hyp::distance(emb[static_cast<std::size_t>(v)], emb[static_cast<std::size_t>(center)]) < radius) samples.push_back(v);
  }

  const int n = emb.front().dim();
  std::ostringstream csv, per_s;
  csv << "x,s";
  for (int i = 0; i <= n; ++i) csv << ",F_" << i;
  csv << ",trace_H,H_dev,det_K,det_B,min_eig_K_minus_IH,jac_formula,jac_chain,jac_mesh,bound,gap\n";
  per_s << "s,samples,max_trace_err,min_eig_K_minus_IH,max_detB_scaled,max_jac_over_bound,min_gap,violations\n";
  int violations = 0;
  json per_s_json = json::array();
  for (double s : s_values) {
    NaturalMapConfig cfg;
    cfg.s = s;
    cfg.h_estimate = h;
    cfg.h_residual = residual;
    cfg.samples = samples;
    cfg.threads = g.threads;
    cfg.mesh_radius = cfg_json.value("mesh_radius", 0.0);
    const NaturalMapRun run = run_natural_map(graph, emb, cfg);
    double tr = 0.0, kmin = std::numeric_limits<double>::infinity(), detb = 0.0, jac = 0.0,
           gap = std::numeric_limits<double>::infinity();
    int bad = 0;
    for (const auto& r : run.samples) {
      csv << graph.label(r.x) << ',' << num(s);
      for (int i = 0; i <= n; ++i) csv << ',' << num(r.F.coords()[i]);
      csv << ',' << num(r.trace_H) << ',' << num(r.h_deviation) << ',' << num(r.det_K) << ',' << num(r.det_B) << ','
          << num(r.min_eig_K_minus_IH) << ',' << num(r.jac_formula) << ',' << num(r.jac_chain) << ','
          << num(r.jac_mesh) << ',' << num(r.bound) << ',' << num(r.gap) << '\n';
      tr = std::max(tr, std::abs(r.trace_H - 1));
      kmin = std::min(kmin, r.min_eig_K_minus_IH);
      detb = std::max(detb, r.det_B * std::pow(n, n));
      jac = std::max(jac, r.jac_formula / r.bound);
      gap = std::min(gap, r.gap);
      if (r.jac_formula > r.bound * (1 + tol) || r.det_B * std::pow(n, n) > 1 + tol || r.min_eig_K_minus_IH < -1e-8 ||
          std::abs(r.trace_H - 1) > 1e-8)
        ++bad;
    }
    violations += bad;
    per_s << num(s) << ',' << run.samples.size() << ',' << num(tr) << ',' << num(kmin) << ',' << num(detb) << ','
          << num(jac) << ',' << num(gap) << ',' << bad << '\n';
    per_s_json.push_back({{"s", s}, {"max_jac_over_bound", jac}, {"min_gap", gap}, {"violations", bad}});
  }
  rep.csv("naturalmap.csv", csv.str());
  rep.csv("naturalmap_s.csv", per_s.str());
  return rep.finish({{"vertices", graph.size()},
                     {"dim", n},
                     {"h_estimate", h},
                     {"h_residual", residual},
                     {"samples", samples.size()},
                     {"per_s", per_s_json},
                     {"violations", violations}},
                    violations == 0);
}

// ---------------------------------------------------------------------- bcg

struct BcgArgs {
  int N = 3, d = 1;
  std::size_t count = 1000;
  std::string family = "mixed";
};

int cmd_bcg(const BcgArgs& a, const Globals& g) {
  Report rep("bcg", g);
  rep.config()["N"] = a.N;
  rep.config()["d"] = a.d;
  rep.config()["count"] = a.count;
  rep.config()["family"] = a.family;
  bcg::ScanOptions opt;
  opt.N = a.N, opt.d = a.d, opt.count = a.count, opt.seed = g.seed, opt.threads = g.threads;
  opt.family = bcg::parse_family(a.family);
  opt.keep_samples = !g.out_dir.empty();
  if (g.tol) opt.rel_tol = *g.tol;
  opt.abort_on_violation = false;
  const bcg::ScanReport r = bcg::bcg_scan(opt);
  std::ostringstream csv;
  bcg::write_csv(csv, r);
  rep.csv("bcg.csv", csv.str());
  json spectrum = json::array();
  for (Eigen::Index i = 0; i < r.argmax_spectrum.size(); ++i) spectrum.push_back(r.argmax_spectrum[i]);
  return rep.finish({{"bound", r.bound},
                     {"max_ratio", r.max_ratio},
                     {"argmax_id", r.argmax_id},
                     {"argmax_spectrum", spectrum},
                     {"empirical_A", r.empirical_A},
                     {"argmin_A_id", r.argmin_A_id},
                     {"violations", r.violations},
                     {"outside_domain", r.outside_domain}},
                    r.violations == 0);
}

// ------------------------------------------------------------------ indices

struct IndicesArgs {
  std::string input;
  std::string mode = "all";
  std::uint64_t samples = 10000;
};

int cmd_indices(const IndicesArgs& a, const Globals& g) {
  Report rep("indices", g);
  rep.input("input", a.input);
  rep.config()["mode"] = a.mode;
  const json doc = io::read_json_file(a.input);
  if (a.mode != "all" && a.mode != "pre" && a.mode != "pi" && a.mode != "H" && a.mode != "stallings")
    throw InvalidInput("unknown mode '" + a.mode + "' (all, pre, pi, H, stallings)");

  if (doc.contains("generators")) {
    if (a.mode != "all" && a.mode != "stallings") throw InvalidInput("a subgroup file supports modes all and stallings");
    const io::SubgroupInput s = io::subgroup_from_json(doc);
    const FoldedGraph core = stallings_graph(s.generators, s.rank);
    return rep.finish({{"stallings_index", stallings_index(s.generators, s.rank)},
                       {"core_vertices", core.vertices},
                       {"core_edges", core.edges.size()}},
                      true);
  }
  if (a.mode == "stallings") throw InvalidInput("mode stallings needs a subgroup file");
  rep.config()["samples"] = a.samples;
  const PLMap f = io::map_from_json(doc);
  json res = json::object();
  bool ok = true;
  std::optional<int> ind_h, ind_p;
  double pre = 0.0;
  if (a.mode == "all" || a.mode == "pre") {
    const PreReport pr = pre_count(f, a.samples, g.seed, g.threads);
    pre = pr.pre;
    res["pre"] = pr.pre;
    if (f.vertex_map) res["pre_exact"] = pre_exact(f);
    res["mean_abs_degree"] = pr.mean_abs_degree;
    res["max_deficit"] = pr.max_deficit;
    res["samples"] = pr.samples;
    res["skipped"] = pr.skipped;
    if (pr.max_deficit > 0) ok = false;
  }
  if (a.mode == "all" || a.mode == "H") {
    try {
      ind_h = ind_H_degree(f, g.seed);
      res["ind_H"] = *ind_h;
    } catch (const NonPseudomanifold& e) {
      if (a.mode == "H") throw;
      res["ind_H"] = nullptr;
      res["ind_H_note"] = e.what();
    }
  }
  if (a.mode == "all" || a.mode == "pi") {
    if (f.domain.dim == 1 && f.vertex_map) {
      ind_p = ind_pi(graph_map_of(f));
      res["ind_pi"] = *ind_p;
    } else if (a.mode == "pi") {
      throw InvalidInput("ind_pi is computed for one-dimensional simplicial maps (graphs) only");
    } else {
      res["ind_pi"] = nullptr;
      res["ind_pi_note"] = "computed for one-dimensional simplicial maps only";
    }
  }
  if (a.mode == "all") {
    bool consistent = true;
    if (ind_h) consistent = consistent && pre + 1e-12 >= *ind_h;
    if (ind_p) consistent = consistent && pre + 1e-12 >= *ind_p;
    if (ind_h && ind_p && *ind_p > 0 && *ind_h > 0) consistent = consistent && *ind_h % *ind_p == 0;
    res["consistent"] = consistent;
    ok = ok && consistent;
  }
  return rep.finish(res, ok);
}

// ------------------------------------------------------------------- coarea

int cmd_coarea(const std::string& path, std::uint64_t samples, const Globals& g) {
  Report rep("coarea", g);
  rep.input("map", path);
  rep.config()["samples"] = samples;
  const double tol = g.tol.value_or(0.02);
  const PLMap f = io::map_from_json(io::read_json_file(path));
  const CoareaReport r = coarea_check(f, samples, g.seed, g.threads);
  return rep.finish({{"lhs", r.lhs}, {"rhs", r.rhs}, {"rel_gap", r.rel_gap}, {"samples", r.samples}, {"skipped", r.skipped}},
                    r.rel_gap <= tol);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barycenter-method numerics: entropy, natural maps, BCG scans, indices"};
  app.set_version_flag("--version", std::string(BARYLAB_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  double tol = 0.0;
  app.add_option("--seed", g.seed, "seed for every stochastic step");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance (command specific default)");
  app.add_option("--threads", g.threads, "worker threads; outputs do not depend on it")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory for CSV and JSON reports");

  EntropyArgs ea;
  auto* ent = app.add_subcommand("entropy", "volume entropy of a graph from a ball-growth window");
  ent->add_option("graph", ea.graph, "graph JSON")->required();
  ent->add_option("--basepoint", ea.basepoint, "basepoint label");
  ent->add_option("--r-min", ea.r_min);
  ent->add_option("--r-max", ea.r_max);
  ent->add_option("--step", ea.step);

  std::string measure_path;
  auto* bar = app.add_subcommand("barycenter", "barycenter of a measure on H^N");
  bar->add_option("measure", measure_path, "measure JSON")->required();

  std::string wa, wb;
  auto* was = app.add_subcommand("wasserstein", "exact W1 between two measures on H^N");
  was->add_option("mu", wa)->required();
  was->add_option("nu", wb)->required();

  std::string nm_path;
  auto* nat = app.add_subcommand("naturalmap", "natural-map tensors and Jacobian bounds on a sample set");
  nat->add_option("config", nm_path, "run configuration JSON")->required();

  BcgArgs ba;
  auto* bc = app.add_subcommand("bcg", "sampled scan of the BCG determinant inequality");
  bc->add_option("--N", ba.N);
  bc->add_option("--d", ba.d);
  bc->add_option("--count", ba.count);
  bc->add_option("--family", ba.family, "wishart, dirichlet, boundary, near-identity, near-degenerate, mixed");

  IndicesArgs ia;
  auto* ind = app.add_subcommand("indices", "pre, ind_pi and ind_H of a simplicial map, or a Stallings index");
  ind->add_option("input", ia.input, "map or subgroup JSON")->required();
  ind->add_option("--mode", ia.mode, "all, pre, pi, H, stallings");
  ind->add_option("--samples", ia.samples);

  std::string co_path;
  std::uint64_t co_samples = 10000;
  auto* co = app.add_subcommand("coarea", "both sides of the coarea identity for a PL map");
  co->add_option("map", co_path)->required();
  co->add_option("--samples", co_samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*tol_opt) g.tol = tol;

  try {
    if (*ent) return cmd_entropy(ea, g);
    if (*bar) return cmd_barycenter(measure_path, g);
    if (*was) return cmd_wasserstein(wa, wb, g);
    if (*nat) return cmd_naturalmap(nm_path, g);
    if (*bc) return cmd_bcg(ba, g);
    if (*ind) return cmd_indices(ia, g);
    if (*co) return cmd_coarea(co_path, co_samples, g);
  } catch (const SolverFailure& e) {
    std::cerr << "barylab: solver failure: " << e.what() << "\n";
    return 1;
  } catch (const BcgViolation& e) {
    std::cerr << "barylab: " << e.what() << "\n" << e.payload() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "barylab: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "barylab: malformed input: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
