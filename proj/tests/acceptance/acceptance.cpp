// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [path-to-cli] [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "barylab/barycenter.hpp"
#include "barylab/bcg.hpp"
#include "barylab/graph_fixtures.hpp"
#include "barylab/natural_map.hpp"
#include "barylab/net_fixture.hpp"
#include "barylab/random.hpp"
#include "barylab/simplicial.hpp"
#include "barylab/stallings.hpp"
#include "barylab/transport.hpp"
#include "support/oracles.hpp"

using namespace barylab;
using namespace barylab::hyp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures of one criterion.
struct Check {
  Outcome out;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      notes << (notes.tellp() > 0 ? "; " : "") << "failed: " << what;
    }
  }
  void note(const std::string& s) { notes << (notes.tellp() > 0 ? "; " : "") << s; }
  Outcome done() {
    out.detail = notes.str();
    return out;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

PointMeasure random_measure(Rng& rng, int atoms, const HPoint& center, double radius) {
  PointMeasure mu;
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int i = 0; i < atoms; ++i) mu.add(random_point(center, radius, rng), w(rng));
  return normalize(mu);
}

HPoint midpoint(const HPoint& p, const HPoint& q) { return exp_map({p, 0.5 * log_map(p, q).vec}); }

// ------------------------------------------------------------------ 1 .. 3

Outcome barycenter_correctness() {
  Check c;
  Rng rng(101);
  const HPoint o = HPoint::origin(3);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const HPoint p = random_point(o, 3.0, rng), q = random_point(o, 3.0, rng);
    worst = std::max(worst, distance(barycenter(PointMeasure::dirac(p)).point, p));
    worst = std::max(worst, distance(barycenter(PointMeasure({p, q}, {0.5, 0.5})).point, midpoint(p, q)));
    // Three-fold rotation about an axis through a random centre.
    const HPoint ctr = random_point(o, 2.0, rng);
    const HIsometry to_c = HIsometry::translation_to(ctr);
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    const double a = 2 * std::numbers::pi / 3;
    rot.topLeftCorner(2, 2) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Eigen::MatrixXd frame = haar_rotation(rng, 3);
    const HIsometry r = to_c.compose(HIsometry::rotation(frame * rot * frame.transpose())).compose(to_c.inverse());
    const HPoint x = to_c.apply(polar_point(frame * Eigen::Vector3d(1.0, 0.0, 0.0), 0.5 + 0.1 * t));
    PointMeasure mu;
    mu.add(x, 1.0 / 3), mu.add(r.apply(x), 1.0 / 3), mu.add(r.apply(r.apply(x)), 1.0 / 3);
    worst = std::max(worst, distance(barycenter(mu).point, ctr));
  }
  c.expect(worst < 1e-7, "closed forms within 1e-7");
  c.note("closed-form max dev " + fmt(worst));

  double gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    const PointMeasure mu = random_measure(rng, 20, o, 2.5);
    const auto res = barycenter(mu);
    gap = std::max(gap, std::abs(res.objective - oracle::grid_minimum(mu, o, 3.0).second));
  }
  c.expect(gap < 1e-6, "grid oracle within 1e-6");
  c.note("grid max gap " + fmt(gap));
  return c.done();
}

Outcome barycenter_lipschitz() {
  Check c;
  Rng rng(102);
  const HPoint o = HPoint::origin(3);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const PointMeasure mu = random_measure(rng, 8, o, 2.5), nu = random_measure(rng, 8, o, 2.5);
    const double lhs = distance(barycenter(mu).point, barycenter(nu).point);
    const double w = wasserstein1(mu, nu).cost;
    worst = std::max(worst, lhs / w);
    if (lhs > w * (1 + 1e-6)) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " violations");
  c.note("max ratio d/W1 " + fmt(worst));
  return c.done();
}

Outcome barycenter_equivariance() {
  Check c;
  Rng rng(103);
  const HPoint o = HPoint::origin(3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const PointMeasure mu = random_measure(rng, 10, o, 2.5);
    const HIsometry g = HIsometry::random(3, rng);
    const auto moved = pushforward<HPointLess>(mu, [&](const HPoint& p) { return std::optional(g.apply(p)); });
    worst = std::max(worst, distance(barycenter(moved).point, g.apply(barycenter(mu).point)));
  }
  c.expect(worst < 1e-7, "max deviation < 1e-7");
  c.note("max deviation " + fmt(worst));
  return c.done();
}

// ---------------------------------------------------------------------- 4

Outcome wasserstein_exactness() {
  Check c;
  Rng rng(104);
  const HPoint o = HPoint::origin(3);
  std::uniform_int_distribution<int> atoms(1, 6);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int total = 8;
    auto counted = [&](int n) {
      std::vector<int> cnt(static_cast<std::size_t>(n), 1);
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int k = n; k < total; ++k) ++cnt[static_cast<std::size_t>(pick(rng))];
      return cnt;
    };
    const int na = atoms(rng), nb = atoms(rng);
    std::vector<HPoint> pa, pb;
    for (int i = 0; i < na; ++i) pa.push_back(random_point(o, 3.0, rng));
    for (int j = 0; j < nb; ++j) pb.push_back(random_point(o, 3.0, rng));
    const auto ca = counted(na), cb = counted(nb);
    PointMeasure mu, nu;
    for (int i = 0; i < na; ++i) mu.add(pa[static_cast<std::size_t>(i)], ca[static_cast<std::size_t>(i)] / double(total));
    for (int j = 0; j < nb; ++j) nu.add(pb[static_cast<std::size_t>(j)], cb[static_cast<std::size_t>(j)] / double(total));
    Eigen::MatrixXd cost(na, nb);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) cost(i, j) = distance(pa[static_cast<std::size_t>(i)], pb[static_cast<std::size_t>(j)]);
    worst = std::max(worst, std::abs(wasserstein1(mu, nu).cost - oracle::permutation_w1(ca, cb, cost)));
  }
  c.expect(worst < 1e-9, "agreement < 1e-9");
  c.note("max |W1 - oracle| " + fmt(worst));
  return c.done();
}

// ---------------------------------------------------------------------- 5

Outcome entropy_checks() {
  Check c;
  const auto t3 = volume_entropy(fixtures::regular_tree(3, 13), 0, 4, 12);
  const auto t4 = volume_entropy(fixtures::regular_tree(4, 10), 0, 3, 9);
  const auto path = volume_entropy(fixtures::path_graph(401), 200, 20, 150);
  c.expect(std::abs(t3.h / std::log(2.0) - 1) < 0.02, "3-regular tree");
  c.expect(std::abs(t4.h / std::log(3.0) - 1) < 0.02, "4-regular tree");
  c.expect(std::abs(path.h) < 0.05, "path");
  c.note("h3 " + fmt(t3.h) + ", h4 " + fmt(t4.h) + ", path " + fmt(path.h));

  const MMGraph t = fixtures::regular_tree(3, 15);
  const auto ref = volume_entropy(t, 0, 4, 12);
  double worst = 0.0;
  for (int x = 1; x < 22; ++x) {  // every vertex of depth <= 3
    const auto e = volume_entropy(t, x, 4, 12);
    const double allowed = 2 * std::max(e.residual, ref.residual);
    worst = std::max(worst, std::abs(e.h - ref.h) / allowed);
  }
  c.expect(worst <= 1.0, "basepoint independence within 2 residual");
  c.note("basepoint dev/(2 residual) " + fmt(worst));
  return c.done();
}

// ---------------------------------------------------------------------- 6

Outcome bcg_inequality() {
  Check c;
  for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {5, 1}, {4, 2}, {6, 2}}) {
    bcg::ScanOptions opt;
    opt.N = n, opt.d = d, opt.count = 100000, opt.seed = 7, opt.threads = threads();
    opt.abort_on_violation = false;
    const bcg::ScanReport r = bcg::bcg_scan(opt);
    c.expect(r.violations == 0, "violations at N=" + std::to_string(n) + " d=" + std::to_string(d));
    c.expect(r.empirical_A > 0, "empirical A at N=" + std::to_string(n));
    const double eq = bcg::bcg_ratio(bcg::make_input(Eigen::MatrixXd::Identity(n, n) / n, d));
    const double rel = std::abs(eq / r.bound - 1);
    c.expect(rel < 1e-12, "equality at I/N");
    c.note("(" + std::to_string(n) + "," + std::to_string(d) + ") max/bound " + fmt(r.max_ratio / r.bound) + " A " +
           fmt(r.empirical_A) + " eq " + fmt(rel));
  }
  return c.done();
}

// ---------------------------------------------------------------------- 7

Outcome natural_map_pipeline() {
  Check c;
  const auto net = fixtures::symmetric_net(3.15, 0.45, 1.0, 7);
  const auto e = volume_entropy(net.graph, net.center, 1.5, 3.0, 0.125);
  c.note(std::to_string(net.graph.size()) + " vertices, h_est " + fmt(e.h) + " +- " + fmt(e.residual));
  std::vector<int> samples;
  for (int v = 0; v < net.graph.size() && samples.size() < 12; ++v)
    if (distance(net.points[static_cast<std::size_t>(v)], net.points[static_cast<std::size_t>(net.center)]) < 1.0)
      samples.push_back(v);
  c.expect(samples.size() == 12, "12 sample points");
  const int n = 3;
  double tr = 0.0, kmin = std::numeric_limits<double>::infinity(), detb = 0.0, jac = 0.0, eq = 0.0;
  for (double factor : {1.1, 1.5, 2.0}) {
    NaturalMapConfig cfg;
    cfg.s = factor * e.h;
    cfg.h_estimate = e.h;
    cfg.h_residual = e.residual;
    cfg.samples = samples;
    cfg.threads = threads();
    try {
      const NaturalMapRun run = run_natural_map(net.graph, net.points, cfg);
      for (const auto& r : run.samples) {
        tr = std::max(tr, std::abs(r.trace_H - 1));
        kmin = std::min(kmin, r.min_eig_K_minus_IH);
        detb = std::max(detb, r.det_B * std::pow(n, n));
        jac = std::max(jac, r.jac_formula / r.bound);
      }
      for (std::size_t k = 1; k < net.deck.size(); k += 5)
        for (int x : samples) {
          const HPoint a = natural_map_point(net.graph, net.points, net.deck[k][static_cast<std::size_t>(x)], cfg).point;
          const HPoint b = net.isometry(k).apply(natural_map_point(net.graph, net.points, x, cfg).point);
          eq = std::max(eq, distance(a, b));
        }
    } catch (const Error& err) {
      c.expect(false, "s = " + fmt(factor) + " h: " + err.what());
    }
  }
  c.expect(tr <= 1e-8, "trace H = 1");
  c.expect(kmin >= -1e-8, "K >= I - H");
  c.expect(detb <= 1 + 1e-6, "det B <= N^-N");
  c.expect(jac <= 1 + 1e-6, "jac_formula <= (s/(N-1))^N");
  c.expect(eq < 1e-6, "deck equivariance");
  c.note("max |trH-1| " + fmt(tr) + ", min eig " + fmt(kmin) + ", max N^N detB " + fmt(detb) + ", max jac/bound " +
         fmt(jac) + ", equivariance " + fmt(eq));
  return c.done();
}

// ---------------------------------------------------------------------- 8

Outcome coarea_identity() {
  Check c;
  const auto id = coarea_check(fixtures::identity_map(fixtures::octahedron()), 10000, 1, threads());
  const auto cover = coarea_check(fixtures::torus_cover(3, 3, 2), 10000, 2, threads());
  const auto pl = coarea_check(fixtures::random_pl_square(4, 7), 100000, 3, threads());
  c.expect(id.rel_gap < 0.01, "identity");
  c.expect(cover.rel_gap < 0.01, "2-sheeted cover");
  c.expect(pl.rel_gap < 0.02, "random PL");
  c.note("gaps " + fmt(id.rel_gap) + ", " + fmt(cover.rel_gap) + ", " + fmt(pl.rel_gap));
  return c.done();
}

// ---------------------------------------------------------------------- 9

Outcome index_checks() {
  Check c;
  const std::vector<Word> gens{parse_word("aa", 2), parse_word("b", 2), parse_word("abA", 2)};
  const int idx = stallings_index(gens, 2);
  const int brute = oracle::coset_count(gens, 2, 4);
  c.expect(idx == 2 && brute == 2, "stallings {a^2, b, aba^-1} = 2");
  c.note("stallings " + std::to_string(idx) + ", cosets " + std::to_string(brute));

  for (int k = 1; k <= 3; ++k) {
    const PLMap circ = fixtures::circle_cover(5, k);
    const PreReport pc = pre_count(circ, 10000, 10 + static_cast<std::uint64_t>(k), threads());
    c.expect(std::abs(pc.pre - k) < 1e-12 && ind_pi(graph_map_of(circ)) == k && ind_H_degree(circ) == k,
             "circle cover k=" + std::to_string(k));
    const PLMap tor = fixtures::torus_cover(3, 3, k);
    const PreReport pt = pre_count(tor, 10000, 20 + static_cast<std::uint64_t>(k), threads());
    c.expect(std::abs(pt.pre - k) < 1e-12 && ind_H_degree(tor) == k, "torus cover k=" + std::to_string(k));
  }

  int deficit = std::numeric_limits<int>::min();
  bool dominates = true;
  for (const PLMap& f : {fixtures::circle_cover(4, 2), fixtures::torus_cover(3, 3, 2), fixtures::octahedron_reflection(),
                         fixtures::double_collapse(), fixtures::collapse_to_edge(), fixtures::hemisphere_fold(),
                         fixtures::circle_walk(4, {0, 1, 2, 3, 0, 1, 2, 3, 0, 3, 2, 1})}) {
    const PreReport r = pre_count(f, 10000, 30, threads());
    deficit = std::max(deficit, r.max_deficit);
    dominates = dominates && r.pre + 1e-12 >= ind_H_degree(f);
  }
  c.expect(deficit <= 0, "pre >= |deg| at every generic sample");
  c.expect(dominates, "pre >= ind_H");

  bool confluent = true;
  const std::string ref = stallings_graph(gens, 2).canonical_form();
  const std::vector<Word> bigger{parse_word("abAB", 2), parse_word("aab", 2), parse_word("bba", 2), parse_word("aaa", 2)};
  const std::string ref2 = stallings_graph(bigger, 2).canonical_form();
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(derive_seed(40, s));
    confluent = confluent && stallings_graph(gens, 2, &rng).canonical_form() == ref;
    confluent = confluent && stallings_graph(bigger, 2, &rng).canonical_form() == ref2;
  }
  c.expect(confluent, "fold confluence over 100 orders");
  return c.done();
}

// --------------------------------------------------------------------- 10

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every regular file under `dir` plus stdout, keyed by relative path.
std::vector<std::pair<std::string, std::string>> snapshot(const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.emplace_back(std::filesystem::relative(e.path(), dir).string(), slurp(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const std::string& cli, const std::string& data) {
  Check c;
  if (cli.empty()) {
    c.expect(false, "no CLI path given");
    return c.done();
  }
  const std::vector<std::string> commands{
      "entropy " + data + "/tree3.json --basepoint 0 --r-min 3 --r-max 8",
      "barycenter " + data + "/measure_a.json",
      "wasserstein " + data + "/measure_a.json " + data + "/measure_b.json",
      "naturalmap " + data + "/naturalmap.json",
      "bcg --N 4 --d 2 --count 2000",
      "indices " + data + "/torus_cover2.json --mode all --samples 2000",
      "indices " + data + "/subgroup.json --mode stallings",
      "coarea " + data + "/random_pl.json --samples 5000",
  };
  const auto root = std::filesystem::temp_directory_path() / ("barylab_det_" + std::to_string(::getpid()));
  int differing = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / (std::to_string(i) + "_" + std::to_string(rep));
      std::filesystem::create_directories(dir);
      const std::string threads_flag = rep == 0 ? " --threads 1" : " --threads 4";
      const std::string cmd = "\"" + cli + "\" " + commands[i] + " --seed 5 --out-dir \"" + dir.string() + "\"" +
                              threads_flag + " > \"" + (dir / "stdout.txt").string() + "\" 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) c.expect(false, "exit status of: " + commands[i]);
      runs.push_back(snapshot(dir));
    }
    if (runs[0] != runs[1] || runs[0].size() < 2) {
      ++differing;
      c.expect(false, "outputs differ: " + commands[i]);
    }
  }
  std::filesystem::remove_all(root);
  c.note(std::to_string(commands.size() - static_cast<std::size_t>(differing)) + "/" + std::to_string(commands.size()) +
         " commands byte-identical across reruns and thread counts");
  return c.done();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, data = BARYLAB_DATA_DIR;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (a == "--data" && i + 1 < argc)
      data = argv[++i];
    else
      cli = a;
  }
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "barycenter correctness", 10, barycenter_correctness},
      {2, "barycenter 1-Lipschitz in W1", 120, barycenter_lipschitz},
      {3, "barycenter equivariance", 1e9, barycenter_equivariance},
      {4, "Wasserstein exactness", 1e9, wasserstein_exactness},
      {5, "volume entropy", 30, entropy_checks},
      {6, "BCG inequality", 300, bcg_inequality},
      {7, "natural-map pipeline", 600, natural_map_pipeline},
      {8, "coarea identity", 1e9, coarea_identity},
      {9, "indices", 1e9, index_checks},
      {10, "CLI determinism", 1e9, [&] { return determinism(cli, data); }},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    if (only && cr.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(cr.budget_s) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
