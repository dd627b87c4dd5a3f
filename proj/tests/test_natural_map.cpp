#include <catch_amalgamated.hpp>

#include <cmath>

#include "barylab/graph_fixtures.hpp"
#include "barylab/natural_map.hpp"
#include "barylab/net_fixture.hpp"
#include "barylab/random.hpp"
#include "barylab/transport.hpp"

using namespace barylab;
using namespace barylab::hyp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Complete graph on the given points with hyperbolic edge lengths, so graph
// distances equal hyperbolic ones.
MMGraph complete_graph(const std::vector<HPoint>& pts, double max_len = 1e300) {
  std::vector<MMGraph::Edge> edges;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(pts.size()); ++j) {
      const double d = distance(pts[i], pts[j]);
      if (d < max_len) edges.push_back({i, j, d});
    }
  return MMGraph::from_edges(static_cast<int>(pts.size()), std::move(edges));
}

// Random separated points in B(c, radius).
std::vector<HPoint> random_net(const HPoint& c, double radius, double spacing, Rng& rng, int tries = 20000) {
  std::vector<HPoint> pts{c};
  for (int t = 0; t < tries; ++t) {
    const HPoint p = random_point(c, radius, rng);
    bool ok = true;
    for (const auto& q : pts)
      if (distance(p, q) < spacing) {
        ok = false;
        break;
      }
    if (ok) pts.push_back(p);
  }
  return pts;
}

NaturalMapConfig config(double s, double h = 0.0) {
  NaturalMapConfig cfg;
  cfg.s = s;
  cfg.h_estimate = h;
  return cfg;
}

}  // namespace

TEST_CASE("configuration is validated", "[natural_map][errors]") {
  NaturalMapConfig cfg = config(1.0, 0.8);
  cfg.h_residual = 0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.h_residual = 0.05;
  CHECK_NOTHROW(cfg.validate());
  cfg.tail_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  NaturalMapConfig trunc = config(2.0, 1.0);
  trunc.finite_space = false;
  CHECK_THROWS_AS(trunc.validate(), ConfigError);
}

TEST_CASE("exponentially weighted measure", "[natural_map]") {
  const MMGraph t = fixtures::regular_tree(3, 6);
  const double h = std::log(2.0);

  SECTION("the atom at x carries its own measure") {
    const ExpMeasure mu = mu_x_s(t, 5, config(2.0, h));
    CHECK(*mu.mu.weight_of(5) == t.measure(5));
    CHECK(mu.tail_bound == 0.0);
  }
  SECTION("large s concentrates at x") {
    const ExpMeasure mu = mu_x_s(t, 0, config(50 * h, h));
    auto metric = [&](int a, int b) { return t.distances_from(a)[static_cast<std::size_t>(b)]; };
    CHECK(wasserstein1(normalize(mu.mu), VertexMeasure::dirac(0), metric).cost < 0.01);
  }
  SECTION("finite truncation reports the exact tail") {
    NaturalMapConfig cfg = config(1.0, h);
    cfg.truncation_radius = 2.0;
    try {
      mu_x_s(t, 0, cfg);
      FAIL("expected TruncationTooSmall");
    } catch (const TruncationTooSmall& e) {
      CHECK(e.suggested_radius() > 2.0);
      cfg.truncation_radius = e.suggested_radius();
      CHECK_NOTHROW(mu_x_s(t, 0, cfg));
    }
  }
  SECTION("truncated infinite cover uses the geometric tail bound") {
    const auto ball = fixtures::theta_universal_cover(16);
    NaturalMapConfig cfg = config(3.0, h);
    cfg.finite_space = false;
    cfg.truncation_radius = 4.0;
    double suggested = 0.0;
    try {
      mu_x_s(ball.graph, ball.root, cfg);
      FAIL("expected TruncationTooSmall");
    } catch (const TruncationTooSmall& e) {
      suggested = e.suggested_radius();
    }
    REQUIRE(suggested > 4.0);
    REQUIRE(suggested <= 16.0);
    cfg.truncation_radius = suggested;
    const ExpMeasure mu = mu_x_s(ball.graph, ball.root, cfg);
    CHECK(mu.tail_bound <= cfg.tail_tolerance * mu.mu.mass());
    // The bound really bounds the discarded part of the (larger) ball.
    double discarded = 0.0;
    for (int z = 0; z < ball.graph.size(); ++z)
      if (mu.dist[z] > cfg.truncation_radius) discarded += std::exp(-cfg.s * mu.dist[z]);
    CHECK(discarded <= mu.tail_bound);
  }
}

TEST_CASE("mu is deck equivariant on a voltage cover", "[natural_map][property]") {
  const MMGraph base = MMGraph::from_edges(2, {{0, 1, 1.0}, {0, 1, 0.5}, {0, 0, 1.5}}, {1.0, 2.0});
  const auto cm = build_cover(base, {permutation_from_one_line({2, 3, 4, 1}), permutation_from_one_line({1, 2, 3, 4}),
                                     permutation_from_one_line({3, 4, 1, 2})});
  REQUIRE(cm.deck.size() > 1);
  const NaturalMapConfig cfg = config(2.0, 0.0);
  for (const auto& d : cm.deck)
    for (int x = 0; x < cm.total.size(); ++x) {
      const ExpMeasure a = mu_x_s(cm.total, d[x], cfg);
      const ExpMeasure b = mu_x_s(cm.total, x, cfg);
      for (const auto& atom : b.mu.atoms()) REQUIRE(*a.mu.weight_of(d[atom.site]) == atom.w);
    }
}

TEST_CASE("natural map of a constant map", "[natural_map]") {
  Rng rng(51);
  const std::vector<HPoint> pts = random_net(HPoint::origin(3), 1.0, 0.3, rng, 300);
  const MMGraph g = complete_graph(pts);
  const HPoint q = random_point(HPoint::origin(3), 2.0, rng);
  const std::vector<HPoint> f(pts.size(), q);
  CHECK(distance(natural_map_point(g, f, 0, config(2.0)).point, q) < 1e-12);
  CHECK_THROWS_AS(natural_map_point(g, std::vector<HPoint>(2, q), 0, config(2.0)), DomainError);
}

TEST_CASE("round sphere gives H = I/N", "[natural_map]") {
  // Orbit of a generic point under the cube rotations, centred at the origin.
  std::vector<HPoint> pts{HPoint::origin(3)};
  const Eigen::Vector3d dir = Eigen::Vector3d(0.3, 0.5, 0.81).normalized();
  for (const auto& q : fixtures::cube_rotations()) pts.push_back(polar_point(q * dir, 1.2));
  const MMGraph g = complete_graph(pts);
  const NaturalMapConfig cfg = config(2.0);
  const ExpMeasure mu = mu_x_s(g, 0, cfg);
  const auto bar = natural_map_point(g, pts, 0, cfg, &mu);
  CHECK(distance(bar.point, HPoint::origin(3)) < 1e-12);
  const auto t = assemble_tensors(g, pts, 0, bar.point, mu, cfg);
  CHECK((t.H - Eigen::Matrix3d::Identity() / 3.0).norm() < 1e-12);
  CHECK(t.image_atoms == 24);
  CHECK_THAT(t.excluded_mass, WithinAbs(1.0 / (1.0 + 24 * std::exp(-2.0 * 1.2)), 1e-12));
  // K has the coth factor on the sphere directions.
  CHECK((t.K - (2.0 / 3.0) / std::tanh(1.2) * Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("rank-deficient source charts are rejected", "[natural_map][errors]") {
  std::vector<HPoint> pts;
  Eigen::VectorXd dir(2);
  dir << 1.0, 0.0;
  for (int i = 0; i < 7; ++i) pts.push_back(polar_point(dir, 0.5 * (i - 3)));
  const MMGraph path = fixtures::path_graph(7, 0.5);
  const NaturalMapConfig cfg = config(3.0);
  const ExpMeasure mu = mu_x_s(path, 3, cfg);
  CHECK_THROWS_AS(assemble_tensors(path, pts, 3, pts[3], mu, cfg), RankDeficient);
}

TEST_CASE("jacobian formula", "[natural_map]") {
  const int n = 3;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  CHECK(jacobian_formula(0.1 * id, id, Eigen::MatrixXd::Zero(n, n), 2.0).value == 0.0);
  // Symmetric configuration: H = I/N, L = 0, K = I - H, A = I/N.
  for (double s : {2.0, 2.5, 4.0}) {
    const auto j = jacobian_formula(Eigen::MatrixXd::Zero(n, n), id - id / n, id / n, s);
    CHECK_THAT(j.value, WithinRel(std::pow(s / (n - 1), n), 1e-12));
  }
  Eigen::MatrixXd sing = id;
  sing(2, 2) = 0.0;
  CHECK_THROWS_AS(jacobian_formula(Eigen::MatrixXd::Zero(n, n), sing, id, 2.0), DegeneratePoint);
}

TEST_CASE("local geometry helpers", "[natural_map]") {
  SECTION("hull volumes") {
    Eigen::MatrixXd cube(3, 9);
    for (int i = 0; i < 8; ++i) cube.col(i) << (i & 1), (i >> 1) & 1, (i >> 2) & 1;
    cube.col(8) << 0.5, 0.5, 0.5;
    CHECK_THAT(hull_volume(cube), WithinAbs(1.0, 1e-12));
    // Extra coplanar points on a face do not change the volume.
    Eigen::MatrixXd more(3, 11);
    more << cube, Eigen::Vector3d(0.5, 0.5, 0.0), Eigen::Vector3d(0.2, 0.7, 1.0);
    CHECK_THAT(hull_volume(more), WithinAbs(1.0, 1e-12));
    Eigen::MatrixXd sq(2, 5);
    sq << 0, 2, 2, 0, 1, 0, 0, 3, 3, 1;
    CHECK_THAT(hull_volume(sq), WithinAbs(6.0, 1e-12));
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd tet(3, 4);
      for (int c = 0; c < 4; ++c) tet.col(c) = gaussian_vector(rng, 3);
      Eigen::Matrix3d e;
      for (int c = 0; c < 3; ++c) e.col(c) = tet.col(c + 1) - tet.col(0);
      CHECK_THAT(hull_volume(tet), WithinRel(std::abs(e.determinant()) / 6.0, 1e-10));
    }
    Eigen::MatrixXd flat(3, 5);
    flat.setZero();
    flat.row(0) << 0, 1, 2, 3, 4;
    flat.row(1) << 0, 1, 0, 1, 5;
    CHECK(hull_volume(flat) == 0.0);
  }
  SECTION("classical MDS reproduces Euclidean configurations") {
    Rng rng(53);
    Eigen::MatrixXd pts(8, 3);
    for (int i = 0; i < 8; ++i) pts.row(i) = gaussian_vector(rng, 3).transpose();
    Eigen::MatrixXd d(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    const MdsChart m = classical_mds(d, 3);
    CHECK(m.rank == 3);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) CHECK_THAT((m.coords.row(i) - m.coords.row(j)).norm(), WithinAbs(d(i, j), 1e-10));
  }
}

TEST_CASE("mesh jacobian", "[natural_map]") {
  Rng rng(54);
  const HPoint c = random_point(HPoint::origin(3), 1.0, rng);
  const std::vector<HPoint> pts = random_net(c, 0.45, 0.07, rng, 30000);
  const MMGraph g = complete_graph(pts, 0.5);
  const double r = 0.22;

  const HIsometry iso = HIsometry::random(3, rng);
  const auto isometric = jacobian_mesh(g, [&](int v) { return iso.apply(pts[v]); }, 0, r, 3);
  CHECK_FALSE(isometric.rank_deficient);
  CHECK(isometric.points > 20);
  CHECK_THAT(isometric.value, WithinAbs(1.0, 0.1));

  const auto constant = jacobian_mesh(g, [&](int) { return c; }, 0, r, 3);
  CHECK(constant.value == 0.0);
  CHECK(constant.rank_deficient);

  const Eigen::VectorXd axis = random_unit_vector(rng, 3);
  const auto line = jacobian_mesh(
      g, [&](int v) { return polar_point(axis, 3.0 * (pts[v].coords()[1])); }, 0, r, 3);
  CHECK(line.value == 0.0);
  CHECK(line.rank_deficient);
}

TEST_CASE("natural map pipeline on a symmetric net", "[natural_map][property]") {
  const auto net = fixtures::symmetric_net(2.2, 0.5, 1.1, 3);
  const auto e = volume_entropy(net.graph, net.center, 1.0, 2.0, 0.25);
  NaturalMapConfig cfg = config(std::max(2.0, 1.5 * (e.h + 3 * e.residual)), e.h);
  cfg.h_residual = e.residual;
  for (int v = 0; v < net.graph.size() && cfg.samples.size() < 6; ++v)
    if (distance(net.points[v], net.points[net.center]) < 1.0) cfg.samples.push_back(v);
  REQUIRE(cfg.samples.size() == 6);
  const NaturalMapRun run = run_natural_map(net.graph, net.points, cfg);
  const int n = 3;
  for (const auto& r : run.samples) {
    CHECK_THAT(r.trace_H, WithinAbs(1.0, 1e-8));
    CHECK(r.min_eig_K_minus_IH >= -1e-8);
    CHECK(r.det_B <= std::pow(n, -n) * (1 + 1e-6));
    CHECK(r.min_eig_cauchy_schwarz >= -1e-8);
    CHECK(r.det_A * r.det_A <= r.det_H * r.det_B * (1 + 1e-6) + 1e-15);
    CHECK(r.jac_formula <= r.jac_chain * (1 + 1e-6));
    CHECK(r.jac_chain <= r.bound * (1 + 1e-6));
    CHECK(std::abs(r.tensors.A.trace()) <= 1 + 1e-8);
  }
  const auto rep = entropy_volume_report(run, net.graph);
  CHECK(rep.gap >= -1e-6);
  CHECK(rep.max_violation <= 1e-6);

  for (std::size_t k = 1; k < net.deck.size(); k += 7)
    for (int x : cfg.samples) {
      const HPoint a = natural_map_point(net.graph, net.points, net.deck[k][x], cfg).point;
      const HPoint b = net.isometry(k).apply(natural_map_point(net.graph, net.points, x, cfg).point);
      CHECK(distance(a, b) < 1e-6);
    }

  const auto mon = h_monitor(net.graph, net.points, cfg.samples.back(), cfg);
  CHECK(mon.size() == 7);
  for (const auto& [s, dev] : mon) CHECK(std::isfinite(dev));
}
