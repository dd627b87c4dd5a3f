#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "barylab/barycenter.hpp"
#include "barylab/errors.hpp"
#include "barylab/graph.hpp"
#include "barylab/hyperbolic.hpp"
#include "barylab/local_geometry.hpp"
#include "barylab/measure.hpp"
#include "barylab/parallel.hpp"

namespace barylab {

struct NaturalMapConfig {
  double s = 0.0;
  double truncation_radius = std::numeric_limits<double>::infinity();
  double tail_tolerance = 1e-6;  // relative to the retained mass
  std::vector<int> samples;
  double h_estimate = 0.0;
  double h_residual = 0.0;
  bool finite_space = true;      // false: the graph is a truncated ball of an infinite cover
  double solver_tol = 1e-9;
  double rho_exclusion = 1e-9;
  double mesh_radius = 0.0;      // > 0 also evaluates the mesh Jacobian of F_s
  unsigned threads = 1;

  void validate() const {
    if (!std::isfinite(s) || !(s > 0.0)) throw ConfigError("s must be positive and finite");
    if (!(s > h_estimate + 3.0 * h_residual)) {
      std::ostringstream os;
      os << "s = " << s << " must exceed h + 3*residual = " << h_estimate + 3.0 * h_residual;
      throw ConfigError(os.str());
    }
    if (!(truncation_radius > 0.0)) throw ConfigError("truncation radius must be positive");
    if (!(tail_tolerance > 0.0)) throw ConfigError("tail tolerance must be positive");
    if (!finite_space && !std::isfinite(truncation_radius))
      throw ConfigError("a truncated cover needs a finite truncation radius");
  }
};

struct ExpMeasure {
  VertexMeasure mu;
  double tail_bound = 0.0;  // absolute bound on the discarded mass
  std::vector<double> dist; // graph distances from x
};

/// mu_x^s: vertex z within the truncation radius gets measure(z) e^{-s d(x,z)}.
/// On a finite space the discarded tail is summed exactly; on a truncated
/// cover it is bounded by a geometric series from the observed ball growth
/// m(B(x,k)) <= C e^{(h+eps)k}, eps = (s-h)/2.
inline ExpMeasure mu_x_s(const MMGraph& g, int x, const NaturalMapConfig& cfg) {
  cfg.validate();
  g.check_vertex(x);
  ExpMeasure out;
  out.dist = g.distances_from(x);
  const double radius = cfg.truncation_radius;
  double tail = 0.0;
  for (int z = 0; z < g.size(); ++z) {
    const double d = out.dist[static_cast<std::size_t>(z)];
    const double w = g.measure(z) * std::exp(-cfg.s * d);
    if (d <= radius)
      out.mu.add(z, w);
    else if (cfg.finite_space)
      tail += w;
  }
  const double mass = out.mu.mass();
  if (cfg.finite_space) {
    out.tail_bound = tail;
    if (tail > cfg.tail_tolerance * mass) {
      // Smallest radius whose exact tail is within tolerance.
      std::vector<std::pair<double, double>> byd;
      for (int z = 0; z < g.size(); ++z)
        byd.push_back({out.dist[static_cast<std::size_t>(z)], g.measure(z) * std::exp(-cfg.s * out.dist[static_cast<std::size_t>(z)])});
      std::sort(byd.begin(), byd.end());
      double total = 0.0;
      for (const auto& p : byd) total += p.second;
      double kept = 0.0, suggest = byd.back().first;
      for (const auto& p : byd) {
        kept += p.second;
        if (total - kept <= cfg.tail_tolerance * kept) {
          suggest = p.first;
          break;
        }
      }
      std::ostringstream os;
      os << "truncation radius " << radius << " leaves tail mass " << tail << " (tolerance "
         << cfg.tail_tolerance * mass << ")";
      throw TruncationTooSmall(os.str(), suggest);
    }
    return out;
  }
  const double eps = 0.5 * (cfg.s - cfg.h_estimate);
  const double rate = cfg.h_estimate + eps;
  std::vector<int> order(static_cast<std::size_t>(g.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return out.dist[static_cast<std::size_t>(a)] < out.dist[static_cast<std::size_t>(b)]; });
  double c = 0.0, ball = 0.0;
  std::size_t i = 0;
  for (int k = 1; k <= static_cast<int>(std::floor(radius)); ++k) {
    while (i < order.size() && out.dist[static_cast<std::size_t>(order[i])] <= k) ball += g.measure(order[i++]);
    c = std::max(c, ball * std::exp(-rate * k));
  }
  const double q = std::exp(rate - cfg.s);
  const double k0 = std::floor(radius);
  out.tail_bound = c * std::exp(rate) * std::exp((rate - cfg.s) * k0) / (1.0 - q);
  if (out.tail_bound > cfg.tail_tolerance * mass) {
    const double suggest =
        std::ceil(std::log(cfg.tail_tolerance * mass * (1.0 - q) / (c * std::exp(rate))) / (rate - cfg.s));
    std::ostringstream os;
    os << "truncation radius " << radius << " leaves a tail bound of " << out.tail_bound << " (tolerance "
       << cfg.tail_tolerance * mass << ")";
    throw TruncationTooSmall(os.str(), suggest);
  }
  return out;
}

inline void check_image(const MMGraph& g, const std::vector<hyp::HPoint>& f) {
  if (static_cast<int>(f.size()) != g.size()) throw DomainError("f must be defined on every vertex");
  for (const auto& p : f)
    if (p.dim() != f.front().dim()) throw InvalidPoint("image points of mixed dimension");
}

/// F_s(x) = bary(normalized f_* mu_x^s).
inline BarycenterResult natural_map_point(const MMGraph& g, const std::vector<hyp::HPoint>& f, int x,
                                          const NaturalMapConfig& cfg, const ExpMeasure* mu = nullptr) {
  check_image(g, f);
  const ExpMeasure local = mu ? ExpMeasure{} : mu_x_s(g, x, cfg);
  const ExpMeasure& m = mu ? *mu : local;
  const PointMeasure sigma = normalize(pushforward_to_points(m.mu, f));
  return barycenter(sigma, cfg.solver_tol);
}

/// Neighbour directions at a vertex from classical MDS of its closed 1-ring.
struct SourceChart {
  int x = 0;
  std::vector<int> ring;
  std::vector<double> lengths;   // d(x, u)
  Eigen::MatrixXd directions;    // unit rows e_u
  Eigen::MatrixXd pinv;          // least-squares solver: G = pinv * b
};

inline SourceChart source_chart(const MMGraph& g, int x, int dim) {
  SourceChart ch;
  ch.x = x;
  for (const auto& h : g.adjacency(x))
    if (h.to != x && std::find(ch.ring.begin(), ch.ring.end(), h.to) == ch.ring.end()) ch.ring.push_back(h.to);
  std::sort(ch.ring.begin(), ch.ring.end());
  const int m = static_cast<int>(ch.ring.size());
  if (m < dim) {
    std::ostringstream os;
    os << "vertex " << g.label(x) << " has " << m << " neighbours, fewer than the dimension " << dim;
    throw RankDeficient(os.str());
  }
  std::vector<int> pts{x};
  pts.insert(pts.end(), ch.ring.begin(), ch.ring.end());
  double reach = 0.0;
  for (const auto& h : g.adjacency(x)) reach = std::max(reach, g.edges()[static_cast<std::size_t>(h.edge)].len);
  Eigen::MatrixXd dist(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    const auto d = g.distances_from(pts[static_cast<std::size_t>(i)], 2.0 * reach * (1.0 + 1e-12));
    for (int j = 0; j <= m; ++j) dist(i, j) = d[static_cast<std::size_t>(pts[static_cast<std::size_t>(j)])];
  }
  dist = (0.5 * (dist + dist.transpose())).eval();
  const MdsChart mds = classical_mds(dist, dim);
  ch.directions.resize(m, dim);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd v = (mds.coords.row(i + 1) - mds.coords.row(0)).transpose();
    if (!(v.norm() > 0.0)) throw RankDeficient("neighbour collapses onto the vertex in the chart");
    ch.directions.row(i) = v.transpose() / v.norm();
    ch.lengths.push_back(dist(0, i + 1));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ch.directions);
  const auto sv = svd.singularValues();
  if (sv.size() < dim || sv[dim - 1] <= 1e-6 * sv[0]) {
    std::ostringstream os;
    os << "neighbour directions at " << g.label(x) << " span fewer than " << dim << " dimensions";
    throw RankDeficient(os.str());
  }
  ch.pinv = (ch.directions.transpose() * ch.directions).ldlt().solve(ch.directions.transpose());
  return ch;
}

struct NaturalTensors {
  Eigen::MatrixXd H, K, L, A, B;
  Eigen::MatrixXd frame;       // orthonormal tangent basis at y, (N+1) x N
  double eta_norm = 0.0;       // total mass of rho * sigma before normalization
  double excluded_mass = 0.0;  // sigma-mass at rho < exclusion threshold
  int image_atoms = 0;
};

/// H, K, L, A, B at y = F_s(x) in an orthonormal frame at y (rows) and the
/// source chart at x (columns of A and B). eta is proportional to rho_z sigma(z).
inline NaturalTensors assemble_tensors(const MMGraph& g, const std::vector<hyp::HPoint>& f, int x,
                                       const hyp::HPoint& y, const ExpMeasure& mu, const NaturalMapConfig& cfg) {
  check_image(g, f);
  const int n = y.dim();
  const SourceChart chart = source_chart(g, x, n);
  std::vector<std::vector<double>> ring_dist;
  for (int u : chart.ring) ring_dist.push_back(g.distances_from(u));

  // Group source atoms by image point; G at an image point is the weighted average.
  struct Acc {
    double w = 0.0;
    Eigen::VectorXd gw;
  };
  std::map<hyp::HPoint, Acc, hyp::HPointLess> groups;
  const double total = mu.mu.mass();
  const int m = static_cast<int>(chart.ring.size());
  Eigen::VectorXd b(m);
  for (const auto& atom : mu.mu.atoms()) {
    const int z = atom.site;
    const double dxz = mu.dist[static_cast<std::size_t>(z)];
    for (int i = 0; i < m; ++i)
      b[i] = (ring_dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] - dxz) / chart.lengths[static_cast<std::size_t>(i)];
    Eigen::VectorXd gz = chart.pinv * b;
    if (gz.norm() > 1.0) gz /= gz.norm();
    auto& acc = groups[f[static_cast<std::size_t>(z)]];
    if (acc.gw.size() == 0) acc.gw = Eigen::VectorXd::Zero(n);
    acc.w += atom.w / total;
    acc.gw += (atom.w / total) * gz;
  }

  const hyp::TangentFrame frame = hyp::TangentFrame::at(y);
  NaturalTensors t{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                   Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), frame.basis};
  for (const auto& [z, acc] : groups) {
    const double rho = hyp::distance(y, z);
    if (rho < cfg.rho_exclusion) {
      t.excluded_mass += acc.w;
      continue;
    }
    const double eta = rho * acc.w;
    const Eigen::VectorXd gy = frame.coords(hyp::grad_distance(y, z).vec);
    const Eigen::VectorXd gx = acc.gw / acc.w;
    t.H += eta * gy * gy.transpose();
    t.K += eta * (1.0 / std::tanh(rho)) * (Eigen::MatrixXd::Identity(n, n) - gy * gy.transpose());
    t.L += (eta / rho) * gy * gy.transpose();
    t.A += eta * gy * gx.transpose();
    t.B += eta * gx * gx.transpose();
    t.eta_norm += eta;
    ++t.image_atoms;
  }
  if (!(t.eta_norm > 0.0)) throw DegeneratePoint("sigma is concentrated at F_s(x); eta is undefined");
  for (Eigen::MatrixXd* mat : {&t.H, &t.K, &t.L, &t.A, &t.B}) *mat /= t.eta_norm;
  return t;
}

struct JacobianValue {
  double value = 0.0;
  double condition = 0.0;  // of L + K
};

/// |det(s (L+K)^{-1} A)|.
inline JacobianValue jacobian_formula(const Eigen::MatrixXd& L, const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                      double s) {
  const Eigen::MatrixXd lk = L + K;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lk);
  const auto sv = svd.singularValues();
  JacobianValue out;
  out.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(out.condition < 1e12)) throw DegeneratePoint("L + K is singular");
  const double n = static_cast<double>(A.rows());
  out.value = std::pow(s, n) * std::abs(A.determinant()) / std::abs(lk.determinant());
  return out;
}

struct MeshJacobian {
  double value = 0.0;
  bool rank_deficient = false;
  double source_volume = 0.0;
  double image_volume = 0.0;
  int points = 0;
};

/// Volume ratio image/source over the ball B(x, r): the source ball is
/// embedded by MDS of its graph distances, the image by normal coordinates
/// at image(x). An O(r)-accurate estimator only.
inline MeshJacobian jacobian_mesh(const MMGraph& g, const std::function<hyp::HPoint(int)>& image, int x, double r,
                                  int dim) {
  const auto dx = g.distances_from(x, r);
  std::vector<int> ball;
  for (int v = 0; v < g.size(); ++v)
    if (dx[static_cast<std::size_t>(v)] <= r) ball.push_back(v);
  const int m = static_cast<int>(ball.size());
  if (m < dim + 1) throw DegenerateGeometry("ball has fewer than N+1 vertices");
  Eigen::MatrixXd dist(m, m);
  for (int i = 0; i < m; ++i) {
    const auto d = g.distances_from(ball[static_cast<std::size_t>(i)], 2.0 * r + 1e-12);
    for (int j = 0; j < m; ++j) dist(i, j) = d[static_cast<std::size_t>(ball[static_cast<std::size_t>(j)])];
  }
  dist = (0.5 * (dist + dist.transpose())).eval();
  const MdsChart mds = classical_mds(dist, dim);
  MeshJacobian out;
  out.points = m;
  out.source_volume = hull_volume(mds.coords.transpose());
  if (!(out.source_volume > 0.0)) throw DegenerateGeometry("source ball is not N-dimensional");

  const hyp::HPoint y = image(x);
  const hyp::TangentFrame frame = hyp::TangentFrame::at(y);
  Eigen::MatrixXd cloud(dim, m);
  for (int i = 0; i < m; ++i) cloud.col(i) = frame.coords(hyp::log_map(y, image(ball[static_cast<std::size_t>(i)])).vec);
  const Eigen::MatrixXd centred = cloud.colwise() - cloud.rowwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
  const auto sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[dim - 1] <= 1e-9 * sv[0]) {
    out.rank_deficient = true;
    return out;
  }
  out.image_volume = hull_volume(cloud);
  out.value = out.image_volume / out.source_volume;
  return out;
}

struct SampleRecord {
  int x = 0;
  hyp::HPoint F = hyp::HPoint::origin(1);
  NaturalTensors tensors;
  double trace_H = 0.0;
  double h_deviation = 0.0;  // ||H - I/N||_F
  double det_H = 0.0, det_K = 0.0, det_B = 0.0, det_A = 0.0;
  double min_eig_K_minus_IH = 0.0;
  double min_eig_cauchy_schwarz = 0.0;  // of [[H, A], [A^T, B]]
  double jac_formula = 0.0;
  double condition = 0.0;
  double jac_chain = 0.0;  // sqrt((s^2/N)^N det H / det K^2)
  double jac_mesh = std::numeric_limits<double>::quiet_NaN();
  bool mesh_rank_deficient = false;
  double bound = 0.0;      // (s/(N-1))^N
  double gap = 0.0;        // bound - jac_formula
  double tail_bound = 0.0;
  int iterations = 0;
};

struct NaturalMapRun {
  NaturalMapConfig config;
  int dim = 0;
  std::vector<SampleRecord> samples;
};

inline SampleRecord evaluate_sample(const MMGraph& g, const std::vector<hyp::HPoint>& f, int x,
                                    const NaturalMapConfig& cfg) {
  const int n = f.front().dim();
  const ExpMeasure mu = mu_x_s(g, x, cfg);
  const BarycenterResult bar = natural_map_point(g, f, x, cfg, &mu);
  SampleRecord r;
  r.x = x;
  r.F = bar.point;
  r.iterations = bar.iterations;
  r.tail_bound = mu.tail_bound;
  r.tensors = assemble_tensors(g, f, x, bar.point, mu, cfg);
  const auto& t = r.tensors;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  r.trace_H = t.H.trace();
  r.h_deviation = (t.H - id / n).norm();
  r.det_H = t.H.determinant();
  r.det_K = t.K.determinant();
  r.det_B = t.B.determinant();
  r.det_A = t.A.determinant();
  r.min_eig_K_minus_IH = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t.K - (id - t.H)).eigenvalues()[0];
  Eigen::MatrixXd block(2 * n, 2 * n);
  block << t.H, t.A, t.A.transpose(), t.B;
  r.min_eig_cauchy_schwarz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues()[0];
  const JacobianValue jv = jacobian_formula(t.L, t.K, t.A, cfg.s);
  r.jac_formula = jv.value;
  r.condition = jv.condition;
  r.jac_chain = std::sqrt(std::pow(cfg.s * cfg.s / n, n) * std::max(r.det_H, 0.0)) / std::abs(r.det_K);
  r.bound = std::pow(cfg.s / (n - 1), n);
  r.gap = r.bound - r.jac_formula;
  if (cfg.mesh_radius > 0.0) {
    auto F = [&](int v) { return natural_map_point(g, f, v, cfg).point; };
    const MeshJacobian mj = jacobian_mesh(g, F, x, cfg.mesh_radius, n);
    r.jac_mesh = mj.value;
    r.mesh_rank_deficient = mj.rank_deficient;
  }
  return r;
}

inline NaturalMapRun run_natural_map(const MMGraph& g, const std::vector<hyp::HPoint>& f, const NaturalMapConfig& cfg) {
  cfg.validate();
  check_image(g, f);
  if (f.front().dim() < 2) throw ConfigError("target dimension must be at least 2");
  NaturalMapRun run;
  run.config = cfg;
  run.dim = f.front().dim();
  run.samples.resize(cfg.samples.size());
  parallel_for(cfg.samples.size(), cfg.threads,
               [&](std::size_t i) { run.samples[i] = evaluate_sample(g, f, cfg.samples[i], cfg); });
  return run;
}

struct EntropyVolumeReport {
  double integral = 0.0;      // sum of jac_formula(x) m(x) over samples
  double bound = 0.0;         // (s/h0)^N * sum of m(x)
  double gap = 0.0;           // bound - integral
  double max_violation = 0.0; // max (jac - pointwise bound) / pointwise bound
  double h0 = 0.0;
};

inline EntropyVolumeReport entropy_volume_report(const NaturalMapRun& run, const MMGraph& g) {
  EntropyVolumeReport rep;
  rep.h0 = run.dim - 1;
  const double pointwise = std::pow(run.config.s / rep.h0, run.dim);
  double mass = 0.0;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& r : run.samples) {
    rep.integral += r.jac_formula * g.measure(r.x);
    mass += g.measure(r.x);
    rep.max_violation = std::max(rep.max_violation, (r.jac_formula - pointwise) / pointwise);
  }
  rep.bound = pointwise * mass;
  rep.gap = rep.bound - rep.integral;
  return rep;
}

/// s_k = h (1 + 2^{-k}), k = 0..steps-1.
inline std::vector<double> s_grid(double h, int steps = 7) {
  std::vector<double> out;
  for (int k = 0; k < steps; ++k) out.push_back(h * (1.0 + std::ldexp(1.0, -k)));
  return out;
}

/// ||H_x^s - I/N||_F along the s-grid; a diagnostic of H -> I/N as s decreases to h.
inline std::vector<std::pair<double, double>> h_monitor(const MMGraph& g, const std::vector<hyp::HPoint>& f, int x,
                                                         NaturalMapConfig cfg, int steps = 7) {
  std::vector<std::pair<double, double>> out;
  const int n = f.front().dim();
  for (double s : s_grid(cfg.h_estimate + 3.0 * cfg.h_residual, steps)) {
    cfg.s = s * (1.0 + 1e-12);
    const ExpMeasure mu = mu_x_s(g, x, cfg);
    const auto bar = natural_map_point(g, f, x, cfg, &mu);
    const auto t = assemble_tensors(g, f, x, bar.point, mu, cfg);
    out.push_back({cfg.s, (t.H - Eigen::MatrixXd::Identity(n, n) / n).norm()});
  }
  return out;
}

}  // namespace barylab
