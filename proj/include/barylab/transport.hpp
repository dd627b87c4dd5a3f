#pragma once

// Exact W1 between finitely supported measures: the transportation problem on
// the complete bipartite graph, solved by successive shortest paths with
// node potentials (dense Dijkstra; costs are nonnegative so zero potentials
// are feasible at the start).

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "barylab/errors.hpp"
#include "barylab/measure.hpp"

namespace barylab {

struct Flow {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct CouplingPlan {
  std::vector<Flow> flows;

  [[nodiscard]] double cost(const Eigen::MatrixXd& c) const {
    double total = 0.0;
    for (const auto& f : flows) total += f.mass * c(f.source, f.target);
    return total;
  }
};

struct TransportResult {
  double cost = 0.0;
  CouplingPlan plan;
};

class TransportSolver {
 public:
  TransportSolver(std::vector<double> supply, std::vector<double> demand, Eigen::MatrixXd cost)
      : supply_(std::move(supply)), demand_(std::move(demand)), cost_(std::move(cost)) {
    if (cost_.rows() != static_cast<Eigen::Index>(supply_.size()) ||
        cost_.cols() != static_cast<Eigen::Index>(demand_.size()))
      throw InvalidInput("cost matrix shape does not match the marginals");
    if ((cost_.array() < 0.0).any() || !cost_.allFinite())
      throw InvalidInput("transport costs must be finite and nonnegative");
  }

  TransportResult solve() {
    const std::size_t n1 = supply_.size(), n2 = demand_.size();
    const std::size_t nodes = n1 + n2 + 1;  // sources, sinks, sink terminal
    const std::size_t term = n1 + n2;
    double total = 0.0;
    for (double a : supply_) total += a;
    const double zero_tol = 1e-15 * std::max(total, 1e-300);

    std::vector<double> rem_a = supply_, rem_b = demand_;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
    std::vector<double> pot(nodes, 0.0), dist(nodes);
    std::vector<long> prev(nodes);
    std::vector<char> done(nodes);
    constexpr double inf = std::numeric_limits<double>::infinity();

    auto remaining = [&] {
      double r = 0.0;
      for (double a : rem_a) r += a;
      return r;
    };

    const std::size_t max_rounds = 64 * (n1 + n2) * (n1 + n2) + 1024;
    for (std::size_t round = 0; remaining() > zero_tol; ++round) {
      if (round > max_rounds) throw Error("transport solver failed to terminate");
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(prev.begin(), prev.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      for (std::size_t i = 0; i < n1; ++i)
        if (rem_a[i] > 0.0) dist[i] = std::max(0.0, -pot[i]);

      for (;;) {
        std::size_t u = nodes;
        double best = inf;
        for (std::size_t v = 0; v < nodes; ++v)
          if (!done[v] && dist[v] < best) best = dist[v], u = v;
        if (u == nodes || u == term) break;
        done[u] = 1;
        if (u < n1) {
          for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t v = n1 + j;
            if (done[v]) continue;
            const double rc = std::max(0.0, cost_(u, j) + pot[u] - pot[v]);
            if (dist[u] + rc < dist[v]) dist[v] = dist[u] + rc, prev[v] = static_cast<long>(u);
          }
        } else {
          const std::size_t j = u - n1;
          if (rem_b[j] > 0.0 && !done[term]) {
            const double rc = std::max(0.0, pot[u] - pot[term]);
            if (dist[u] + rc < dist[term]) dist[term] = dist[u] + rc, prev[term] = static_cast<long>(u);
          }
          for (std::size_t i = 0; i < n1; ++i) {
            if (done[i] || !(x(i, j) > 0.0)) continue;
            const double rc = std::max(0.0, -cost_(i, j) + pot[u] - pot[i]);
            if (dist[u] + rc < dist[i]) dist[i] = dist[u] + rc, prev[i] = static_cast<long>(u);
          }
        }
      }
      if (dist[term] == inf) throw UnbalancedMeasures("no augmenting path; marginals are unbalanced");

      // Path: terminal <- sink <- source (<- sink <- source)* ; the first source starts at S.
      std::vector<std::size_t> path;
      for (long v = static_cast<long>(term); v != -1; v = prev[static_cast<std::size_t>(v)])
        path.push_back(static_cast<std::size_t>(v));
      std::reverse(path.begin(), path.end());  // source ... sink, terminal
      double delta = std::min(rem_a[path.front()], rem_b[path[path.size() - 2] - n1]);
      for (std::size_t k = 1; k + 1 < path.size(); k += 2) {
        // path[k] is a sink; if followed by a source it is a reverse arc
        if (k + 2 < path.size())
          delta = std::min(delta, x(path[k + 1], path[k] - n1));
      }

      auto drain = [&](double& v) { v = (v - delta <= zero_tol) ? 0.0 : v - delta; };
      drain(rem_a[path.front()]);
      drain(rem_b[path[path.size() - 2] - n1]);
      for (std::size_t k = 0; k + 2 < path.size(); k += 2) {
        const std::size_t i = path[k], j = path[k + 1] - n1;
        x(i, j) += delta;
        if (k + 3 < path.size()) {
          double& back = x(path[k + 2], j);
          drain(back);
        }
      }

      const double cap = dist[term];
      for (std::size_t v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], cap);
    }

    TransportResult out;
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        if (x(i, j) > 0.0) out.plan.flows.push_back({i, j, x(i, j)});
    out.cost = out.plan.cost(cost_);
    return out;
  }

 private:
  std::vector<double> supply_;
  std::vector<double> demand_;
  Eigen::MatrixXd cost_;
};

/// Largest absolute deviation of the plan's marginals from (a, b).
inline double marginal_error(const CouplingPlan& plan, const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> ra(a.size(), 0.0), rb(b.size(), 0.0);
  for (const auto& f : plan.flows) {
    if (f.mass < 0.0) return std::numeric_limits<double>::infinity();
    ra.at(f.source) += f.mass;
    rb.at(f.target) += f.mass;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(ra[i] - a[i]));
  for (std::size_t j = 0; j < b.size(); ++j) err = std::max(err, std::abs(rb[j] - b[j]));
  return err;
}

template <class M>
std::vector<double> weights_of(const M& mu) {
  std::vector<double> w;
  w.reserve(mu.size());
  for (const auto& a : mu.atoms()) w.push_back(a.w);
  return w;
}

/// W1(mu, nu) under `metric(site_of_mu, site_of_nu)`, with an optimal plan whose
/// indices refer to atom positions in mu and nu.
template <class M1, class M2, class Metric>
TransportResult wasserstein1(const M1& mu, const M2& nu, Metric&& metric) {
  const double m1 = mu.mass(), m2 = nu.mass();
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw EmptyMeasure("W1 needs two nonzero measures");
  if (std::abs(m1 - m2) > 1e-9 * std::max(m1, m2)) {
    std::ostringstream os;
    os << "unbalanced measures: masses " << m1 << " and " << m2;
    throw UnbalancedMeasures(os.str());
  }
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) cost(i, j) = metric(a[i].site, b[j].site);
  std::vector<double> demand = weights_of(nu);
  for (double& w : demand) w *= m1 / m2;
  return TransportSolver(weights_of(mu), std::move(demand), std::move(cost)).solve();
}

inline TransportResult wasserstein1(const PointMeasure& mu, const PointMeasure& nu) {
  return wasserstein1(mu, nu, [](const hyp::HPoint& p, const hyp::HPoint& q) {
    return hyp::distance(p, q);
  });
}

}  // namespace barylab
