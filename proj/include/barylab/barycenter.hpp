#pragma once

#include <cmath>
#include <optional>
#include <sstream>

#include "barylab/errors.hpp"
#include "barylab/hyperbolic.hpp"
#include "barylab/measure.hpp"

namespace barylab {

/// Gradient descent ran out of iterations; the best iterate is attached.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, hyp::HPoint best, double gradient_norm)
      : Error(what), best_(std::move(best)), gradient_norm_(gradient_norm) {}
  [[nodiscard]] const hyp::HPoint& best() const noexcept { return best_; }
  [[nodiscard]] double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  hyp::HPoint best_;
  double gradient_norm_;
};

struct BarycenterOptions {
  double tol = -1.0;          // gradient-norm target; negative means 1e-9 * mass
  int max_iter = 10000;
  double max_step = 0.5;
  std::optional<hyp::HPoint> basepoint;  // minimize B_nu relative to this point instead
  std::optional<hyp::HPoint> initial;
};

struct BarycenterResult {
  hyp::HPoint point;
  double gradient_norm = 0.0;
  int iterations = 0;
  double objective = 0.0;
};

/// y -> sum w d(y, z)^2
inline double barycenter_objective(const hyp::HPoint& y, const PointMeasure& nu) {
  double f = 0.0;
  for (const auto& a : nu.atoms()) {
    const double d = hyp::distance(y, a.site);
    f += a.w * d * d;
  }
  return f;
}

/// Basepoint form: y -> sum w (d(y, z)^2 - d(o, z)^2). Same argmin for every o.
inline double busemann_objective(const hyp::HPoint& y, const hyp::HPoint& o, const PointMeasure& nu) {
  double f = 0.0;
  for (const auto& a : nu.atoms()) {
    const double d = hyp::distance(y, a.site), e = hyp::distance(o, a.site);
    f += a.w * (d - e) * (d + e);
  }
  return f;
}

/// Riemannian gradient -2 sum w log_y(z), as an ambient tangent vector at y.
inline Eigen::VectorXd barycenter_gradient(const hyp::HPoint& y, const PointMeasure& nu) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(y.dim() + 1);
  for (const auto& a : nu.atoms()) g -= 2.0 * a.w * hyp::log_map(y, a.site).vec;
  return hyp::project_to_tangent(y, g);
}

/// Weighted Minkowski mean pushed back onto the upper sheet.
inline hyp::HPoint minkowski_mean(const PointMeasure& nu) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(nu.atoms().front().site.dim() + 1);
  for (const auto& a : nu.atoms()) m += a.w * a.site.coords();
  return hyp::HPoint::project(m);
}

inline BarycenterResult barycenter(const PointMeasure& measure, const BarycenterOptions& opt = {}) {
  const PointMeasure nu = measure.without_zero_atoms();
  const double mass = nu.mass();
  if (nu.empty() || !(mass > 0.0)) throw EmptyMeasure("barycenter of the zero measure");
  const int dim = nu.atoms().front().site.dim();
  for (const auto& a : nu.atoms())
    if (a.site.dim() != dim) throw InvalidPoint("atoms of mixed dimension");
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-9 * mass;

  auto objective = [&](const hyp::HPoint& y) {
    return opt.basepoint ? busemann_objective(y, *opt.basepoint, nu) : barycenter_objective(y, nu);
  };

  // Rounding floor of the objective; below it Armijo cannot tell steps apart.
  double scale = 1.0;
  if (opt.basepoint)
    for (const auto& a : nu.atoms()) {
      const double e = hyp::distance(*opt.basepoint, a.site);
      scale += a.w * e * e;
    }

  if (nu.size() == 1) {
    const hyp::HPoint& p = nu.atoms().front().site;
    return {p, 0.0, 0, objective(p)};
  }

  hyp::HPoint y = opt.initial ? *opt.initial : minkowski_mean(nu);
  double fy = objective(y);
  Eigen::VectorXd g = barycenter_gradient(y, nu);
  double gn = std::sqrt(std::max(0.0, hyp::minkowski_norm_sq(g)));
  // The objective is 2*mass-strongly convex, so 1/(2 mass) is the Newton-like step.
  const double alpha0 = 1.0 / (2.0 * mass);
  int it = 0;
  for (; it < opt.max_iter && gn > tol; ++it) {
    double alpha = std::min(alpha0, opt.max_step / gn);
    bool moved = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      const hyp::HPoint cand = hyp::exp_map({y, -alpha * g});
      const double fc = objective(cand);
      const double slack = 1e-14 * (std::abs(fy) + scale);
      if (fc <= fy - 1e-4 * alpha * gn * gn + slack) {
        y = cand, fy = fc, moved = true;
        break;
      }
    }
    if (!moved) break;  // rounding floor reached
    g = barycenter_gradient(y, nu);
    gn = std::sqrt(std::max(0.0, hyp::minkowski_norm_sq(g)));
  }
  if (gn > tol) {
    std::ostringstream os;
    os << "barycenter did not converge after " << it << " iterations (gradient norm " << gn << ")";
    throw SolverFailure(os.str(), y, gn);
  }
  return {y, gn, it, fy};
}

inline BarycenterResult barycenter(const PointMeasure& nu, double tol) {
  BarycenterOptions opt;
  opt.tol = tol;
  return barycenter(nu, opt);
}

/// bary(t delta_fx + (1 - t) sigma); sigma must be normalized.
inline hyp::HPoint psi_homotopy(double t, const hyp::HPoint& fx, const PointMeasure& sigma,
                                double tol = -1.0) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("homotopy parameter outside [0, 1]");
  if (std::abs(sigma.mass() - 1.0) > 1e-9) throw InvalidMeasure("sigma must be normalized");
  if (t == 1.0) return fx;
  PointMeasure mix = sigma.scaled(1.0 - t);
  mix.add(fx, t);
  return barycenter(mix, tol).point;
}

}  // namespace barylab
