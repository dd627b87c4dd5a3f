#pragma once

// Real hyperbolic space H^N in the hyperboloid model
//   { x in R^{N+1} : -x0^2 + x1^2 + ... + xN^2 = -1, x0 > 0 }.
// Tangent vectors at p are the Minkowski-orthogonal complement of p.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "barylab/errors.hpp"
#include "barylab/random.hpp"

namespace barylab::hyp {

/// Default tolerances; every entry point accepts an override.
struct Tolerances {
  double sheet = 1e-10;          // |<x,x>_M + 1| for points
  double tangent = 1e-10;        // |<p,v>_M| for tangent vectors
  double isometry = 1e-9;        // entrywise |L^T J L - J|
  double ill_conditioned = 1e-9; // -<p,q>_M >= 1 - this
  double degenerate = 1e-12;     // y == z threshold for derivatives of d(., z)
};

inline double minkowski_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

inline double minkowski_norm_sq(const Eigen::VectorXd& a) { return minkowski_dot(a, a); }

class HPoint {
 public:
  HPoint() = default;

  /// Validates the sheet constraint and stores the re-projected coordinates.
  static HPoint from_coords(const Eigen::VectorXd& x, const Tolerances& tol = {}) {
    if (x.size() < 3)
      throw InvalidPoint("hyperbolic point needs N+1 >= 3 coordinates");
    if (!x.allFinite()) throw InvalidPoint("hyperbolic point has non-finite coordinates");
    const double q = minkowski_norm_sq(x);
    if (std::abs(q + 1.0) > tol.sheet * std::max(1.0, x[0] * x[0]) || x[0] <= 0.0) {
      std::ostringstream os;
      os << "point is off the upper sheet: <x,x>_M = " << q << ", x0 = " << x[0];
      throw InvalidPoint(os.str());
    }
    return project(x);
  }

  /// Projects a timelike vector with x0 > 0 onto the sheet: scale by
  /// 1/sqrt(-<x,x>_M), then recompute x0 from the spatial part so far-out
  /// points do not suffer from the cancellation in <x,x>_M.
  static HPoint project(Eigen::VectorXd x) {
    if (!x.allFinite() || x[0] <= 0.0) throw InvalidPoint("cannot project onto the upper sheet");
    const double q = minkowski_norm_sq(x);
    const double noise = 1e-12 * x[0] * x[0];
    if (std::abs(q + 1.0) > noise) {
      if (q > noise) throw InvalidPoint("cannot project a non-timelike vector");
      if (q < -noise) x /= std::sqrt(-q);
    }
    const auto n = x.size() - 1;
    x[0] = std::sqrt(1.0 + x.tail(n).squaredNorm());
    return HPoint(std::move(x));
  }

  /// Lifts spatial coordinates (x1..xN); x0 is determined.
  static HPoint from_spatial(const Eigen::VectorXd& s) {
    Eigen::VectorXd x(s.size() + 1);
    x[0] = std::sqrt(1.0 + s.squaredNorm());
    x.tail(s.size()) = s;
    return HPoint(x);
  }

  static HPoint origin(int dim) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim + 1);
    x[0] = 1.0;
    return HPoint(x);
  }

  [[nodiscard]] int dim() const { return static_cast<int>(x_.size()) - 1; }
  [[nodiscard]] const Eigen::VectorXd& coords() const { return x_; }
  [[nodiscard]] double operator[](Eigen::Index i) const { return x_[i]; }

  friend bool operator==(const HPoint& a, const HPoint& b) {
    return a.x_.size() == b.x_.size() && a.x_ == b.x_;
  }

 private:
  explicit HPoint(Eigen::VectorXd x) : x_(std::move(x)) {}
  Eigen::VectorXd x_;
};

/// Lexicographic order on coordinates, used to merge atoms.
struct HPointLess {
  bool operator()(const HPoint& a, const HPoint& b) const {
    const auto& x = a.coords();
    const auto& y = b.coords();
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(),
                                        y.data() + y.size());
  }
};

struct HTangent {
  HPoint base;
  Eigen::VectorXd vec;

  static HTangent make(const HPoint& base, const Eigen::VectorXd& vec, const Tolerances& tol = {}) {
    if (vec.size() != base.coords().size())
      throw InvalidPoint("tangent vector dimension mismatch");
    const double scale = std::max(1.0, vec.norm() * base.coords().norm());
    if (std::abs(minkowski_dot(base.coords(), vec)) > tol.tangent * scale)
      throw InvalidPoint("vector is not tangent to the hyperboloid at its base");
    return {base, vec};
  }

  static HTangent zero(const HPoint& p) {
    return {p, Eigen::VectorXd::Zero(p.coords().size())};
  }

  [[nodiscard]] double norm() const { return std::sqrt(std::max(0.0, minkowski_norm_sq(vec))); }
};

/// Removes the component along p: v + <p,v>_M p.
inline Eigen::VectorXd project_to_tangent(const HPoint& p, const Eigen::VectorXd& v) {
  return v + minkowski_dot(p.coords(), v) * p.coords();
}

inline void check_same_dim(const HPoint& p, const HPoint& q) {
  if (p.dim() != q.dim()) throw InvalidPoint("points live in different dimensions");
}

inline double distance(const HPoint& p, const HPoint& q, const Tolerances& tol = {}) {
  check_same_dim(p, q);
  const double c = -minkowski_dot(p.coords(), q.coords());
  if (c < 1.0 - tol.ill_conditioned) {
    std::ostringstream os;
    os << "ill-conditioned pair: -<p,q>_M = " << c;
    throw InvalidPoint(os.str());
  }
  if (c > 2.0) return std::acosh(c);
  // Chord form 2 asinh(|p-q|_M / 2) is accurate near the diagonal.
  const Eigen::VectorXd w = p.coords() - q.coords();
  const double chord = std::sqrt(std::max(0.0, minkowski_norm_sq(w)));
  return 2.0 * std::asinh(0.5 * chord);
}

inline HPoint exp_map(const HTangent& v) {
  const double t = v.norm();
  if (t == 0.0) return v.base;
  const Eigen::VectorXd x = std::cosh(t) * v.base.coords() + (std::sinh(t) / t) * v.vec;
  return HPoint::project(x);
}

inline HTangent log_map(const HPoint& p, const HPoint& q, const Tolerances& tol = {}) {
  const double d = distance(p, q, tol);
  if (d == 0.0) return HTangent::zero(p);
  Eigen::VectorXd u = project_to_tangent(p, q.coords());
  const double un = std::sqrt(std::max(0.0, minkowski_norm_sq(u)));
  if (un == 0.0) return HTangent::zero(p);
  return {p, (d / un) * u};
}

/// Unit tangent at y pointing away from z; the gradient of d(., z).
inline HTangent grad_distance(const HPoint& y, const HPoint& z, const Tolerances& tol = {}) {
  const HTangent v = log_map(y, z, tol);
  const double d = v.norm();
  if (d < tol.degenerate) throw DegenerateGeometry("gradient of d(., z) is undefined at y = z");
  return {y, -v.vec / d};
}

/// Minkowski-orthonormal basis of the tangent space at a point, stored as the
/// columns of an (N+1) x N matrix. Deterministic in the base point.
struct TangentFrame {
  HPoint base;
  Eigen::MatrixXd basis;

  static TangentFrame at(const HPoint& p) {
    const int n = p.dim();
    Eigen::MatrixXd e(n + 1, n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
      v[k + 1] = 1.0;
      v = project_to_tangent(p, v);
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < k; ++j) v -= minkowski_dot(e.col(j), v) * e.col(j);
      v /= std::sqrt(minkowski_norm_sq(v));
      e.col(k) = v;
    }
    return {p, e};
  }

  /// Frame coordinates of an ambient tangent vector.
  [[nodiscard]] Eigen::VectorXd coords(const Eigen::VectorXd& v) const {
    Eigen::VectorXd c(basis.cols());
    for (Eigen::Index k = 0; k < basis.cols(); ++k) c[k] = minkowski_dot(basis.col(k), v);
    return c;
  }

  [[nodiscard]] HTangent vector(const Eigen::VectorXd& c) const { return {base, basis * c}; }
};

/// Hessian of d(., z) at y in the orthonormal frame: coth(d) (I - g g^T),
/// where g holds the frame coordinates of the unit gradient.
inline Eigen::MatrixXd hess_distance(const HPoint& y, const HPoint& z, const TangentFrame& frame,
                                     const Tolerances& tol = {}) {
  const double d = distance(y, z, tol);
  if (d < tol.degenerate) throw DegenerateGeometry("Hessian of d(., z) is singular at y = z");
  const Eigen::VectorXd g = frame.coords(grad_distance(y, z, tol).vec);
  const Eigen::Index n = g.size();
  return (1.0 / std::tanh(d)) * (Eigen::MatrixXd::Identity(n, n) - g * g.transpose());
}

inline Eigen::MatrixXd hess_distance(const HPoint& y, const HPoint& z, const Tolerances& tol = {}) {
  return hess_distance(y, z, TangentFrame::at(y), tol);
}

inline Eigen::MatrixXd minkowski_form(int dim) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  j(0, 0) = -1.0;
  return j;
}

class HIsometry {
 public:
  static HIsometry from_matrix(const Eigen::MatrixXd& m, const Tolerances& tol = {}) {
    if (m.rows() != m.cols() || m.rows() < 3) throw InvalidPoint("isometry must be square, size >= 3");
    const Eigen::MatrixXd j = minkowski_form(static_cast<int>(m.rows()) - 1);
    const double err = (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
    if (!(err <= tol.isometry)) {
      std::ostringstream os;
      os << "matrix does not preserve the Minkowski form (error " << err << ")";
      throw InvalidPoint(os.str());
    }
    if (m(0, 0) <= 0.0) throw InvalidPoint("isometry swaps the sheets");
    return HIsometry(m);
  }

  static HIsometry identity(int dim) { return HIsometry(Eigen::MatrixXd::Identity(dim + 1, dim + 1)); }

  /// Boost by hyperbolic distance t along spatial axis `axis` (1-based).
  static HIsometry boost(int dim, int axis, double t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
    m(0, 0) = m(axis, axis) = std::cosh(t);
    m(0, axis) = m(axis, 0) = std::sinh(t);
    return HIsometry(m);
  }

  /// Rotation about the origin by a spatial orthogonal matrix.
  static HIsometry rotation(const Eigen::MatrixXd& q) {
    const Eigen::Index n = q.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
    m.bottomRightCorner(n, n) = q;
    return HIsometry(m);
  }

  /// The pure boost taking the origin to c.
  static HIsometry translation_to(const HPoint& c) {
    const int n = c.dim();
    const Eigen::VectorXd s = c.coords().tail(n);
    Eigen::MatrixXd m(n + 1, n + 1);
    m(0, 0) = c[0];
    m.block(0, 1, 1, n) = s.transpose();
    m.block(1, 0, n, 1) = s;
    m.bottomRightCorner(n, n) =
        Eigen::MatrixXd::Identity(n, n) + s * s.transpose() / (1.0 + c[0]);
    return HIsometry(m);
  }

  static HIsometry random(int dim, Rng& rng, double max_shift = 2.0) {
    std::uniform_real_distribution<double> u(0.0, max_shift);
    const HPoint c = exp_map({HPoint::origin(dim), [&] {
                                Eigen::VectorXd v = Eigen::VectorXd::Zero(dim + 1);
                                v.tail(dim) = u(rng) * random_unit_vector(rng, dim);
                                return v;
                              }()});
    return translation_to(c).compose(rotation(haar_orthogonal(rng, dim)));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()) - 1; }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return m_; }

  /// (this o other)
  [[nodiscard]] HIsometry compose(const HIsometry& other) const { return HIsometry(m_ * other.m_); }

  [[nodiscard]] HIsometry inverse() const {
    const Eigen::MatrixXd j = minkowski_form(dim());
    return HIsometry(j * m_.transpose() * j);
  }

  [[nodiscard]] HPoint apply(const HPoint& p) const {
    if (p.dim() != dim()) throw InvalidPoint("isometry/point dimension mismatch");
    return HPoint::project(m_ * p.coords());
  }

  [[nodiscard]] HTangent apply(const HTangent& v) const {
    const HPoint b = apply(v.base);
    return {b, project_to_tangent(b, m_ * v.vec)};
  }

 private:
  explicit HIsometry(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

inline HPoint apply_isometry(const HIsometry& g, const HPoint& p) { return g.apply(p); }

/// Point at hyperbolic radius r in direction `dir` (unit, spatial) from the origin.
inline HPoint polar_point(const Eigen::VectorXd& dir, double r) {
  Eigen::VectorXd x(dir.size() + 1);
  x[0] = std::cosh(r);
  x.tail(dir.size()) = std::sinh(r) * dir;
  return HPoint::project(x);
}

/// Random point with hyperbolic radius uniform in [0, max_radius] about `center`.
inline HPoint random_point(const HPoint& center, double max_radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, max_radius);
  const int n = center.dim();
  const HPoint p = polar_point(random_unit_vector(rng, n), u(rng));
  return HIsometry::translation_to(center).apply(p);
}

}  // namespace barylab::hyp
