#pragma once

// Small Euclidean helpers for local charts: classical multidimensional
// scaling and convex-hull content in low dimension.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "barylab/errors.hpp"

namespace barylab {

struct MdsChart {
  Eigen::MatrixXd coords;      // one row per point
  Eigen::VectorXd eigenvalues; // all eigenvalues of the Gram matrix, descending
  int rank = 0;                // eigenvalues above rel_tol * largest
};

/// Classical MDS of a distance matrix into R^dim.
inline MdsChart classical_mds(const Eigen::MatrixXd& dist, int dim, double rel_tol = 1e-9) {
  const Eigen::Index n = dist.rows();
  if (dist.cols() != n || n == 0) throw InvalidInput("distance matrix must be square and nonempty");
  const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * j * dist.cwiseProduct(dist) * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  MdsChart out;
  out.eigenvalues = es.eigenvalues().reverse();
  const Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
  const double top = std::max(out.eigenvalues[0], 0.0);
  for (Eigen::Index k = 0; k < n; ++k)
    if (out.eigenvalues[k] > rel_tol * top && out.eigenvalues[k] > 0.0) ++out.rank;
  out.coords = Eigen::MatrixXd::Zero(n, dim);
  for (int k = 0; k < dim && k < n; ++k)
    if (out.eigenvalues[k] > 0.0) out.coords.col(k) = vecs.col(k) * std::sqrt(out.eigenvalues[k]);
  return out;
}

namespace detail {

inline bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace detail

/// Volume of the convex hull of points in R^k (columns of `pts`, k rows).
/// Facet planes are found by brute force over k-subsets and deduplicated, so
/// coplanar boundary points are handled; each facet's content is computed
/// recursively in its own plane. Meant for a few dozen points.
inline double hull_volume(const Eigen::MatrixXd& pts, double rel_tol = 1e-9) {
  const int k = static_cast<int>(pts.rows());
  const int n = static_cast<int>(pts.cols());
  if (n == 0) return 0.0;
  if (k == 1) return pts.maxCoeff() - pts.minCoeff();
  if (n < k + 1) return 0.0;
  const Eigen::VectorXd c = pts.rowwise().mean();
  const Eigen::MatrixXd centred = pts.colwise() - c;
  const double scale = centred.colwise().norm().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
  if (svd.singularValues()[k - 1] <= rel_tol * svd.singularValues()[0]) return 0.0;
  const double tol = rel_tol * scale * 10.0;

  struct Plane {
    Eigen::VectorXd normal;
    double offset;
  };
  std::vector<Plane> planes;
  double volume = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  do {
    Eigen::MatrixXd edges(k - 1, k);
    for (int r = 1; r < k; ++r)
      edges.row(r - 1) = (pts.col(idx[static_cast<std::size_t>(r)]) - pts.col(idx[0])).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(edges);
    lu.setThreshold(1e-10);
    if (lu.rank() != k - 1) continue;
    Eigen::VectorXd normal = lu.kernel().col(0);
    normal.normalize();
    double offset = normal.dot(pts.col(idx[0]));
    const Eigen::VectorXd side = pts.transpose() * normal - Eigen::VectorXd::Constant(n, offset);
    if (side.maxCoeff() > tol && side.minCoeff() < -tol) continue;
    if (side.maxCoeff() > tol) normal = -normal, offset = -offset;  // outward
    bool seen = false;
    for (const auto& p : planes)
      if ((p.normal - normal).norm() < 1e-7 && std::abs(p.offset - offset) < 1e-7 * (1.0 + scale)) seen = true;
    if (seen) continue;
    planes.push_back({normal, offset});
    // Orthonormal basis of the plane: complement of the normal.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal);
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd basis = q.rightCols(k - 1);
    std::vector<int> on;
    for (int i = 0; i < n; ++i)
      if (std::abs(normal.dot(pts.col(i)) - offset) <= tol) on.push_back(i);
    Eigen::MatrixXd face(k - 1, static_cast<Eigen::Index>(on.size()));
    for (std::size_t i = 0; i < on.size(); ++i) face.col(static_cast<Eigen::Index>(i)) = basis.transpose() * pts.col(on[i]);
    const double height = offset - normal.dot(c);
    volume += height * hull_volume(face, rel_tol) / k;
  } while (detail::next_combination(idx, n));
  return volume;
}

}  // namespace barylab
