#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace barylab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; gives independent per-item streams from one seed so
/// parallel partitions reproduce the sequential result.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline Eigen::VectorXd random_unit_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v;
  do {
    v = gaussian_vector(rng, n);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
inline Eigen::MatrixXd haar_orthogonal(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

/// Haar rotation: orthogonal with determinant +1.
inline Eigen::MatrixXd haar_rotation(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXd q = haar_orthogonal(rng, n);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace barylab
