#pragma once

// The determinant inequality behind the Jacobian bound:
//   det H / det(I - H - sum_i J_i H J_i)^2 <= (N / (N+d-2)^2)^N
// for H positive definite with trace one and orthogonal J_i with J_i^2 = -I.
// Sampling laboratory: ratio, bound, samplers, scans and CSV output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "barylab/errors.hpp"
#include "barylab/parallel.hpp"
#include "barylab/random.hpp"

namespace barylab::bcg {

struct SpectralInput {
  int N = 0;
  int d = 1;
  Eigen::MatrixXd H;
  std::vector<Eigen::MatrixXd> J;  // d - 1 structures

  void validate() const {
    if (N < 3) throw DomainError("N must be at least 3");
    if (d != 1 && d != 2 && d != 4 && d != 8) throw DomainError("d must be 1, 2, 4 or 8");
    if (d > 1 && N % 2 != 0) throw DomainError("structures J need N even");
    if (H.rows() != N || H.cols() != N) throw DomainError("H must be N x N");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("H must be symmetric");
    if (std::abs(H.trace() - 1.0) > 1e-10) throw DomainError("trace(H) must be 1");
    if (Eigen::LLT<Eigen::MatrixXd>(H).info() != Eigen::Success) throw DomainError("H must be positive definite");
    if (static_cast<int>(J.size()) != d - 1) throw DomainError("need exactly d-1 structures J");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(N, N);
    for (const auto& j : J) {
      if (j.rows() != N || j.cols() != N) throw DomainError("J must be N x N");
      if ((j.transpose() * j - id).cwiseAbs().maxCoeff() > 1e-9) throw DomainError("J must be orthogonal");
      if ((j * j + id).cwiseAbs().maxCoeff() > 1e-9) throw DomainError("J^2 must equal -I");
    }
  }
};

inline double bcg_bound(int N, int d) {
  if (N < 3) throw DomainError("N must be at least 3");
  if (d < 1) throw DomainError("d must be positive");
  const double base = static_cast<double>(N) / std::pow(static_cast<double>(N + d - 2), 2);
  return std::pow(base, N);
}

/// I - H - sum J H J, symmetrized.
inline Eigen::MatrixXd denominator_matrix(const SpectralInput& in) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(in.N, in.N) - in.H;
  for (const auto& j : in.J) m -= j * in.H * j;
  return 0.5 * (m + m.transpose());
}

namespace detail {

inline double log_det_pd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw OutsideDomain(std::string(what) + " is not positive definite");
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  double s = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) throw OutsideDomain(std::string(what) + " is not positive definite");
    s += 2.0 * std::log(diag[i]);
  }
  return s;
}

}  // namespace detail

inline double bcg_ratio(const SpectralInput& in) {
  in.validate();
  return std::exp(detail::log_det_pd(in.H, "H") - 2.0 * detail::log_det_pd(denominator_matrix(in), "I - H - sum JHJ"));
}

// ---------------------------------------------------------------- structures

namespace detail {

// Cayley-Dickson product on R^{2^k}: (a,b)(c,d) = (ac - d* b, da + b c*).
inline Eigen::VectorXd conj(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = -x;
  y[0] = x[0];
  return y;
}

inline Eigen::VectorXd cd_mul(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n == 1) return x.cwiseProduct(y);
  const Eigen::Index h = n / 2;
  const Eigen::VectorXd a = x.head(h), b = x.tail(h), c = y.head(h), d = y.tail(h);
  Eigen::VectorXd out(n);
  out.head(h) = cd_mul(a, c) - cd_mul(conj(d), b);
  out.tail(h) = cd_mul(d, a) + cd_mul(b, conj(c));
  return out;
}

}  // namespace detail

/// Left multiplication by the imaginary unit e_i (1 <= i < d) of the real
/// division algebra of dimension d, acting block-diagonally on R^N.
inline Eigen::MatrixXd left_multiplication(int N, int d, int i) {
  if (N % d != 0) throw DomainError("N must be a multiple of d for the canonical structures");
  Eigen::MatrixXd block(d, d);
  Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i);
  for (int k = 0; k < d; ++k) block.col(k) = detail::cd_mul(ei, Eigen::VectorXd::Unit(d, k));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
  for (int b = 0; b < N / d; ++b) out.block(b * d, b * d, d, d) = block;
  return out;
}

/// Block-diagonal complex, quaternionic or octonionic structures.
inline std::vector<Eigen::MatrixXd> canonical_structures(int N, int d) {
  if (d != 1 && d != 2 && d != 4 && d != 8) throw DomainError("d must be 1, 2, 4 or 8");
  std::vector<Eigen::MatrixXd> out;
  for (int i = 1; i < d; ++i) out.push_back(left_multiplication(N, d, i));
  return out;
}

inline SpectralInput make_input(const Eigen::MatrixXd& H, int d) {
  SpectralInput in;
  in.N = static_cast<int>(H.rows());
  in.d = d;
  in.H = H;
  in.J = canonical_structures(in.N, d);
  return in;
}

inline SpectralInput make_input(const Eigen::MatrixXd& H, int d, std::vector<Eigen::MatrixXd> J) {
  SpectralInput in;
  in.N = static_cast<int>(H.rows());
  in.d = d;
  in.H = H;
  in.J = std::move(J);
  return in;
}

// ------------------------------------------------------------------ samplers

enum class Family { Wishart, Dirichlet, Boundary, NearIdentity, NearDegenerate, Mixed };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Wishart: return "wishart";
    case Family::Dirichlet: return "dirichlet";
    case Family::Boundary: return "boundary";
    case Family::NearIdentity: return "near-identity";
    case Family::NearDegenerate: return "near-degenerate";
    case Family::Mixed: return "mixed";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  for (Family f : {Family::Wishart, Family::Dirichlet, Family::Boundary, Family::NearIdentity, Family::NearDegenerate,
                   Family::Mixed})
    if (s == family_name(f)) return f;
  throw ConfigError("unknown sampler family: " + s);
}

namespace detail {

inline Eigen::VectorXd uniform_simplex(Rng& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

inline double log_uniform(Rng& rng, double lo_exp, double hi_exp) {
  return std::pow(10.0, std::uniform_real_distribution<double>(lo_exp, hi_exp)(rng));
}

inline Eigen::MatrixXd with_frame(const Eigen::VectorXd& mu, Rng& rng) {
  const Eigen::MatrixXd q = haar_orthogonal(rng, mu.size());
  Eigen::MatrixXd h = q * mu.asDiagonal() * q.transpose();
  h = (0.5 * (h + h.transpose())).eval();
  return h / h.trace();
}

}  // namespace detail

/// One trace-one positive definite N x N matrix from the given family.
inline Eigen::MatrixXd sample_H(int N, Family family, Rng& rng) {
  if (family == Family::Mixed) {
    static constexpr Family cycle[] = {Family::Wishart, Family::Dirichlet, Family::Boundary, Family::NearIdentity,
                                       Family::NearDegenerate};
    family = cycle[std::uniform_int_distribution<int>(0, 4)(rng)];
  }
  switch (family) {
    case Family::Wishart: {
      Eigen::MatrixXd g(N, N);
      for (int c = 0; c < N; ++c) g.col(c) = gaussian_vector(rng, N);
      Eigen::MatrixXd h = g * g.transpose();
      h = (0.5 * (h + h.transpose())).eval();
      return h / h.trace();
    }
    case Family::Dirichlet:
      return detail::with_frame(detail::uniform_simplex(rng, N), rng);
    case Family::Boundary: {
      const double eps = detail::log_uniform(rng, -8.0, -1.0);
      Eigen::VectorXd mu(N);
      mu[0] = 1.0 - eps;
      mu.tail(N - 1) = eps * detail::uniform_simplex(rng, N - 1);
      return detail::with_frame(mu, rng);
    }
    case Family::NearDegenerate: {
      const double delta = detail::log_uniform(rng, -8.0, -1.0) / N;
      Eigen::VectorXd mu(N);
      mu[0] = delta;
      mu.tail(N - 1) = (1.0 - delta) * detail::uniform_simplex(rng, N - 1);
      return detail::with_frame(mu, rng);
    }
    case Family::NearIdentity: {
      Eigen::MatrixXd p(N, N);
      for (int c = 0; c < N; ++c) p.col(c) = gaussian_vector(rng, N);
      p = (0.5 * (p + p.transpose())).eval();
      p -= (p.trace() / N) * Eigen::MatrixXd::Identity(N, N);
      p /= p.norm();
      const double t = detail::log_uniform(rng, -6.0, -1.0) / N;
      Eigen::MatrixXd h = Eigen::MatrixXd::Identity(N, N) / N + t * p;
      return h / h.trace();
    }
    case Family::Mixed: break;
  }
  throw ConfigError("unknown sampler family");
}

// ---------------------------------------------------------------------- scan

struct Sample {
  std::uint64_t id = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  double ratio = 0.0;
  double bound = 0.0;
  double deficit = 0.0;         // sum (mu_j - 1/N)^2
  double margin = 0.0;          // 1 - ratio / bound
};

struct ScanOptions {
  int N = 3;
  int d = 1;
  std::uint64_t count = 1000;
  Family family = Family::Mixed;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double rel_tol = 1e-9;
  bool keep_samples = false;
  bool abort_on_violation = true;
  double min_deficit = 1e-12;   // samples with a smaller deficit do not inform A
};

struct ScanReport {
  ScanOptions options;
  double bound = 0.0;
  double max_ratio = 0.0;
  std::uint64_t argmax_id = 0;
  Eigen::VectorXd argmax_spectrum;
  double empirical_A = std::numeric_limits<double>::infinity();  // empirical infimum, not a certified constant
  std::uint64_t argmin_A_id = 0;
  std::uint64_t violations = 0;
  std::uint64_t outside_domain = 0;
  std::vector<Sample> samples;
};

inline nlohmann::json to_json(const SpectralInput& in) {
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json r = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      rows.push_back(r);
    }
    return rows;
  };
  nlohmann::json j{{"N", in.N}, {"d", in.d}, {"H", mat(in.H)}};
  j["J"] = nlohmann::json::array();
  for (const auto& m : in.J) j["J"].push_back(mat(m));
  return j;
}

/// Input for sample `id` of a scan; reproducible from (seed, id) alone.
inline SpectralInput scan_input(const ScanOptions& opt, std::uint64_t id,
                                const std::vector<Eigen::MatrixXd>* structures = nullptr) {
  Rng rng(derive_seed(opt.seed, id));
  const Eigen::MatrixXd h = sample_H(opt.N, opt.family, rng);
  return structures ? make_input(h, opt.d, *structures) : make_input(h, opt.d);
}

inline Sample evaluate(const SpectralInput& in, std::uint64_t id = 0) {
  Sample s;
  s.id = id;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(in.H, Eigen::EigenvaluesOnly);
  s.eigenvalues = es.eigenvalues();
  s.ratio = bcg_ratio(in);
  s.bound = bcg_bound(in.N, in.d);
  s.deficit = (s.eigenvalues.array() - 1.0 / in.N).square().sum();
  s.margin = 1.0 - s.ratio / s.bound;
  return s;
}

inline ScanReport bcg_scan(const ScanOptions& opt) {
  if (opt.count < 1) throw ConfigError("count must be at least 1");
  if (opt.N < 3) throw DomainError("N must be at least 3");
  if (opt.d > 1 && opt.N % opt.d != 0) throw ConfigError("canonical structures need N divisible by d");
  ScanReport rep;
  rep.options = opt;
  rep.bound = bcg_bound(opt.N, opt.d);

  // Per-sample results are written by index, so any partition reduces to the
  // same report.
  const std::vector<Eigen::MatrixXd> structures = canonical_structures(opt.N, opt.d);
  std::vector<Sample> all(opt.count);
  std::vector<char> outside(opt.count, 0);
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    try {
      all[i] = evaluate(scan_input(opt, i, &structures), i);
    } catch (const OutsideDomain&) {
      outside[i] = 1;
    }
  });

  std::int64_t first_violation = -1;
  for (std::uint64_t i = 0; i < opt.count; ++i) {
    if (outside[i]) {
      ++rep.outside_domain;
      continue;
    }
    const Sample& s = all[i];
    if (s.ratio > rep.max_ratio) {
      rep.max_ratio = s.ratio;
      rep.argmax_id = i;
      rep.argmax_spectrum = s.eigenvalues;
    }
    if (s.ratio > s.bound * (1.0 + opt.rel_tol)) {
      ++rep.violations;
      if (first_violation < 0) first_violation = static_cast<std::int64_t>(i);
    }
    if (s.deficit > opt.min_deficit) {
      const double a = (1.0 - std::sqrt(s.ratio / s.bound)) / s.deficit;
      if (a < rep.empirical_A) {
        rep.empirical_A = a;
        rep.argmin_A_id = i;
      }
    }
  }
  if (first_violation >= 0 && opt.abort_on_violation) {
    const SpectralInput in = scan_input(opt, static_cast<std::uint64_t>(first_violation));
    nlohmann::json payload = to_json(in);
    payload["sample_id"] = first_violation;
    payload["seed"] = opt.seed;
    payload["ratio"] = all[static_cast<std::size_t>(first_violation)].ratio;
    payload["bound"] = rep.bound;
    throw BcgViolation("ratio exceeds the bound at sample " + std::to_string(first_violation), payload.dump());
  }
  if (opt.keep_samples) rep.samples = std::move(all);
  return rep;
}

/// Ratios along H_t = (1-t) I/N + t D for a trace-one positive diagonal D,
/// t on a uniform grid of [0, t_max].
inline std::vector<double> line_scan(int N, int d, const Eigen::VectorXd& diagonal, double t_max, int steps) {
  if (diagonal.size() != N || std::abs(diagonal.sum() - 1.0) > 1e-12 || diagonal.minCoeff() <= 0.0)
    throw DomainError("direction must be a positive trace-one diagonal");
  std::vector<double> out;
  const Eigen::MatrixXd centre = Eigen::MatrixXd::Identity(N, N) / N;
  for (int k = 0; k <= steps; ++k) {
    const double t = t_max * k / steps;
    out.push_back(bcg_ratio(make_input((1.0 - t) * centre + t * Eigen::MatrixXd(diagonal.asDiagonal()), d)));
  }
  return out;
}

// ----------------------------------------------------------------------- csv

namespace detail {
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_csv(std::ostream& os, const ScanReport& rep) {
  const int n = rep.options.N;
  os << "sample_id";
  for (int j = 1; j <= n; ++j) os << ",mu_" << j;
  os << ",ratio,bound,deficit,margin\n";
  for (const auto& s : rep.samples) {
    os << s.id;
    for (int j = 0; j < n; ++j) os << ',' << detail::num(s.eigenvalues[j]);
    os << ',' << detail::num(s.ratio) << ',' << detail::num(s.bound) << ',' << detail::num(s.deficit) << ','
       << detail::num(s.margin) << '\n';
  }
}

}  // namespace barylab::bcg
