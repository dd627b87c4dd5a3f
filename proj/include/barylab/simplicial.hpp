#pragma once

// Oriented simplicial pseudomanifolds with piecewise-linear geometry, maps
// between them, preimage counts, pointwise degree and the coarea identity.
// Geometry: vertices carry coordinates in some R^M and every top simplex is
// the affine simplex they span. A map is affine on each domain simplex and
// given by the images of the vertices; simplicial maps send vertices to
// target vertices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "barylab/errors.hpp"
#include "barylab/parallel.hpp"
#include "barylab/random.hpp"

namespace barylab {

struct SimplicialComplex {
  int dim = 0;
  Eigen::MatrixXd coords;                 // one row per vertex
  std::vector<std::vector<int>> simplices;  // ordered; the order is the orientation

  [[nodiscard]] int vertex_count() const { return static_cast<int>(coords.rows()); }
  [[nodiscard]] int ambient() const { return static_cast<int>(coords.cols()); }

  /// Edge vectors v_i - v_0 as columns (M x dim).
  [[nodiscard]] Eigen::MatrixXd edge_matrix(const std::vector<int>& s) const {
    Eigen::MatrixXd e(ambient(), dim);
    for (int i = 1; i <= dim; ++i) e.col(i - 1) = (coords.row(s[static_cast<std::size_t>(i)]) - coords.row(s[0])).transpose();
    return e;
  }

  [[nodiscard]] double volume(std::size_t k) const {
    const Eigen::MatrixXd e = edge_matrix(simplices[k]);
    return std::sqrt(std::max(0.0, (e.transpose() * e).determinant())) / std::tgamma(dim + 1.0);
  }

  [[nodiscard]] double total_volume() const {
    double v = 0.0;
    for (std::size_t k = 0; k < simplices.size(); ++k) v += volume(k);
    return v;
  }

  void validate() const {
    if (dim < 1) throw InvalidInput("dimension must be at least 1");
    if (ambient() < dim) throw InvalidInput("ambient dimension below the simplicial dimension");
    if (simplices.empty()) throw InvalidInput("complex has no top simplices");
    std::set<std::vector<int>> seen;
    for (std::size_t k = 0; k < simplices.size(); ++k) {
      const auto& s = simplices[k];
      if (static_cast<int>(s.size()) != dim + 1) throw InvalidInput("top simplex with the wrong number of vertices");
      for (int v : s)
        if (v < 0 || v >= vertex_count()) throw InvalidInput("simplex vertex out of range");
      std::vector<int> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidInput("repeated vertex in a simplex");
      if (!seen.insert(sorted).second) throw InvalidInput("duplicate top simplex");
      if (!(volume(k) > 0.0)) throw DegenerateGeometry("top simplex " + std::to_string(k) + " has zero volume");
    }
  }
};

namespace detail {

inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

/// Codimension-one faces: sorted vertex set -> (simplex, induced orientation sign).
inline std::map<std::vector<int>, std::vector<std::pair<std::size_t, int>>> facets(const SimplicialComplex& k) {
  std::map<std::vector<int>, std::vector<std::pair<std::size_t, int>>> out;
  for (std::size_t s = 0; s < k.simplices.size(); ++s) {
    const auto& t = k.simplices[s];
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::vector<int> face;
      for (std::size_t j = 0; j < t.size(); ++j)
        if (j != i) face.push_back(t[j]);
      const int sign = (i % 2 ? -1 : 1) * permutation_sign(face);
      std::sort(face.begin(), face.end());
      out[face].push_back({s, sign});
    }
  }
  return out;
}

}  // namespace detail

struct PseudomanifoldCheck {
  bool closed = true;             // every facet in exactly two top simplices
  bool strongly_connected = true;
  bool coherently_oriented = true;
  std::string problem;
};

inline PseudomanifoldCheck check_pseudomanifold(const SimplicialComplex& k) {
  PseudomanifoldCheck out;
  const auto f = detail::facets(k);
  std::vector<int> parent(k.simplices.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto root = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& [face, list] : f) {
    if (list.size() != 2) {
      if (out.closed) {
        std::ostringstream os;
        os << "facet {";
        for (std::size_t i = 0; i < face.size(); ++i) os << (i ? "," : "") << face[i];
        os << "} lies in " << list.size() << " top simplices";
        out.problem = os.str();
      }
      out.closed = false;
      out.coherently_oriented = false;
      continue;
    }
    if (list[0].second == list[1].second) {
      out.coherently_oriented = false;
      if (out.problem.empty()) out.problem = "orientations disagree across a facet";
    }
    parent[static_cast<std::size_t>(root(static_cast<int>(list[0].first)))] = root(static_cast<int>(list[1].first));
  }
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (root(static_cast<int>(i)) != root(0)) {
      out.strongly_connected = false;
      if (out.problem.empty()) out.problem = "top simplices are not connected through facets";
      break;
    }
  return out;
}

/// Piecewise-linear map: affine on each domain simplex with the given vertex
/// images, which lie in the target's ambient space. `vertex_map` is set for
/// simplicial maps.
struct PLMap {
  SimplicialComplex domain;
  SimplicialComplex target;
  Eigen::MatrixXd images;               // one row per domain vertex
  std::optional<std::vector<int>> vertex_map;
};

/// Simplicial map from a vertex map; every top simplex must land on a
/// simplex of the target (a top simplex or one of its faces).
inline PLMap simplicial_map(const SimplicialComplex& domain, const SimplicialComplex& target,
                            const std::vector<int>& vertex_map) {
  domain.validate();
  target.validate();
  if (domain.dim != target.dim) throw InvalidInput("domain and target dimensions differ");
  if (static_cast<int>(vertex_map.size()) != domain.vertex_count()) throw InvalidInput("vertex map has the wrong size");
  for (int v : vertex_map)
    if (v < 0 || v >= target.vertex_count()) throw InvalidInput("vertex image out of range");
  std::vector<std::set<int>> tops;
  for (const auto& t : target.simplices) tops.emplace_back(t.begin(), t.end());
  for (const auto& s : domain.simplices) {
    std::set<int> img;
    for (int v : s) img.insert(vertex_map[static_cast<std::size_t>(v)]);
    const bool ok = std::any_of(tops.begin(), tops.end(), [&](const std::set<int>& t) {
      return std::includes(t.begin(), t.end(), img.begin(), img.end());
    });
    if (!ok) throw InvalidInput("vertex map does not induce a simplicial map");
  }
  PLMap m{domain, target, Eigen::MatrixXd(domain.vertex_count(), target.ambient()), vertex_map};
  for (int v = 0; v < domain.vertex_count(); ++v) m.images.row(v) = target.coords.row(vertex_map[static_cast<std::size_t>(v)]);
  return m;
}

inline PLMap pl_map(const SimplicialComplex& domain, const SimplicialComplex& target, const Eigen::MatrixXd& images) {
  domain.validate();
  target.validate();
  if (domain.dim != target.dim) throw InvalidInput("domain and target dimensions differ");
  if (images.rows() != domain.vertex_count() || images.cols() != target.ambient())
    throw InvalidInput("images must have one target-space point per domain vertex");
  return PLMap{domain, target, images, std::nullopt};
}

// ------------------------------------------------------------------ location

namespace detail {

struct AffinePiece {
  Eigen::VectorXd origin;
  Eigen::MatrixXd edges;  // M x N
  Eigen::MatrixXd pinv;   // N x M
  bool full_rank = false;
  double scale = 1.0;
};

inline AffinePiece make_piece(const Eigen::VectorXd& origin, const Eigen::MatrixXd& edges) {
  AffinePiece p;
  p.origin = origin;
  p.edges = edges;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto sv = svd.singularValues();
  p.scale = std::max(sv[0], 1e-300);
  p.full_rank = sv[sv.size() - 1] > 1e-12 * p.scale;
  if (p.full_rank) p.pinv = svd.solve(Eigen::MatrixXd::Identity(edges.rows(), edges.rows()));
  return p;
}

enum class Where { Outside, Inside, Boundary };

/// Barycentric location of y relative to an affine piece.
inline Where locate(const AffinePiece& p, const Eigen::VectorXd& y, double tol = 1e-9) {
  const Eigen::VectorXd r = y - p.origin;
  const Eigen::VectorXd lam = p.pinv * r;
  if ((p.edges * lam - r).norm() > tol * p.scale) return Where::Outside;
  const double l0 = 1.0 - lam.sum();
  const double lo = std::min(l0, lam.size() ? lam.minCoeff() : l0);
  if (lo > tol) return Where::Inside;
  if (lo < -tol) return Where::Outside;
  return Where::Boundary;
}

}  // namespace detail

struct PointPreimages {
  bool generic = true;
  int count = 0;
  int degree = 0;
};

/// Precomputed affine pieces of a map for repeated point location.
class PreimageLocator {
 public:
  explicit PreimageLocator(const PLMap& f) : f_(f) {
    const int n = f.domain.dim;
    for (const auto& s : f.domain.simplices) {
      Eigen::MatrixXd e(f.images.cols(), n);
      for (int i = 1; i <= n; ++i) e.col(i - 1) = (f.images.row(s[static_cast<std::size_t>(i)]) - f.images.row(s[0])).transpose();
      src_.push_back(detail::make_piece(f.images.row(s[0]).transpose(), e));
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < f.target.simplices.size(); ++k) {
      tgt_.push_back(detail::make_piece(f.target.coords.row(f.target.simplices[k][0]).transpose(),
                                        f.target.edge_matrix(f.target.simplices[k])));
      cumulative_.push_back(acc += f.target.volume(k));
    }
  }

  [[nodiscard]] const PLMap& map() const { return f_; }

  /// Target top simplex containing y in its interior, if any.
  [[nodiscard]] std::optional<std::size_t> target_simplex(const Eigen::VectorXd& y) const {
    for (std::size_t k = 0; k < tgt_.size(); ++k)
      if (detail::locate(tgt_[k], y) == detail::Where::Inside) return k;
    return std::nullopt;
  }

  /// Preimages of y, which must lie inside target simplex `tau`. Not generic
  /// when y lies on the image of the (N-1)-skeleton of the domain.
  [[nodiscard]] PointPreimages at(const Eigen::VectorXd& y, std::size_t tau) const {
    PointPreimages out;
    const auto& t = tgt_[tau];
    for (const auto& p : src_) {
      if (!p.full_rank) continue;  // its image is covered by images of its facets
      const detail::Where w = detail::locate(p, y);
      if (w == detail::Where::Boundary) {
        out.generic = false;
        return out;
      }
      if (w != detail::Where::Inside) continue;
      ++out.count;
      const Eigen::MatrixXd c = t.pinv * p.edges;  // differential in the target simplex frame
      out.degree += c.determinant() > 0.0 ? 1 : -1;
    }
    return out;
  }

  /// Uniform point of the target (by volume) and its simplex.
  std::pair<Eigen::VectorXd, std::size_t> sample(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin()),
        cumulative_.size() - 1);
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd lam(f_.target.dim + 1);
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = e(rng);
    lam /= lam.sum();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(f_.target.ambient());
    for (Eigen::Index i = 0; i < lam.size(); ++i) y += lam[i] * f_.target.coords.row(f_.target.simplices[k][static_cast<std::size_t>(i)]).transpose();
    return {y, k};
  }

  [[nodiscard]] const std::vector<detail::AffinePiece>& pieces() const { return src_; }

 private:
  const PLMap& f_;
  std::vector<detail::AffinePiece> src_, tgt_;
  std::vector<double> cumulative_;
};

inline int pointwise_degree(const PLMap& f, const Eigen::VectorXd& y) {
  const PreimageLocator loc(f);
  const auto tau = loc.target_simplex(y);
  if (!tau) throw NonGeneric("point is not interior to a target top simplex");
  const PointPreimages p = loc.at(y, *tau);
  if (!p.generic) throw NonGeneric("point lies on the image of the codimension-one skeleton");
  return p.degree;
}

// ------------------------------------------------------------------ sampling

struct PreReport {
  double pre = 0.0;             // volume-weighted mean preimage count
  double mean_abs_degree = 0.0;
  int min_degree = 0, max_degree = 0;
  int max_deficit = 0;          // max over samples of |deg| - count (<= 0 always)
  std::uint64_t samples = 0;    // generic samples used
  std::uint64_t skipped = 0;    // samples with 100 non-generic retries
  std::uint64_t retries = 0;
};

/// Monte-Carlo pre(f). Sample i uses its own stream derive_seed(seed, i), so
/// the result does not depend on the thread count.
inline PreReport pre_count(const PLMap& f, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1) {
  const PreimageLocator loc(f);
  struct One {
    bool ok = false;
    int count = 0, degree = 0, retries = 0;
  };
  std::vector<One> res(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    for (int attempt = 0; attempt < 100; ++attempt) {
      const auto [y, tau] = loc.sample(rng);
      const PointPreimages p = loc.at(y, tau);
      if (p.generic) {
        res[i] = {true, p.count, p.degree, attempt};
        return;
      }
    }
    res[i].retries = 100;
  });
  PreReport rep;
  rep.min_degree = std::numeric_limits<int>::max();
  rep.max_degree = std::numeric_limits<int>::min();
  rep.max_deficit = std::numeric_limits<int>::min();
  double sum = 0.0, sum_deg = 0.0;
  for (const auto& r : res) {
    rep.retries += static_cast<std::uint64_t>(r.retries);
    if (!r.ok) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples;
    sum += r.count;
    sum_deg += std::abs(r.degree);
    rep.min_degree = std::min(rep.min_degree, r.degree);
    rep.max_degree = std::max(rep.max_degree, r.degree);
    rep.max_deficit = std::max(rep.max_deficit, std::abs(r.degree) - r.count);
  }
  if (rep.samples == 0) throw NonGeneric("no generic sample point found");
  rep.pre = sum / static_cast<double>(rep.samples);
  rep.mean_abs_degree = sum_deg / static_cast<double>(rep.samples);
  return rep;
}

/// Exact pre(f) of a simplicial map: each nondegenerate domain simplex covers
/// the interior of its image simplex once.
inline double pre_exact(const PLMap& f) {
  if (!f.vertex_map) throw InvalidInput("exact count needs a simplicial map");
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t k = 0; k < f.target.simplices.size(); ++k) {
    std::vector<int> s = f.target.simplices[k];
    std::sort(s.begin(), s.end());
    index[s] = k;
  }
  std::vector<int> hits(f.target.simplices.size(), 0);
  for (const auto& s : f.domain.simplices) {
    std::vector<int> img;
    for (int v : s) img.push_back((*f.vertex_map)[static_cast<std::size_t>(v)]);
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end()) continue;
    auto it = index.find(img);
    if (it != index.end()) ++hits[it->second];
  }
  double num = 0.0;
  for (std::size_t k = 0; k < hits.size(); ++k) num += f.target.volume(k) * hits[k];
  return num / f.target.total_volume();
}

/// ind_H = |deg f| for maps between closed oriented pseudomanifolds, from
/// `points` generic samples that must all agree.
inline int ind_H_degree(const PLMap& f, std::uint64_t seed = 1, int points = 10) {
  for (const auto* k : {&f.domain, &f.target}) {
    const auto c = check_pseudomanifold(*k);
    if (!c.closed || !c.coherently_oriented)
      throw NonPseudomanifold(std::string(k == &f.domain ? "domain" : "target") + ": " + c.problem);
  }
  if (!check_pseudomanifold(f.target).strongly_connected) throw NonPseudomanifold("target is not strongly connected");
  const PreimageLocator loc(f);
  std::optional<int> deg;
  int found = 0;
  for (std::uint64_t i = 0; found < points && i < static_cast<std::uint64_t>(points) * 100; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto [y, tau] = loc.sample(rng);
    const PointPreimages p = loc.at(y, tau);
    if (!p.generic) continue;
    ++found;
    if (deg && *deg != p.degree) throw NonPseudomanifold("sampled degrees disagree");
    deg = p.degree;
  }
  if (!deg) throw NonGeneric("no generic sample point found");
  return std::abs(*deg);
}

struct CoareaReport {
  double lhs = 0.0;       // sum over domain simplices of Jac * volume
  double rhs = 0.0;       // vol(target) * mean preimage count
  double rel_gap = 0.0;   // |lhs - rhs| / max(|lhs|, tiny)
  std::uint64_t samples = 0;
  std::uint64_t skipped = 0;
};

inline CoareaReport coarea_check(const PLMap& f, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1) {
  CoareaReport rep;
  const int n = f.domain.dim;
  for (std::size_t k = 0; k < f.domain.simplices.size(); ++k) {
    const auto& s = f.domain.simplices[k];
    Eigen::MatrixXd e(f.images.cols(), n);
    for (int i = 1; i <= n; ++i) e.col(i - 1) = (f.images.row(s[static_cast<std::size_t>(i)]) - f.images.row(s[0])).transpose();
    const Eigen::MatrixXd d = f.domain.edge_matrix(s);
    const double jac = std::sqrt(std::max(0.0, (e.transpose() * e).determinant())) /
                       std::sqrt((d.transpose() * d).determinant());
    rep.lhs += jac * f.domain.volume(k);
  }
  const PreReport pre = pre_count(f, samples, seed, threads);
  rep.rhs = pre.pre * f.target.total_volume();
  rep.samples = pre.samples;
  rep.skipped = pre.skipped;
  rep.rel_gap = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), 1e-300);
  return rep;
}

// ------------------------------------------------------------------ fixtures

namespace fixtures {

/// Regular n-gon: a triangulated circle.
inline SimplicialComplex circle(int n) {
  if (n < 3) throw InvalidInput("a simplicial circle needs at least 3 vertices");
  SimplicialComplex k;
  k.dim = 1;
  k.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    k.coords.row(i) << std::cos(a), std::sin(a);
    k.simplices.push_back({i, (i + 1) % n});
  }
  return k;
}

/// Boundary of the octahedron with vertices +-e_i, oriented by the outward normal.
inline SimplicialComplex octahedron() {
  SimplicialComplex k;
  k.dim = 2;
  k.coords.resize(6, 3);
  k.coords.setZero();
  for (int i = 0; i < 3; ++i) k.coords(2 * i, i) = 1.0, k.coords(2 * i + 1, i) = -1.0;  // vertex 2i = +e_i, 2i+1 = -e_i
  for (int sx = 0; sx < 2; ++sx)
    for (int sy = 0; sy < 2; ++sy)
      for (int sz = 0; sz < 2; ++sz) {
        std::vector<int> t{sx, 2 + sy, 4 + sz};
        const int parity = (sx + sy + sz) % 2;  // det(+-e1, +-e2, +-e3) sign
        if (parity) std::swap(t[1], t[2]);
        k.simplices.push_back(t);
      }
  return k;
}

/// Boundary of the standard n+1 simplex in R^{n+2}: a triangulated n-sphere.
inline SimplicialComplex simplex_boundary(int n) {
  SimplicialComplex k;
  k.dim = n;
  k.coords = Eigen::MatrixXd::Identity(n + 2, n + 2);
  for (int omit = 0; omit < n + 2; ++omit) {
    std::vector<int> t;
    for (int v = 0; v < n + 2; ++v)
      if (v != omit) t.push_back(v);
    if (omit % 2) std::swap(t[0], t[1]);
    k.simplices.push_back(t);
  }
  return k;
}

/// n x m grid torus embedded in R^4 (product of two polygons).
inline SimplicialComplex torus(int n, int m) {
  if (n < 3 || m < 3) throw InvalidInput("grid torus needs n, m >= 3");
  SimplicialComplex k;
  k.dim = 2;
  k.coords.resize(n * m, 4);
  auto id = [&](int i, int j) { return ((i % n + n) % n) * m + ((j % m + m) % m); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * std::numbers::pi * i / n, b = 2.0 * std::numbers::pi * j / m;
      k.coords.row(id(i, j)) << std::cos(a), std::sin(a), std::cos(b), std::sin(b);
      k.simplices.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      k.simplices.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return k;
}

/// Two octahedra sharing vertex +e_1 (a pinched connected sum).
inline SimplicialComplex octahedron_wedge() {
  const SimplicialComplex o = octahedron();
  SimplicialComplex k;
  k.dim = 2;
  k.coords.resize(11, 3);
  k.coords.topRows(6) = o.coords;
  // second copy: vertices 6..10 are copies of 1..5 mirrored in the plane x = 1,
  // which fixes the shared vertex
  for (int v = 1; v < 6; ++v) {
    k.coords.row(5 + v) = o.coords.row(v);
    k.coords(5 + v, 0) = 2.0 - o.coords(v, 0);
  }
  k.simplices = o.simplices;
  for (auto t : o.simplices) {
    for (int& v : t) v = v == 0 ? 0 : v + 5;
    k.simplices.push_back(t);
  }
  return k;
}

/// Triangulated unit square [0,1]^2 on a g x g grid.
inline SimplicialComplex square_grid(int g) {
  SimplicialComplex k;
  k.dim = 2;
  k.coords.resize((g + 1) * (g + 1), 2);
  auto id = [&](int i, int j) { return i * (g + 1) + j; };
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) k.coords.row(id(i, j)) << static_cast<double>(i) / g, static_cast<double>(j) / g;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      k.simplices.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      k.simplices.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return k;
}

inline std::vector<int> identity_vertices(const SimplicialComplex& k) {
  std::vector<int> v(static_cast<std::size_t>(k.vertex_count()));
  for (int i = 0; i < k.vertex_count(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

inline PLMap identity_map(const SimplicialComplex& k) { return simplicial_map(k, k, identity_vertices(k)); }

/// k-sheeted cover of the n-gon by the kn-gon.
inline PLMap circle_cover(int n, int k) {
  std::vector<int> vm;
  for (int i = 0; i < n * k; ++i) vm.push_back(i % n);
  return simplicial_map(circle(n * k), circle(n), vm);
}

/// Circle map along a closed walk on the n-gon: domain vertex i goes to walk[i].
inline PLMap circle_walk(int n, const std::vector<int>& walk) {
  return simplicial_map(circle(static_cast<int>(walk.size())), circle(n), walk);
}

/// k-sheeted cover of the n x m torus by the kn x m torus.
inline PLMap torus_cover(int n, int m, int k) {
  std::vector<int> vm;
  for (int i = 0; i < n * k; ++i)
    for (int j = 0; j < m; ++j) vm.push_back((i % n) * m + j);
  return simplicial_map(torus(n * k, m), torus(n, m), vm);
}

/// Reflection x -> -x of the octahedron (swaps +e_1 and -e_1); degree -1.
inline PLMap octahedron_reflection() {
  const SimplicialComplex o = octahedron();
  return simplicial_map(o, o, {1, 0, 2, 3, 4, 5});
}

/// Both copies of the wedge mapped identically onto one octahedron; degree 2.
inline PLMap double_collapse() {
  std::vector<int> vm{0, 1, 2, 3, 4, 5, 1, 2, 3, 4, 5};
  return simplicial_map(octahedron_wedge(), octahedron(), vm);
}

/// Everything onto the edge {+e_1, +e_2}: null-homotopic, degree 0, pre 0.
inline PLMap collapse_to_edge() {
  const SimplicialComplex o = octahedron();
  return simplicial_map(o, o, {0, 0, 2, 2, 0, 0});
}

/// Folds the lower hemisphere onto the upper one (-e_3 -> +e_3): degree 0, pre 1.
inline PLMap hemisphere_fold() {
  const SimplicialComplex o = octahedron();
  return simplicial_map(o, o, {0, 1, 2, 3, 4, 4});
}

/// Triangulated square grid with vertices sent to random points of the unit
/// square (triangulated by two triangles).
inline PLMap random_pl_square(int g, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SimplicialComplex dom = square_grid(g);
  Eigen::MatrixXd img(dom.vertex_count(), 2);
  for (int v = 0; v < dom.vertex_count(); ++v) img.row(v) << u(rng), u(rng);
  return pl_map(dom, square_grid(1), img);
}

}  // namespace fixtures

}  // namespace barylab
