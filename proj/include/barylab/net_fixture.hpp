#pragma once

// A graph epsilon-net of a hyperbolic ball, invariant under the rotation
// group of the cube. Vertices are points of H^3, edges join points closer than
// a connection radius and carry their hyperbolic length, every vertex has unit
// measure. The symmetry group acts by graph automorphisms, which gives a deck
// action paired with target isometries.

#include <array>
#include <cmath>
#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "barylab/errors.hpp"
#include "barylab/graph.hpp"
#include "barylab/hyperbolic.hpp"
#include "barylab/random.hpp"

namespace barylab::fixtures {

/// The 24 rotations of the cube: signed permutation matrices of determinant +1.
inline std::vector<Eigen::Matrix3d> cube_rotations() {
  std::vector<Eigen::Matrix3d> out;
  std::array<int, 3> p{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      for (int i = 0; i < 3; ++i) m(i, p[static_cast<std::size_t>(i)]) = (signs >> i) & 1 ? -1.0 : 1.0;
      if (m.determinant() > 0) out.push_back(m);
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct SymmetricNet {
  MMGraph graph;
  std::vector<hyp::HPoint> points;             // the chart embedding f~
  std::vector<Eigen::Matrix3d> rotations;      // rotations[0] = identity
  std::vector<std::vector<int>> deck;          // deck[k][v] = vertex of rotations[k] * points[v]
  int center = 0;                              // vertex nearest the origin
  double radius = 0.0;
  double spacing = 0.0;
  double connection = 0.0;

  [[nodiscard]] hyp::HIsometry isometry(std::size_t k) const { return hyp::HIsometry::rotation(rotations[k]); }
};

namespace detail {

struct CellKey {
  long a, b, c;
  bool operator==(const CellKey& o) const { return a == o.a && b == o.b && c == o.c; }
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return static_cast<std::size_t>(k.a * 73856093L ^ k.b * 19349663L ^ k.c * 83492791L);
  }
};

/// Normal coordinates at the origin; the map is 1-Lipschitz from H^3 to R^3,
/// so a Euclidean cell search bounds hyperbolic neighbourhoods.
inline Eigen::Vector3d normal_coords(const hyp::HPoint& p) {
  const Eigen::Vector3d s = p.coords().tail(3);
  const double n = s.norm();
  if (n == 0.0) return s;
  return (std::asinh(n) / n) * s;
}

class PointGrid {
 public:
  explicit PointGrid(double cell) : cell_(cell) {}
  CellKey key(const Eigen::Vector3d& v) const {
    return {static_cast<long>(std::floor(v[0] / cell_)), static_cast<long>(std::floor(v[1] / cell_)),
            static_cast<long>(std::floor(v[2] / cell_))};
  }
  void insert(const Eigen::Vector3d& v, int id) { cells_[key(v)].push_back(id); }
  template <class F>
  void around(const Eigen::Vector3d& v, int reach, F&& f) const {
    const CellKey k = key(v);
    for (long a = -reach; a <= reach; ++a)
      for (long b = -reach; b <= reach; ++b)
        for (long c = -reach; c <= reach; ++c) {
          auto it = cells_.find({k.a + a, k.b + b, k.c + c});
          if (it == cells_.end()) continue;
          for (int id : it->second) f(id);
        }
  }

 private:
  double cell_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

}  // namespace detail

/// Greedy random epsilon-net of the ball B(o, radius) in H^3 built from whole
/// orbits of the cube group: a candidate orbit is kept when all its points
/// are at least `spacing` from every kept point and from each other.
/// Candidates are drawn from the hyperbolic volume measure; generation stops
/// after `patience` consecutive rejections.
inline SymmetricNet symmetric_net(double radius, double spacing, double connection, std::uint64_t seed,
                                  int patience = 4000) {
  SymmetricNet net;
  net.radius = radius;
  net.spacing = spacing;
  net.connection = connection;
  net.rotations = cube_rotations();
  std::stable_sort(net.rotations.begin(), net.rotations.end(), [](const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    return (a - Eigen::Matrix3d::Identity()).norm() < (b - Eigen::Matrix3d::Identity()).norm();
  });
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  detail::PointGrid grid(spacing);
  std::vector<Eigen::Vector3d> normal;

  auto accept_orbit = [&](const std::vector<hyp::HPoint>& orbit) {
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j)
        if (hyp::distance(orbit[i], orbit[j]) < spacing) return false;
      bool clash = false;
      grid.around(detail::normal_coords(orbit[i]), 1, [&](int id) {
        if (!clash && hyp::distance(orbit[i], net.points[static_cast<std::size_t>(id)]) < spacing) clash = true;
      });
      if (clash) return false;
    }
    return true;
  };

  // The origin is a fixed point of the whole group; seed the net with it.
  net.points.push_back(hyp::HPoint::origin(3));
  normal.push_back(Eigen::Vector3d::Zero());
  grid.insert(normal.back(), 0);

  const double sinh_r = std::sinh(radius);
  for (int misses = 0; misses < patience;) {
    double r;
    do {
      r = radius * u01(rng);
    } while (u01(rng) * sinh_r * sinh_r > std::sinh(r) * std::sinh(r));
    // A quarter of the candidates sit on rotation axes (orbits of 6, 8 or 12
    // points); generic orbits cannot fill the region near the axes.
    Eigen::VectorXd dir;
    const double kind = u01(rng);
    if (kind < 0.75) {
      dir = random_unit_vector(rng, 3);
    } else {
      dir = Eigen::Vector3d(1.0, kind < 0.9 ? 1.0 : 0.0, kind < 0.83 ? 1.0 : 0.0);
      dir.normalize();
    }
    const hyp::HPoint p = hyp::polar_point(dir, r);
    std::vector<hyp::HPoint> orbit;
    for (const auto& q : net.rotations) {
      const hyp::HPoint img = hyp::HIsometry::rotation(q).apply(p);
      if (std::none_of(orbit.begin(), orbit.end(), [&](const hyp::HPoint& o) { return hyp::distance(o, img) < 1e-9; }))
        orbit.push_back(img);
    }
    if (!accept_orbit(orbit)) {
      ++misses;
      continue;
    }
    misses = 0;
    for (const auto& q : orbit) {
      const int id = static_cast<int>(net.points.size());
      net.points.push_back(q);
      normal.push_back(detail::normal_coords(q));
      grid.insert(normal.back(), id);
    }
  }

  const int n = static_cast<int>(net.points.size());
  std::vector<MMGraph::Edge> edges;
  const int reach = static_cast<int>(std::ceil(connection / spacing));
  for (int i = 0; i < n; ++i)
    grid.around(normal[static_cast<std::size_t>(i)], reach, [&](int j) {
      if (j <= i) return;
      const double d = hyp::distance(net.points[static_cast<std::size_t>(i)], net.points[static_cast<std::size_t>(j)]);
      if (d < connection) edges.push_back({i, j, d});
    });
  std::sort(edges.begin(), edges.end(), [](const MMGraph::Edge& a, const MMGraph::Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  net.graph = MMGraph::from_edges(n, std::move(edges));

  // Deck permutations; images agree with net points up to rounding of the time coordinate.
  for (const auto& q : net.rotations) {
    const hyp::HIsometry g = hyp::HIsometry::rotation(q);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const hyp::HPoint img = g.apply(net.points[static_cast<std::size_t>(i)]);
      int found = -1;
      grid.around(detail::normal_coords(img), 1, [&](int j) {
        if (hyp::distance(img, net.points[static_cast<std::size_t>(j)]) < 1e-9) found = j;
      });
      if (found < 0) throw InvalidGraph("net is not closed under the symmetry group");
      perm[static_cast<std::size_t>(i)] = found;
    }
    net.deck.push_back(std::move(perm));
  }
  // The deck maps must be graph automorphisms.
  std::map<std::pair<int, int>, double> lengths;
  for (const auto& e : net.graph.edges()) lengths[{e.u, e.v}] = e.len;
  for (const auto& perm : net.deck)
    for (const auto& e : net.graph.edges()) {
      int a = perm[static_cast<std::size_t>(e.u)], b = perm[static_cast<std::size_t>(e.v)];
      if (a > b) std::swap(a, b);
      auto it = lengths.find({a, b});
      if (it == lengths.end() || std::abs(it->second - e.len) > 1e-12)
        throw InvalidGraph("symmetry does not act by graph automorphisms");
    }
  net.center = 0;
  return net;
}

}  // namespace barylab::fixtures
