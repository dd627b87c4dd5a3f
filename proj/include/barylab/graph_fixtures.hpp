#pragma once

#include "barylab/graph.hpp"

namespace barylab::fixtures {

/// Path 0 - 1 - ... - (n-1).
inline MMGraph path_graph(int n, double len = 1.0) {
  std::vector<MMGraph::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, len});
  return MMGraph::from_edges(n, std::move(edges));
}

inline MMGraph cycle_graph(int n, double len = 1.0) {
  std::vector<MMGraph::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, len});
  return MMGraph::from_edges(n, std::move(edges));
}

/// Ball of radius `depth` about the root of the k-regular tree, unit edges and
/// unit vertex measure. Vertex 0 is the root; vertices are in BFS order.
inline MMGraph regular_tree(int k, int depth) {
  std::vector<MMGraph::Edge> edges;
  std::vector<int> frontier{0};
  int next = 1;
  for (int level = 0; level < depth; ++level) {
    std::vector<int> grown;
    for (int v : frontier) {
      const int children = level == 0 ? k : k - 1;
      for (int c = 0; c < children; ++c) {
        edges.push_back({v, next, 1.0});
        grown.push_back(next++);
      }
    }
    frontier = std::move(grown);
  }
  return MMGraph::from_edges(next, std::move(edges));
}

/// Two vertices joined by three unit edges; its universal cover is the 3-regular tree.
inline MMGraph theta_graph() { return MMGraph::from_edges(2, {{0, 1, 1.0}, {0, 1, 1.0}, {0, 1, 1.0}}); }

/// One vertex with r unit loops; its universal cover is the 2r-regular tree.
inline MMGraph bouquet(int r) {
  std::vector<MMGraph::Edge> edges;
  for (int i = 0; i < r; ++i) edges.push_back({0, 0, 1.0});
  return MMGraph::from_edges(1, std::move(edges));
}

/// Universal cover of the theta graph truncated at `radius` (free voltages on
/// the two non-tree edges).
inline LiftedBall<FreeGroup> theta_universal_cover(double radius) {
  const FreeGroup f{2};
  const std::vector<FreeGroup::element> volt{f.identity(), f.letter(0), f.letter(1)};
  const std::vector<FreeGroup::element> inv{f.identity(), {-1}, {-2}};
  return lift_ball(theta_graph(), f, volt, inv, 0, radius);
}

}  // namespace barylab::fixtures
