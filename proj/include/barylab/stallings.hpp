#pragma once

// Subgroups of free groups through Stallings foldings, and the fundamental
// index of graph maps (graphs have free fundamental groups).
// Words are strings over a, b, c, ... with capitals for inverses.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "barylab/errors.hpp"
#include "barylab/graph.hpp"
#include "barylab/random.hpp"
#include "barylab/simplicial.hpp"

namespace barylab {

/// Letters are +(i+1) for generator i and -(i+1) for its inverse.
using Word = std::vector<int>;

inline Word reduce_word(const Word& w) {
  Word out;
  for (int x : w) {
    if (x == 0) throw InvalidInput("letter 0 is not a generator");
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return reduce_word(a);
}

inline Word parse_word(const std::string& s, int rank) {
  Word w;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (!std::isalpha(static_cast<unsigned char>(ch))) throw InvalidInput(std::string("bad letter '") + ch + "' in word");
    const int idx = std::tolower(static_cast<unsigned char>(ch)) - 'a';
    if (idx >= rank) throw InvalidInput(std::string("letter '") + ch + "' exceeds the rank");
    w.push_back(std::islower(static_cast<unsigned char>(ch)) ? idx + 1 : -(idx + 1));
  }
  return reduce_word(w);
}

inline std::string format_word(const Word& w) {
  std::string s;
  for (int x : w) s.push_back(x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1));
  return s;
}

/// Labeled directed graph with a basepoint; vertex 0 is the basepoint.
struct FoldedGraph {
  struct Edge {
    int from, to, label;
  };
  int rank = 0;
  int vertices = 1;
  std::vector<Edge> edges;

  [[nodiscard]] bool is_folded() const {
    std::map<std::tuple<int, int, int>, int> seen;  // (vertex, label, direction)
    for (const auto& e : edges) {
      if (seen[{e.from, e.label, 0}]++ > 0) return false;
      if (seen[{e.to, e.label, 1}]++ > 0) return false;
    }
    return true;
  }

  /// Every vertex has one outgoing and one incoming edge of every label.
  [[nodiscard]] bool is_complete() const {
    if (!is_folded()) return false;
    return static_cast<int>(edges.size()) == vertices * rank;
  }

  /// Basepointed canonical encoding: BFS from the basepoint with neighbours
  /// ordered by (label, direction). Equal strings mean isomorphic graphs.
  [[nodiscard]] std::string canonical_form() const {
    std::vector<std::vector<std::tuple<int, int, int>>> adj(static_cast<std::size_t>(vertices));
    for (const auto& e : edges) {
      adj[static_cast<std::size_t>(e.from)].push_back({e.label, 0, e.to});
      adj[static_cast<std::size_t>(e.to)].push_back({e.label, 1, e.from});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    std::vector<int> num(static_cast<std::size_t>(vertices), -1);
    std::queue<int> q;
    num[0] = 0;
    q.push(0);
    int next = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& [l, dir, w] : adj[static_cast<std::size_t>(v)])
        if (num[static_cast<std::size_t>(w)] < 0) {
          num[static_cast<std::size_t>(w)] = next++;
          q.push(w);
        }
    }
    std::vector<std::tuple<int, int, int>> enc;
    for (const auto& e : edges)
      enc.push_back({num[static_cast<std::size_t>(e.from)], num[static_cast<std::size_t>(e.to)], e.label});
    std::sort(enc.begin(), enc.end());
    std::ostringstream os;
    os << "r" << rank << " v" << next << ":";
    for (const auto& [a, b, l] : enc) os << ' ' << a << '>' << b << ':' << l;
    return os.str();
  }
};

/// Wedge of loops at the basepoint, one per (reduced) word.
inline FoldedGraph wedge_of_words(const std::vector<Word>& words, int rank) {
  FoldedGraph g;
  g.rank = rank;
  for (const auto& raw : words) {
    const Word w = reduce_word(raw);
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const int nxt = i + 1 == w.size() ? 0 : g.vertices++;
      const int l = std::abs(w[i]) - 1;
      if (l >= rank) throw InvalidInput("word letter exceeds the rank");
      if (w[i] > 0)
        g.edges.push_back({cur, nxt, l});
      else
        g.edges.push_back({nxt, cur, l});
      cur = nxt;
    }
  }
  return g;
}

namespace detail {

inline int find_root(std::vector<int>& p, int v) {
  while (p[static_cast<std::size_t>(v)] != v) {
    p[static_cast<std::size_t>(v)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])];
    v = p[static_cast<std::size_t>(v)];
  }
  return v;
}

/// Renumbers vertices compactly, keeping the basepoint at 0.
inline FoldedGraph compact(const FoldedGraph& g, std::vector<int>& parent, const std::vector<bool>& removed) {
  std::vector<int> id(static_cast<std::size_t>(g.vertices), -1);
  FoldedGraph out;
  out.rank = g.rank;
  out.vertices = 0;
  auto number = [&](int v) {
    const int r = find_root(parent, v);
    if (id[static_cast<std::size_t>(r)] < 0) id[static_cast<std::size_t>(r)] = out.vertices++;
    return id[static_cast<std::size_t>(r)];
  };
  number(0);
  for (int v = 0; v < g.vertices; ++v) number(v);
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (!removed[i]) out.edges.push_back({number(g.edges[i].from), number(g.edges[i].to), g.edges[i].label});
  return out;
}

}  // namespace detail

/// Folds until no vertex has two outgoing or two incoming edges with the same
/// label. With no rng the next fold is the lowest (vertex, label, direction,
/// edge pair) conflict; with an rng it is a uniformly random conflict.
inline FoldedGraph fold(const FoldedGraph& input, Rng* rng = nullptr) {
  FoldedGraph g = input;
  std::vector<int> parent(static_cast<std::size_t>(g.vertices));
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> removed(g.edges.size(), false);
  for (;;) {
    // key (vertex, label, direction) -> live edges
    std::map<std::tuple<int, int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if (removed[i]) continue;
      const int a = detail::find_root(parent, g.edges[i].from), b = detail::find_root(parent, g.edges[i].to);
      groups[{a, g.edges[i].label, 0}].push_back(i);
      groups[{b, g.edges[i].label, 1}].push_back(i);
    }
    std::vector<std::tuple<int, int, int, std::size_t, std::size_t>> conflicts;
    for (const auto& [key, list] : groups)
      for (std::size_t x = 0; x < list.size(); ++x)
        for (std::size_t y = x + 1; y < list.size(); ++y)
          conflicts.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), list[x], list[y]});
    if (conflicts.empty()) break;
    std::size_t pick = 0;
    if (rng) pick = std::uniform_int_distribution<std::size_t>(0, conflicts.size() - 1)(*rng);
    const auto [v, l, dir, e1, e2] = conflicts[pick];
    const auto& a = g.edges[e1];
    const auto& b = g.edges[e2];
    const int u = detail::find_root(parent, dir == 0 ? a.to : a.from);
    const int w = detail::find_root(parent, dir == 0 ? b.to : b.from);
    if (u != w) parent[static_cast<std::size_t>(std::max(u, w))] = std::min(u, w);
    removed[e2] = true;  // both edges now coincide
  }
  return detail::compact(g, parent, removed);
}

/// Removes hanging trees away from the basepoint.
inline FoldedGraph core_graph(const FoldedGraph& g) {
  std::vector<bool> removed(g.edges.size(), false), gone(static_cast<std::size_t>(g.vertices), false);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> deg(static_cast<std::size_t>(g.vertices), 0);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      if (!removed[i]) ++deg[static_cast<std::size_t>(g.edges[i].from)], ++deg[static_cast<std::size_t>(g.edges[i].to)];
    for (int v = 1; v < g.vertices; ++v) {
      if (gone[static_cast<std::size_t>(v)] || deg[static_cast<std::size_t>(v)] > 1) continue;
      gone[static_cast<std::size_t>(v)] = true;
      changed = true;
      for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (!removed[i] && (g.edges[i].from == v || g.edges[i].to == v)) removed[i] = true;
    }
  }
  FoldedGraph out;
  out.rank = g.rank;
  out.vertices = 0;
  std::vector<int> id(static_cast<std::size_t>(g.vertices), -1);
  for (int v = 0; v < g.vertices; ++v)
    if (!gone[static_cast<std::size_t>(v)]) id[static_cast<std::size_t>(v)] = out.vertices++;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (!removed[i]) out.edges.push_back({id[static_cast<std::size_t>(g.edges[i].from)], id[static_cast<std::size_t>(g.edges[i].to)], g.edges[i].label});
  return out;
}

inline FoldedGraph stallings_graph(const std::vector<Word>& generators, int rank, Rng* rng = nullptr) {
  return core_graph(fold(wedge_of_words(generators, rank), rng));
}

/// Index of the subgroup generated by `generators` in the free group of the
/// given rank; 0 when the index is infinite.
inline int stallings_index(const std::vector<Word>& generators, int rank) {
  if (rank < 0) throw InvalidInput("rank must be nonnegative");
  if (rank == 0) return 1;
  const FoldedGraph g = stallings_graph(generators, rank);
  return g.is_complete() ? g.vertices : 0;
}

inline int stallings_index(const std::vector<std::string>& generators, int rank) {
  std::vector<Word> w;
  for (const auto& s : generators) w.push_back(parse_word(s, rank));
  return stallings_index(w, rank);
}

// ---------------------------------------------------------------- graph maps

/// A graph map: vertices to vertices, each edge onto an edge (with direction)
/// or collapsed to a vertex (edge = -1).
struct GraphMap {
  struct EdgeImage {
    int edge = -1;
    bool forward = true;
  };
  MMGraph domain;
  MMGraph target;
  std::vector<int> vertex_map;
  std::vector<EdgeImage> edge_map;

  void validate() const {
    if (static_cast<int>(vertex_map.size()) != domain.size()) throw InvalidInput("vertex map has the wrong size");
    if (edge_map.size() != domain.edges().size()) throw InvalidInput("edge map has the wrong size");
    for (int v : vertex_map) target.check_vertex(v);
    for (std::size_t i = 0; i < edge_map.size(); ++i) {
      const auto& d = domain.edges()[i];
      const int fu = vertex_map[static_cast<std::size_t>(d.u)], fv = vertex_map[static_cast<std::size_t>(d.v)];
      const auto& im = edge_map[i];
      if (im.edge < 0) {
        if (fu != fv) throw InvalidInput("collapsed edge with distinct endpoint images");
        continue;
      }
      if (im.edge >= static_cast<int>(target.edges().size())) throw InvalidInput("edge image out of range");
      const auto& t = target.edges()[static_cast<std::size_t>(im.edge)];
      const int a = im.forward ? t.u : t.v, b = im.forward ? t.v : t.u;
      if (a != fu || b != fv) throw InvalidInput("edge image does not match the vertex map");
    }
  }
};

inline GraphMap cover_graph_map(const CoverMap& cm) {
  GraphMap m{cm.total, cm.base, cm.projection, {}};
  for (std::size_t e = 0; e < cm.total.edges().size(); ++e)
    m.edge_map.push_back({static_cast<int>(e / static_cast<std::size_t>(cm.sheets)), true});
  return m;
}

/// The graph map underlying a one-dimensional simplicial map; edge lengths
/// are the Euclidean lengths of the simplices.
inline GraphMap graph_map_of(const PLMap& f) {
  if (f.domain.dim != 1 || !f.vertex_map) throw InvalidInput("need a one-dimensional simplicial map");
  auto as_graph = [](const SimplicialComplex& k) {
    std::vector<MMGraph::Edge> edges;
    for (std::size_t i = 0; i < k.simplices.size(); ++i)
      edges.push_back({k.simplices[i][0], k.simplices[i][1], k.volume(i)});
    return MMGraph::from_edges(k.vertex_count(), std::move(edges));
  };
  GraphMap m{as_graph(f.domain), as_graph(f.target), *f.vertex_map, {}};
  std::map<std::pair<int, int>, int> index;
  for (std::size_t i = 0; i < f.target.simplices.size(); ++i)
    index[{f.target.simplices[i][0], f.target.simplices[i][1]}] = static_cast<int>(i);
  for (const auto& s : f.domain.simplices) {
    const int a = (*f.vertex_map)[static_cast<std::size_t>(s[0])], b = (*f.vertex_map)[static_cast<std::size_t>(s[1])];
    if (a == b) {
      m.edge_map.push_back({-1, true});
    } else if (auto it = index.find({a, b}); it != index.end()) {
      m.edge_map.push_back({it->second, true});
    } else {
      m.edge_map.push_back({index.at({b, a}), false});
    }
  }
  return m;
}

namespace detail {

/// BFS spanning tree: parent half-edge per vertex (-1 at the root).
inline std::vector<MMGraph::HalfEdge> spanning_tree(const MMGraph& g, int root, std::vector<bool>& tree_edge) {
  std::vector<MMGraph::HalfEdge> up(static_cast<std::size_t>(g.size()), {-1, -1, true});
  std::vector<bool> seen(static_cast<std::size_t>(g.size()), false);
  tree_edge.assign(g.edges().size(), false);
  std::queue<int> q;
  q.push(root);
  seen[static_cast<std::size_t>(root)] = true;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const auto& h : g.adjacency(v)) {
      if (seen[static_cast<std::size_t>(h.to)]) continue;
      seen[static_cast<std::size_t>(h.to)] = true;
      tree_edge[static_cast<std::size_t>(h.edge)] = true;
      up[static_cast<std::size_t>(h.to)] = {v, h.edge, h.forward};  // reached from v along h
      q.push(h.to);
    }
  }
  return up;
}

}  // namespace detail

struct FundamentalImage {
  int rank = 0;                // rank of the free group pi_1(target)
  std::vector<Word> generators;  // images of a basis of pi_1(domain)
};

/// f_* of a basis of pi_1(domain, x0), written in the basis of pi_1(target,
/// f(x0)) given by the non-tree edges of a BFS spanning tree.
inline FundamentalImage fundamental_image(const GraphMap& f, int x0 = 0) {
  f.validate();
  std::vector<bool> ty, tx;
  detail::spanning_tree(f.target, f.vertex_map[static_cast<std::size_t>(x0)], ty);
  std::vector<int> letter(f.target.edges().size(), 0);
  FundamentalImage out;
  for (std::size_t e = 0; e < ty.size(); ++e)
    if (!ty[e]) letter[e] = ++out.rank;
  auto image = [&](int edge, bool forward) -> Word {
    const auto& im = f.edge_map[static_cast<std::size_t>(edge)];
    if (im.edge < 0 || letter[static_cast<std::size_t>(im.edge)] == 0) return {};
    const int l = letter[static_cast<std::size_t>(im.edge)];
    return {im.forward == forward ? l : -l};
  };
  const auto up = detail::spanning_tree(f.domain, x0, tx);
  // Word of the tree path x0 -> v.
  std::vector<std::optional<Word>> path(static_cast<std::size_t>(f.domain.size()));
  std::function<const Word&(int)> to = [&](int v) -> const Word& {
    auto& p = path[static_cast<std::size_t>(v)];
    if (!p) {
      const auto& h = up[static_cast<std::size_t>(v)];
      p = h.edge < 0 ? Word{} : concat(to(h.to), image(h.edge, h.forward));
    }
    return *p;
  };
  for (std::size_t e = 0; e < tx.size(); ++e) {
    if (tx[e]) continue;
    const auto& d = f.domain.edges()[e];
    Word w = concat(to(d.u), image(static_cast<int>(e), true));
    w = concat(w, inverse_word(to(d.v)));
    out.generators.push_back(w);
  }
  return out;
}

/// ind_pi of a graph map: [pi_1(target) : f_* pi_1(domain)], 0 if infinite.
inline int ind_pi(const GraphMap& f, int x0 = 0) {
  const FundamentalImage fi = fundamental_image(f, x0);
  return stallings_index(fi.generators, fi.rank);
}

/// Length-weighted average number of preimages of a generic point: each
/// domain edge mapped onto a target edge covers its interior once.
inline double graph_pre(const GraphMap& f) {
  f.validate();
  std::vector<int> count(f.target.edges().size(), 0);
  for (const auto& im : f.edge_map)
    if (im.edge >= 0) ++count[static_cast<std::size_t>(im.edge)];
  double num = 0.0, den = 0.0;
  for (std::size_t e = 0; e < count.size(); ++e) {
    num += f.target.edges()[e].len * count[e];
    den += f.target.edges()[e].len;
  }
  return num / den;
}

}  // namespace barylab
