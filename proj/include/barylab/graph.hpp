#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "barylab/errors.hpp"
#include "barylab/hyperbolic.hpp"

namespace barylab {

/// Metric measure graph: positive edge lengths, nonnegative vertex measure,
/// shortest-path metric. Loops and parallel edges are allowed (base graphs of
/// covers are often bouquets). Immutable after construction.
class MMGraph {
 public:
  struct Edge {
    int u;
    int v;
    double len;
  };
  struct HalfEdge {
    int to;
    int edge;
    bool forward;  // traversed u -> v
  };

  MMGraph() = default;

  MMGraph(std::vector<std::string> labels, std::vector<Edge> edges, std::vector<double> measure,
          bool require_connected = true)
      : labels_(std::move(labels)), edges_(std::move(edges)), measure_(std::move(measure)) {
    const int n = static_cast<int>(labels_.size());
    if (n == 0) throw InvalidGraph("graph has no vertices");
    if (static_cast<int>(measure_.size()) != n) throw InvalidGraph("measure length differs from vertex count");
    for (int i = 0; i < n; ++i) {
      auto [it, ok] = index_.emplace(labels_[i], i);
      if (!ok) throw InvalidGraph("duplicate vertex label '" + labels_[i] + "'");
    }
    adj_.assign(n, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      const Edge& ed = edges_[e];
      if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n) throw InvalidGraph("edge endpoint out of range");
      if (!(ed.len > 0.0) || !std::isfinite(ed.len)) {
        std::ostringstream os;
        os << "edge " << e << " has non-positive length " << ed.len;
        throw InvalidGraph(os.str());
      }
      adj_[ed.u].push_back({ed.v, e, true});
      adj_[ed.v].push_back({ed.u, e, false});
    }
    double total = 0.0;
    for (double w : measure_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidGraph("vertex measure must be finite and nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidGraph("total measure must be positive");
    total_ = total;
    if (require_connected) {
      const auto comps = components();
      if (comps.size() > 1) {
        std::ostringstream os;
        os << "graph is disconnected (" << comps.size() << " components)";
        throw InvalidGraph(os.str());
      }
    }
  }

  /// Vertices labelled "0" .. "n-1".
  static MMGraph from_edges(int n, std::vector<Edge> edges, std::vector<double> measure = {},
                            bool require_connected = true) {
    std::vector<std::string> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = std::to_string(i);
    if (measure.empty()) measure.assign(static_cast<std::size_t>(n), 1.0);
    return MMGraph(std::move(labels), std::move(edges), std::move(measure), require_connected);
  }

  [[nodiscard]] int size() const { return static_cast<int>(labels_.size()); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<HalfEdge>& adjacency(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
  [[nodiscard]] const std::string& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] double measure(int v) const { return measure_.at(static_cast<std::size_t>(v)); }
  [[nodiscard]] const std::vector<double>& measures() const { return measure_; }
  [[nodiscard]] double total_measure() const { return total_; }

  [[nodiscard]] int index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw LookupError("unknown vertex '" + label + "'");
    return it->second;
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= size()) throw LookupError("unknown vertex index " + std::to_string(v));
  }

  /// Single-source shortest paths; vertices beyond `cutoff` stay at +inf.
  [[nodiscard]] std::vector<double> distances_from(int x,
                                                   double cutoff = std::numeric_limits<double>::infinity()) const {
    check_vertex(x);
    std::vector<double> dist(static_cast<std::size_t>(size()), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(x)] = 0.0;
    pq.push({0.0, x});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      for (const auto& h : adj_[static_cast<std::size_t>(u)]) {
        const double nd = d + edges_[static_cast<std::size_t>(h.edge)].len;
        if (nd <= cutoff && nd < dist[static_cast<std::size_t>(h.to)]) {
          dist[static_cast<std::size_t>(h.to)] = nd;
          pq.push({nd, h.to});
        }
      }
    }
    return dist;
  }

  [[nodiscard]] double ball_measure(int x, double radius) const {
    if (!(radius >= 0.0)) throw DomainError("ball radius must be nonnegative");
    const auto dist = distances_from(x, radius);
    double m = 0.0;
    for (int v = 0; v < size(); ++v)
      if (dist[static_cast<std::size_t>(v)] <= radius) m += measure_[static_cast<std::size_t>(v)];
    return m;
  }

  /// Connected components, each sorted, ordered by smallest vertex.
  [[nodiscard]] std::vector<std::vector<int>> components() const {
    std::vector<int> comp(static_cast<std::size_t>(size()), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < size(); ++s) {
      if (comp[static_cast<std::size_t>(s)] >= 0) continue;
      std::vector<int> members{s}, stack{s};
      comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& h : adj_[static_cast<std::size_t>(u)])
          if (comp[static_cast<std::size_t>(h.to)] < 0) {
            comp[static_cast<std::size_t>(h.to)] = static_cast<int>(out.size());
            members.push_back(h.to);
            stack.push_back(h.to);
          }
      }
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    return out;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<double> measure_;
  std::vector<std::vector<HalfEdge>> adj_;
  std::map<std::string, int> index_;
  double total_ = 0.0;
};

struct EntropyEstimate {
  double h = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double residual = 0.0;  // RMS of the log-growth regression
  std::vector<double> radii;
  std::vector<double> log_mass;
};

/// Least-squares slope of log m(B(x, R)) against R for R = r_min, r_min + step, ... <= r_max.
inline EntropyEstimate volume_entropy(const MMGraph& g, int x, double r_min, double r_max, double step = 1.0) {
  g.check_vertex(x);
  if (!(r_min >= 1.0) || !(r_max > r_min)) throw DomainError("entropy window needs r_max > r_min >= 1");
  if (!(step > 0.0)) throw DomainError("entropy step must be positive");
  const auto dist = g.distances_from(x);
  double reach = 0.0;
  for (int v = 0; v < g.size(); ++v) reach = std::max(reach, dist[static_cast<std::size_t>(v)]);
  if (reach <= r_max) {
    std::ostringstream os;
    os << "ball of radius " << r_max << " already covers the whole graph (eccentricity " << reach << ")";
    throw WindowTooLarge(os.str());
  }
  std::vector<int> order(static_cast<std::size_t>(g.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]; });

  EntropyEstimate est;
  est.r_min = r_min;
  est.r_max = r_max;
  std::size_t k = 0;
  double mass = 0.0;
  const int samples = static_cast<int>(std::floor((r_max - r_min) / step + 1e-9)) + 1;
  for (int i = 0; i < samples; ++i) {
    const double r = r_min + i * step;
    while (k < order.size() && dist[static_cast<std::size_t>(order[k])] <= r) mass += g.measure(order[k++]);
    if (!(mass > 0.0)) throw DomainError("ball of zero measure inside the entropy window");
    est.radii.push_back(r);
    est.log_mass.push_back(std::log(mass));
  }
  const double n = static_cast<double>(samples);
  const double mr = std::accumulate(est.radii.begin(), est.radii.end(), 0.0) / n;
  const double ml = std::accumulate(est.log_mass.begin(), est.log_mass.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < samples; ++i) {
    sxy += (est.radii[i] - mr) * (est.log_mass[i] - ml);
    sxx += (est.radii[i] - mr) * (est.radii[i] - mr);
  }
  est.h = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double fit = ml + est.h * (est.radii[i] - mr);
    ss += (est.log_mass[i] - fit) * (est.log_mass[i] - fit);
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

enum class LipschitzMode { AllPairs, Edges };

/// max d'(f u, f v) / d(u, v), where `image_dist(u, v)` gives d'(f u, f v).
/// Edge mode divides by edge lengths, which bounds the all-pairs value when
/// every edge is a shortest path.
template <class ImageDist>
double lipschitz_constant_with(const MMGraph& g, ImageDist&& image_dist, LipschitzMode mode = LipschitzMode::AllPairs) {
  double lip = 0.0;
  if (mode == LipschitzMode::Edges) {
    for (const auto& e : g.edges())
      if (e.u != e.v) lip = std::max(lip, image_dist(e.u, e.v) / e.len);
    return lip;
  }
  for (int u = 0; u < g.size(); ++u) {
    const auto dist = g.distances_from(u);
    for (int v = u + 1; v < g.size(); ++v)
      if (dist[static_cast<std::size_t>(v)] > 0.0) lip = std::max(lip, image_dist(u, v) / dist[static_cast<std::size_t>(v)]);
  }
  return lip;
}

inline double lipschitz_constant(const MMGraph& g, const MMGraph& target, const std::vector<int>& f,
                                 LipschitzMode mode = LipschitzMode::AllPairs) {
  if (static_cast<int>(f.size()) != g.size()) throw InvalidInput("vertex map must be total");
  for (int v : f) target.check_vertex(v);
  std::map<int, std::vector<double>> cache;
  auto d = [&](int u, int v) {
    auto it = cache.find(f[static_cast<std::size_t>(u)]);
    if (it == cache.end()) it = cache.emplace(f[static_cast<std::size_t>(u)], target.distances_from(f[static_cast<std::size_t>(u)])).first;
    return it->second[static_cast<std::size_t>(f[static_cast<std::size_t>(v)])];
  };
  return lipschitz_constant_with(g, d, mode);
}

inline double lipschitz_constant(const MMGraph& g, const std::vector<hyp::HPoint>& f,
                                 LipschitzMode mode = LipschitzMode::AllPairs) {
  if (static_cast<int>(f.size()) != g.size()) throw InvalidInput("vertex map must be total");
  return lipschitz_constant_with(
      g, [&](int u, int v) { return hyp::distance(f[static_cast<std::size_t>(u)], f[static_cast<std::size_t>(v)]); },
      mode);
}

// ---------------------------------------------------------------------------
// Covers

/// Permutations in 0-based one-line notation: p[i] is the image of sheet i.
using Permutation = std::vector<int>;

inline Permutation permutation_from_one_line(const std::vector<int>& one_based) {
  const int k = static_cast<int>(one_based.size());
  Permutation p(static_cast<std::size_t>(k));
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    const int v = one_based[static_cast<std::size_t>(i)] - 1;
    if (v < 0 || v >= k || seen[static_cast<std::size_t>(v)]) throw InvalidInput("not a permutation of 1..k");
    seen[static_cast<std::size_t>(v)] = 1;
    p[static_cast<std::size_t>(i)] = v;
  }
  return p;
}

inline Permutation inverse_permutation(const Permutation& p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return q;
}

struct CoverMap {
  MMGraph total;
  MMGraph base;
  int sheets = 0;
  std::vector<int> projection;          // total vertex -> base vertex
  std::vector<std::vector<int>> deck;   // each a vertex permutation of total, identity first

  [[nodiscard]] int lift(int base_vertex, int sheet) const { return base_vertex * sheets + sheet; }
};

namespace detail {

/// Extends base_vertex*k+0 -> base_vertex*k+target_sheet to a deck transformation, if one exists.
inline std::optional<std::vector<int>> extend_deck(const MMGraph& base, const std::vector<Permutation>& volt,
                                                   int k, int start, int target_sheet) {
  const int n = base.size();
  std::vector<int> img(static_cast<std::size_t>(n * k), -1);
  std::vector<int> stack{start * k};
  img[static_cast<std::size_t>(start * k)] = start * k + target_sheet;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    const int u = a / k, i = a % k, j = img[static_cast<std::size_t>(a)] % k;
    for (const auto& h : base.adjacency(u)) {
      const Permutation& s = volt[static_cast<std::size_t>(h.edge)];
      int ni, nj;
      if (h.forward) {
        ni = s[static_cast<std::size_t>(i)], nj = s[static_cast<std::size_t>(j)];
      } else {
        const Permutation inv = inverse_permutation(s);
        ni = inv[static_cast<std::size_t>(i)], nj = inv[static_cast<std::size_t>(j)];
      }
      const int na = h.to * k + ni, nb = h.to * k + nj;
      int& slot = img[static_cast<std::size_t>(na)];
      if (slot < 0) {
        slot = nb;
        stack.push_back(na);
      } else if (slot != nb) {
        return std::nullopt;
      }
    }
  }
  return img;
}

}  // namespace detail

/// k-sheeted cover from permutation voltages (one per base edge). Lifted
/// vertex (v, i) has index v*k + i and carries the measure of v; the lift of
/// edge e = (u, v) joins (u, i) to (v, volt_e(i)).
inline CoverMap build_cover(const MMGraph& base, const std::vector<Permutation>& voltage) {
  if (voltage.size() != base.edges().size()) throw InvalidInput("one permutation per base edge is required");
  const int k = voltage.empty() ? 1 : static_cast<int>(voltage.front().size());
  if (k < 1) throw InvalidInput("empty permutation");
  for (const auto& p : voltage) {
    if (static_cast<int>(p.size()) != k) throw InvalidInput("permutations of different degrees");
    std::vector<int> one(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) one[i] = p[i] + 1;
    permutation_from_one_line(one);  // validates
  }
  const int n = base.size();
  std::vector<std::string> labels;
  std::vector<double> measure;
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i) {
      labels.push_back(base.label(v) + "#" + std::to_string(i + 1));
      measure.push_back(base.measure(v));
    }
  std::vector<MMGraph::Edge> edges;
  for (std::size_t e = 0; e < base.edges().size(); ++e) {
    const auto& ed = base.edges()[e];
    for (int i = 0; i < k; ++i)
      edges.push_back({ed.u * k + i, ed.v * k + voltage[e][static_cast<std::size_t>(i)], ed.len});
  }
  MMGraph total(std::move(labels), std::move(edges), std::move(measure), false);
  const auto comps = total.components();
  if (comps.size() > 1) {
    std::ostringstream os;
    os << "voltage is not transitive: total graph has " << comps.size() << " components:";
    for (const auto& c : comps) {
      os << " {";
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << total.label(c[i]);
      os << "}";
    }
    throw NonTransitiveVoltage(os.str());
  }
  CoverMap cm{std::move(total), base, k, {}, {}};
  cm.projection.resize(static_cast<std::size_t>(n * k));
  for (int a = 0; a < n * k; ++a) cm.projection[static_cast<std::size_t>(a)] = a / k;
  for (int j = 0; j < k; ++j)
    if (auto d = detail::extend_deck(base, voltage, k, 0, j)) cm.deck.push_back(std::move(*d));
  return cm;
}

// ---------------------------------------------------------------------------
// Lazy lifts with group-valued voltages (universal covers, abelian covers).

struct PermutationGroup {
  using element = Permutation;
  int degree;
  [[nodiscard]] element identity() const {
    element e(static_cast<std::size_t>(degree));
    std::iota(e.begin(), e.end(), 0);
    return e;
  }
  /// Right action convention: x * y applies x first.
  [[nodiscard]] element mul(const element& x, const element& y) const {
    element r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = y[static_cast<std::size_t>(x[i])];
    return r;
  }
};

/// Free group on `rank` letters; words are sequences of +-(i+1), freely reduced.
struct FreeGroup {
  using element = std::vector<int>;
  int rank;
  [[nodiscard]] element identity() const { return {}; }
  [[nodiscard]] element mul(const element& x, const element& y) const {
    element r = x;
    for (int l : y) {
      if (!r.empty() && r.back() == -l)
        r.pop_back();
      else
        r.push_back(l);
    }
    return r;
  }
  [[nodiscard]] element letter(int i) const { return {i + 1}; }
};

/// Z^r under addition.
struct LatticeGroup {
  using element = std::vector<long>;
  int rank;
  [[nodiscard]] element identity() const { return element(static_cast<std::size_t>(rank), 0); }
  [[nodiscard]] element mul(const element& x, const element& y) const {
    element r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += y[i];
    return r;
  }
  [[nodiscard]] element unit(int i) const {
    element e = identity();
    e[static_cast<std::size_t>(i)] = 1;
    return e;
  }
};

template <class Group>
struct LiftedBall {
  MMGraph graph;
  std::vector<int> projection;
  std::vector<typename Group::element> group_coord;
  int root = 0;
};

/// The part of the derived cover (vertices (v, g), edge e=(u,v) joining (u, g)
/// to (v, g*volt_e)) within distance `radius` of (x, identity). Lifts carry the
/// base measure. Walking e backwards multiplies by inverse_voltage[e].
template <class Group>
LiftedBall<Group> lift_ball(const MMGraph& base, const Group& grp,
                            const std::vector<typename Group::element>& voltage,
                            const std::vector<typename Group::element>& inverse_voltage, int x, double radius) {
  using Elem = typename Group::element;
  base.check_vertex(x);
  if (voltage.size() != base.edges().size() || inverse_voltage.size() != voltage.size())
    throw InvalidInput("one voltage per base edge is required");
  std::map<std::pair<int, Elem>, int> index;
  LiftedBall<Group> out;
  std::vector<double> dist;
  std::vector<MMGraph::Edge> edges;
  std::vector<std::string> labels;
  std::vector<double> measure;

  auto intern = [&](int v, const Elem& g) {
    auto [it, fresh] = index.try_emplace({v, g}, static_cast<int>(out.projection.size()));
    if (fresh) {
      out.projection.push_back(v);
      out.group_coord.push_back(g);
      dist.push_back(std::numeric_limits<double>::infinity());
      labels.push_back(base.label(v) + "@" + std::to_string(it->second));
      measure.push_back(base.measure(v));
    }
    return it->second;
  };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  out.root = intern(x, grp.identity());
  dist[0] = 0.0;
  pq.push({0.0, 0});
  while (!pq.empty()) {
    auto [d, a] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(a)]) continue;
    const int u = out.projection[static_cast<std::size_t>(a)];
    const Elem ga = out.group_coord[static_cast<std::size_t>(a)];
    for (const auto& h : base.adjacency(u)) {
      const double nd = d + base.edges()[static_cast<std::size_t>(h.edge)].len;
      if (nd > radius) continue;
      const Elem gb = grp.mul(ga, h.forward ? voltage[static_cast<std::size_t>(h.edge)]
                                             : inverse_voltage[static_cast<std::size_t>(h.edge)]);
      const int b = intern(h.to, gb);
      if (nd < dist[static_cast<std::size_t>(b)]) {
        dist[static_cast<std::size_t>(b)] = nd;
        pq.push({nd, b});
      }
    }
  }
  // Edges among the retained vertices, each lifted edge once (from its u-end).
  for (int a = 0; a < static_cast<int>(out.projection.size()); ++a) {
    const int u = out.projection[static_cast<std::size_t>(a)];
    for (const auto& h : base.adjacency(u)) {
      if (!h.forward) continue;
      const Elem gb = grp.mul(out.group_coord[static_cast<std::size_t>(a)], voltage[static_cast<std::size_t>(h.edge)]);
      auto it = index.find({h.to, gb});
      if (it != index.end()) edges.push_back({a, it->second, base.edges()[static_cast<std::size_t>(h.edge)].len});
    }
  }
  out.graph = MMGraph(std::move(labels), std::move(edges), std::move(measure));
  return out;
}

}  // namespace barylab
