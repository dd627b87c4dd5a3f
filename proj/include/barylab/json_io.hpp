#pragma once

// JSON readers and writers for the exchange formats used by the command-line
// tool. Readers raise InvalidInput (or the validating constructor's error) on
// malformed documents.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "barylab/errors.hpp"
#include "barylab/graph.hpp"
#include "barylab/hyperbolic.hpp"
#include "barylab/measure.hpp"
#include "barylab/simplicial.hpp"
#include "barylab/stallings.hpp"
#include "json.hpp"

namespace barylab::io {

using json = nlohmann::json;

inline json parse_json(const std::string& text, const std::string& what = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(what + ": malformed JSON: " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidInput(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw InvalidInput(std::string(what) + " must be an integer");
  return j.get<int>();
}

inline Eigen::VectorXd vector(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

inline Eigen::MatrixXd rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InvalidInput(std::string(what) + " must be a nonempty array of rows");
  const Eigen::VectorXd first = vector(j[0], what);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd r = vector(j[i], what);
    if (r.size() != first.size()) throw InvalidInput(std::string(what) + " has rows of different lengths");
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- hyperbolic

inline json to_json(const hyp::HPoint& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.coords().size(); ++i) out.push_back(p.coords()[i]);
  return out;
}

inline hyp::HPoint point_from_json(const json& j) { return hyp::HPoint::from_coords(detail::vector(j, "point")); }

inline json to_json(const hyp::HIsometry& g) { return detail::matrix_json(g.matrix()); }

inline hyp::HIsometry isometry_from_json(const json& j) {
  return hyp::HIsometry::from_matrix(detail::rows(j, "isometry"));
}

// ------------------------------------------------------------------ measures

/// {"atoms": [{"site": [x0, ..., xN], "w": w}, ...]}
inline PointMeasure point_measure_from_json(const json& j) {
  const json& atoms = detail::field(j, "atoms");
  if (!atoms.is_array()) throw InvalidInput("'atoms' must be an array");
  PointMeasure mu;
  for (const auto& a : atoms) mu.add(point_from_json(detail::field(a, "site")), detail::number(detail::field(a, "w"), "w"));
  return mu;
}

inline json to_json(const PointMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"site", to_json(a.site)}, {"w", a.w}});
  return {{"atoms", atoms}};
}

/// Sites are vertex labels (strings) or vertex indices.
inline VertexMeasure vertex_measure_from_json(const json& j, const MMGraph& g) {
  const json& atoms = detail::field(j, "atoms");
  if (!atoms.is_array()) throw InvalidInput("'atoms' must be an array");
  VertexMeasure mu;
  for (const auto& a : atoms) {
    const json& s = detail::field(a, "site");
    int v = 0;
    if (s.is_string()) {
      v = g.index_of(s.get<std::string>());
    } else {
      v = detail::integer(s, "site");
      g.check_vertex(v);
    }
    mu.add(v, detail::number(detail::field(a, "w"), "w"));
  }
  return mu;
}

// -------------------------------------------------------------------- graphs

/// {"vertices": [labels], "edges": [[u, v, len], ...], "measure": {label: w}}.
/// Edge endpoints are labels or indices; the measure defaults to 1 per vertex.
inline MMGraph graph_from_json(const json& j, bool require_connected = true) {
  const json& vs = detail::field(j, "vertices");
  if (!vs.is_array()) throw InvalidInput("'vertices' must be an array");
  std::vector<std::string> labels;
  std::map<std::string, int> index;
  for (const auto& v : vs) {
    std::string l = v.is_string() ? v.get<std::string>() : v.dump();
    index.emplace(l, static_cast<int>(labels.size()));
    labels.push_back(std::move(l));
  }
  auto endpoint = [&](const json& e) {
    if (e.is_string()) {
      auto it = index.find(e.get<std::string>());
      if (it == index.end()) throw InvalidInput("edge endpoint '" + e.get<std::string>() + "' is not a vertex");
      return it->second;
    }
    return detail::integer(e, "edge endpoint");
  };
  std::vector<MMGraph::Edge> edges;
  for (const auto& e : detail::field(j, "edges")) {
    if (!e.is_array() || e.size() != 3) throw InvalidInput("edges are [u, v, length] triples");
    edges.push_back({endpoint(e[0]), endpoint(e[1]), detail::number(e[2], "edge length")});
  }
  std::vector<double> measure(labels.size(), 1.0);
  if (j.contains("measure")) {
    const json& m = j.at("measure");
    if (!m.is_object()) throw InvalidInput("'measure' must be an object keyed by vertex label");
    for (const auto& [k, w] : m.items()) {
      auto it = index.find(k);
      if (it == index.end()) throw InvalidInput("measure names unknown vertex '" + k + "'");
      measure[static_cast<std::size_t>(it->second)] = detail::number(w, "measure");
    }
  }
  return MMGraph(std::move(labels), std::move(edges), std::move(measure), require_connected);
}

inline json to_json(const MMGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({g.label(e.u), g.label(e.v), e.len});
  json measure = json::object();
  for (int v = 0; v < g.size(); ++v) measure[g.label(v)] = g.measure(v);
  return {{"vertices", g.labels()}, {"edges", edges}, {"measure", measure}};
}

/// {"0": [2, 1, 3], "1": [...]}: one-line 1-based permutation per edge index.
inline std::vector<Permutation> voltage_from_json(const json& j, const MMGraph& base) {
  if (!j.is_object()) throw InvalidInput("voltage must be an object keyed by edge id");
  std::vector<Permutation> out(base.edges().size());
  std::vector<bool> seen(base.edges().size(), false);
  for (const auto& [k, p] : j.items()) {
    std::size_t e = 0;
    try {
      std::size_t used = 0;
      e = std::stoul(k, &used);
      if (used != k.size()) throw InvalidInput("");
    } catch (const std::exception&) {
      throw InvalidInput("voltage key '" + k + "' is not an edge index");
    }
    if (e >= out.size()) throw InvalidInput("voltage key '" + k + "' is out of range");
    std::vector<int> one;
    if (!p.is_array()) throw InvalidInput("voltage values are permutation arrays");
    for (const auto& x : p) one.push_back(detail::integer(x, "permutation entry"));
    out[e] = permutation_from_one_line(one);
    seen[e] = true;
  }
  std::size_t k = 0;
  for (std::size_t e = 0; e < out.size(); ++e)
    if (seen[e]) k = out[e].size();
  if (k == 0) throw InvalidInput("voltage assigns no permutation");
  for (std::size_t e = 0; e < out.size(); ++e) {
    if (!seen[e]) {
      out[e].resize(k);
      std::iota(out[e].begin(), out[e].end(), 0);
    }
    if (out[e].size() != k) throw InvalidInput("voltage permutations have different degrees");
  }
  return out;
}

// --------------------------------------------------------------- simplicial

/// {"dim": n, "vertices": [[coords], ...], "simplices": [[i0, ..., in], ...]}
inline SimplicialComplex complex_from_json(const json& j) {
  SimplicialComplex k;
  k.dim = detail::integer(detail::field(j, "dim"), "dim");
  k.coords = detail::rows(detail::field(j, "vertices"), "vertices");
  for (const auto& s : detail::field(j, "simplices")) {
    if (!s.is_array()) throw InvalidInput("simplices are vertex index arrays");
    std::vector<int> t;
    for (const auto& v : s) t.push_back(detail::integer(v, "simplex vertex"));
    k.simplices.push_back(std::move(t));
  }
  k.validate();
  return k;
}

inline json to_json(const SimplicialComplex& k) {
  return {{"dim", k.dim}, {"vertices", detail::matrix_json(k.coords)}, {"simplices", k.simplices}};
}

/// {"domain": ..., "target": ..., "vertex_map": {"0": 3, ...} or [3, ...]}
/// for simplicial maps, or "images": [[coords], ...] for PL maps.
inline PLMap map_from_json(const json& j) {
  const SimplicialComplex dom = complex_from_json(detail::field(j, "domain"));
  const SimplicialComplex tgt = complex_from_json(detail::field(j, "target"));
  if (j.contains("vertex_map")) {
    const json& m = j.at("vertex_map");
    std::vector<int> vm(static_cast<std::size_t>(dom.vertex_count()), -1);
    if (m.is_array()) {
      if (m.size() != vm.size()) throw InvalidInput("vertex map has the wrong size");
      for (std::size_t i = 0; i < m.size(); ++i) vm[i] = detail::integer(m[i], "vertex image");
    } else if (m.is_object()) {
      for (const auto& [key, v] : m.items()) {
        std::size_t i = 0;
        try {
          i = std::stoul(key);
        } catch (const std::exception&) {
          throw InvalidInput("vertex map key '" + key + "' is not a vertex index");
        }
        if (i >= vm.size()) throw InvalidInput("vertex map key '" + key + "' is out of range");
        vm[i] = detail::integer(v, "vertex image");
      }
      for (int v : vm)
        if (v < 0) throw InvalidInput("vertex map does not cover every domain vertex");
    } else {
      throw InvalidInput("'vertex_map' must be an array or an object");
    }
    return simplicial_map(dom, tgt, vm);
  }
  if (j.contains("images")) return pl_map(dom, tgt, detail::rows(j.at("images"), "images"));
  throw InvalidInput("map needs 'vertex_map' or 'images'");
}

inline json to_json(const PLMap& f) {
  json out{{"domain", to_json(f.domain)}, {"target", to_json(f.target)}};
  if (f.vertex_map)
    out["vertex_map"] = *f.vertex_map;
  else
    out["images"] = detail::matrix_json(f.images);
  return out;
}

// --------------------------------------------------------------------- words

struct SubgroupInput {
  int rank = 0;
  std::vector<Word> generators;
};

/// {"rank": r, "generators": ["aa", "b", "abA"]}
inline SubgroupInput subgroup_from_json(const json& j) {
  SubgroupInput s;
  s.rank = detail::integer(detail::field(j, "rank"), "rank");
  if (s.rank < 0) throw InvalidInput("rank must be nonnegative");
  for (const auto& w : detail::field(j, "generators")) {
    if (!w.is_string()) throw InvalidInput("generators are strings");
    s.generators.push_back(parse_word(w.get<std::string>(), s.rank));
  }
  return s;
}

}  // namespace barylab::io
