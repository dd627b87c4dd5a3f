#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "barylab/errors.hpp"
#include "barylab/hyperbolic.hpp"

namespace barylab {

/// Finitely supported nonnegative measure. Atoms keep first-insertion order;
/// repeated sites are merged by summing weights.
template <class Site, class Less = std::less<Site>>
class DiscreteMeasure {
 public:
  using site_type = Site;

  struct Atom {
    Site site;
    double w;
  };

  DiscreteMeasure() = default;

  DiscreteMeasure(std::vector<Site> sites, const std::vector<double>& weights) {
    if (sites.size() != weights.size()) throw InvalidMeasure("sites and weights differ in length");
    for (std::size_t i = 0; i < sites.size(); ++i) add(std::move(sites[i]), weights[i]);
  }

  static DiscreteMeasure dirac(Site s, double mass = 1.0) {
    DiscreteMeasure m;
    m.add(std::move(s), mass);
    return m;
  }

  void add(Site s, double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      std::ostringstream os;
      os << "atom weight must be finite and nonnegative, got " << w;
      throw InvalidMeasure(os.str());
    }
    auto [it, inserted] = index_.try_emplace(s, atoms_.size());
    if (inserted)
      atoms_.push_back({std::move(s), w});
    else
      atoms_[it->second].w += w;
  }

  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  [[nodiscard]] std::size_t size() const { return atoms_.size(); }
  [[nodiscard]] bool empty() const { return atoms_.empty(); }

  [[nodiscard]] double mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.w;
    return m;
  }

  [[nodiscard]] std::optional<double> weight_of(const Site& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return atoms_[it->second].w;
  }

  /// Copy with zero-weight atoms removed.
  [[nodiscard]] DiscreteMeasure without_zero_atoms() const {
    DiscreteMeasure out;
    for (const auto& a : atoms_)
      if (a.w > 0.0) out.add(a.site, a.w);
    return out;
  }

  [[nodiscard]] DiscreteMeasure scaled(double c) const {
    DiscreteMeasure out;
    for (const auto& a : atoms_) out.add(a.site, c * a.w);
    return out;
  }

 private:
  std::vector<Atom> atoms_;
  std::map<Site, std::size_t, Less> index_;
};

using VertexMeasure = DiscreteMeasure<int>;
using PointMeasure = DiscreteMeasure<hyp::HPoint, hyp::HPointLess>;

template <class S, class L>
DiscreteMeasure<S, L> normalize(const DiscreteMeasure<S, L>& mu) {
  const double m = mu.mass();
  if (!(m > 0.0)) throw EmptyMeasure("cannot normalize a measure of zero mass");
  return mu.scaled(1.0 / m);
}

/// Image measure under `f`. `f` returns std::optional; an empty result on
/// any atom is a domain error. Atoms with equal images merge.
template <class TargetLess = void, class S, class L, class F>
auto pushforward(const DiscreteMeasure<S, L>& mu, F&& f) {
  using Opt = std::invoke_result_t<F, const S&>;
  using T = typename Opt::value_type;
  using Less = std::conditional_t<std::is_void_v<TargetLess>, std::less<T>, TargetLess>;
  DiscreteMeasure<T, Less> out;
  for (const auto& a : mu.atoms()) {
    Opt img = f(a.site);
    if (!img) throw DomainError("map is undefined on an atom of the measure");
    out.add(std::move(*img), a.w);
  }
  return out;
}

/// Pushforward of vertex measures into H^N along a per-vertex table.
inline PointMeasure pushforward_to_points(const VertexMeasure& mu,
                                          const std::vector<hyp::HPoint>& image) {
  return pushforward<hyp::HPointLess>(mu, [&](int v) -> std::optional<hyp::HPoint> {
    if (v < 0 || static_cast<std::size_t>(v) >= image.size()) return std::nullopt;
    return image[static_cast<std::size_t>(v)];
  });
}

}  // namespace barylab
