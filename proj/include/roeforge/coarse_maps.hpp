#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"

namespace roeforge {

/// A total map between the point sets of two finite metric spaces, stored as
/// target enumeration positions indexed by source enumeration positions.
class PointMap {
 public:
  PointMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> values)
      : source_(std::move(source)), target_(std::move(target)), values_(std::move(values)) {
    if (!source_ || !target_) throw StructuralError("map needs both a source and a target space");
    if (values_.size() != source_->size()) {
      throw StructuralError("map assigns " + std::to_string(values_.size()) +
                            " values but the source has " + std::to_string(source_->size()) +
                            " points");
    }
    for (std::size_t x = 0; x < values_.size(); ++x) {
      if (values_[x] >= target_->size())
        throw LookupError("image of point " + source_->label(x) + " is outside the target");
    }
  }

  static PointMap identity(const SpacePtr& space) {
    std::vector<std::size_t> v(space->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return PointMap(space, space, std::move(v));
  }

  static PointMap constant(const SpacePtr& source, const SpacePtr& target, std::size_t y) {
    return PointMap(source, target, std::vector<std::size_t>(source->size(), y));
  }

  template <typename Fn>
  static PointMap from_function(const SpacePtr& source, const SpacePtr& target, Fn&& fn) {
    std::vector<std::size_t> v(source->size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = fn(x);
    return PointMap(source, target, std::move(v));
  }

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  const std::vector<std::size_t>& values() const { return values_; }
  std::size_t operator()(std::size_t x) const { return values_[x]; }
  std::size_t size() const { return values_.size(); }

  // Values are compared as positions; callers check the spaces separately.
  friend bool operator==(const PointMap& a, const PointMap& b) {
    return same_space(a.source_, b.source_) && same_space(a.target_, b.target_) &&
           a.values_ == b.values_;
  }

 private:
  SpacePtr source_;
  SpacePtr target_;
  std::vector<std::size_t> values_;
};

/// Tabulated expansion modulus N -> M(N) = sup{ dist(f x, f y) : dist(x, y) <= N },
/// keyed by the distance values occurring in the source (0 included).
class ExpansionModulus {
 public:
  ExpansionModulus() = default;
  explicit ExpansionModulus(std::map<double, double> table) : table_(std::move(table)) {}

  const std::map<double, double>& table() const { return table_; }

  // Value at an arbitrary threshold: the entry at the largest key <= n
  // (0 below the smallest key).
  double at(double n) const {
    auto it = table_.upper_bound(n);
    if (it == table_.begin()) return 0.0;
    return std::prev(it)->second;
  }

  bool monotone() const {
    double prev = 0.0;
    for (const auto& [n, m] : table_) {
      if (m < prev) return false;
      prev = m;
    }
    return true;
  }

  friend bool operator==(const ExpansionModulus&, const ExpansionModulus&) = default;

 private:
  std::map<double, double> table_;
};

inline ExpansionModulus expansion_modulus(const PointMap& f) {
  const FiniteMetricSpace& src = *f.source();
  const FiniteMetricSpace& tgt = *f.target();
  std::map<double, double> raw;
  for (std::size_t x = 0; x < src.size(); ++x)
    for (std::size_t y = 0; y < src.size(); ++y) {
      double& slot = raw[src.distance(x, y)];
      slot = std::max(slot, tgt.distance(f(x), f(y)));
    }
  // Cumulative sup over all pairs at distance <= N.
  double running = 0.0;
  for (auto& [n, m] : raw) {
    running = std::max(running, m);
    m = running;
  }
  return ExpansionModulus(std::move(raw));
}

struct FiberProfile {
  std::size_t max_cardinality = 0;
  double max_diameter = 0.0;
};

/// max_y |f^{-1}(y)| and max_y diam f^{-1}(y); the finite stand-in for properness.
inline FiberProfile fiber_profile(const PointMap& f) {
  const FiniteMetricSpace& src = *f.source();
  FiberProfile out;
  std::vector<std::size_t> count(f.target()->size(), 0);
  for (std::size_t x = 0; x < f.size(); ++x) out.max_cardinality = std::max(out.max_cardinality, ++count[f(x)]);
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = x + 1; y < f.size(); ++y)
      if (f(x) == f(y)) out.max_diameter = std::max(out.max_diameter, src.distance(x, y));
  return out;
}

inline void require_parallel(const PointMap& f, const PointMap& g) {
  if (!same_space(f.source(), g.source()) || !same_space(f.target(), g.target()))
    throw StructuralError("maps do not share source and target");
}

/// sup_x dist(f(x), g(x)).
inline double closeness_distance(const PointMap& f, const PointMap& g) {
  require_parallel(f, g);
  double d = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) d = std::max(d, f.target()->distance(f(x), g(x)));
  return d;
}

/// g ∘ f.
inline PointMap compose(const PointMap& g, const PointMap& f) {
  if (!same_space(f.target(), g.source()))
    throw StructuralError("cannot compose: target of the inner map is not the source of the outer map");
  std::vector<std::size_t> v(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) v[x] = g(f(x));
  return PointMap(f.source(), g.target(), std::move(v));
}

/// Pointwise max of the members' moduli: one modulus serving the whole family.
inline ExpansionModulus equibornologous_modulus(std::span<const PointMap> family) {
  if (family.empty()) throw StructuralError("equibornologous modulus of an empty family");
  for (const PointMap& f : family.subspan(1)) require_parallel(family.front(), f);
  std::map<double, double> table = expansion_modulus(family.front()).table();
  for (const PointMap& f : family.subspan(1)) {
    const ExpansionModulus mod = expansion_modulus(f);
    for (const auto& [n, m] : mod.table()) table[n] = std::max(table[n], m);
  }
  return ExpansionModulus(std::move(table));
}

}  // namespace roeforge
