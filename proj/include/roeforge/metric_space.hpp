#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "roeforge/error.hpp"
#include "roeforge/report.hpp"

namespace roeforge {

using Label = std::string;

/// A finite discrete metric space: labelled points in a fixed enumeration
/// order together with their distance matrix.
///
/// Construction only checks the shape of the data (square matrix matching the
/// label list, distinct labels). The metric axioms are checked separately by
/// validate_metric so that malformed inputs can still be inspected.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<Label> labels, const std::vector<std::vector<double>>& dist)
      : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    if (dist.size() != n) {
      throw StructuralError("distance matrix has " + std::to_string(dist.size()) +
                            " rows but there are " + std::to_string(n) + " labels");
    }
    dist_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i].size() != n) {
        throw StructuralError("distance matrix row " + std::to_string(i) + " has " +
                              std::to_string(dist[i].size()) + " entries, expected " +
                              std::to_string(n));
      }
      dist_.insert(dist_.end(), dist[i].begin(), dist[i].end());
    }
    build_index();
  }

  // Builds the space from a distance function on enumeration positions.
  template <typename DistFn>
  static FiniteMetricSpace from_function(std::vector<Label> labels, DistFn&& fn) {
    const std::size_t n = labels.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dist[i][j] = fn(i, j);
    return FiniteMetricSpace(std::move(labels), dist);
  }

  // Points 0..n-1 with dist(i, j) = scale * |i - j|.
  static FiniteMetricSpace line(std::size_t n, double scale = 1.0) {
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return from_function(std::move(labels), [scale](std::size_t i, std::size_t j) {
      return scale * (i > j ? static_cast<double>(i - j) : static_cast<double>(j - i));
    });
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const Label& label(std::size_t i) const { return labels_.at(i); }

  double distance(std::size_t i, std::size_t j) const { return dist_[i * labels_.size() + j]; }

  bool contains(const Label& l) const { return index_.count(l) != 0; }

  std::size_t index_of(const Label& l) const {
    auto it = index_.find(l);
    if (it == index_.end()) throw LookupError("unknown point '" + l + "'");
    return it->second;
  }

  std::vector<std::vector<double>> distance_matrix() const {
    const std::size_t n = size();
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i][j] = distance(i, j);
    return out;
  }

  friend bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
    return a.labels_ == b.labels_ && a.dist_ == b.dist_;
  }

 private:
  void build_index() {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second)
        throw StructuralError("duplicate point label '" + labels_[i] + "'");
    }
  }

  std::vector<Label> labels_;
  std::vector<double> dist_;
  std::unordered_map<Label, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

inline SpacePtr share(FiniteMetricSpace s) {
  return std::make_shared<const FiniteMetricSpace>(std::move(s));
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

enum class AxiomKind { Negative, NonzeroDiagonal, ZeroOffDiagonal, Asymmetric, Triangle };

inline const char* to_string(AxiomKind k) {
  switch (k) {
    case AxiomKind::Negative: return "non-negativity";
    case AxiomKind::NonzeroDiagonal: return "zero diagonal";
    case AxiomKind::ZeroOffDiagonal: return "positivity";
    case AxiomKind::Asymmetric: return "symmetry";
    case AxiomKind::Triangle: return "triangle inequality";
  }
  return "unknown";
}

/// A violated axiom with the enumeration positions that witness it. For the
/// triangle inequality the witness (i, j, k) means dist(i,k) > dist(i,j) + dist(j,k).
struct MetricViolation {
  AxiomKind kind;
  std::vector<std::size_t> witness;
};

struct MetricValidation {
  std::vector<MetricViolation> violations;
  std::size_t violation_count = 0;  // may exceed violations.size() (storage is capped)
  double min_gap = std::numeric_limits<double>::infinity();  // smallest off-diagonal distance

  bool ok() const { return violation_count == 0; }

  const MetricViolation* first(AxiomKind k) const {
    for (const auto& v : violations)
      if (v.kind == k) return &v;
    return nullptr;
  }

  VerificationReport to_report(const FiniteMetricSpace& space) const {
    VerificationReport r("validate-space");
    for (AxiomKind k : {AxiomKind::Negative, AxiomKind::NonzeroDiagonal,
                        AxiomKind::ZeroOffDiagonal, AxiomKind::Asymmetric, AxiomKind::Triangle}) {
      const MetricViolation* v = first(k);
      std::string witness;
      if (v) {
        std::ostringstream w;
        w << "(";
        for (std::size_t i = 0; i < v->witness.size(); ++i)
          w << (i ? "," : "") << space.label(v->witness[i]);
        w << ")";
        witness = w.str();
      }
      r.expect(to_string(k), v == nullptr, witness);
    }
    r.info("points", std::to_string(space.size()), static_cast<double>(space.size()));
    if (space.size() > 1) r.info("minimum gap", "smallest off-diagonal distance", min_gap);
    return r;
  }
};

/// Checks every metric axiom exactly (no tolerance). Every violation class is
/// reported with a witness; at most `max_recorded` violations are stored.
inline MetricValidation validate_metric(const FiniteMetricSpace& space,
                                        std::size_t max_recorded = 64) {
  MetricValidation out;
  const std::size_t n = space.size();
  auto record = [&](AxiomKind k, std::vector<std::size_t> w) {
    ++out.violation_count;
    if (out.violations.size() < max_recorded) out.violations.push_back({k, std::move(w)});
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = space.distance(i, j);
      if (d < 0.0) record(AxiomKind::Negative, {i, j});
      if (i == j) {
        if (d != 0.0) record(AxiomKind::NonzeroDiagonal, {i, i});
        continue;
      }
      if (d == 0.0) record(AxiomKind::ZeroOffDiagonal, {i, j});
      if (i < j && d != space.distance(j, i)) record(AxiomKind::Asymmetric, {i, j});
      out.min_gap = std::min(out.min_gap, d);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (space.distance(i, k) > space.distance(i, j) + space.distance(j, k))
          record(AxiomKind::Triangle, {i, j, k});
  return out;
}

/// Closed ball { y : dist(x, y) <= radius }, in enumeration order.
inline std::vector<std::size_t> ball(const FiniteMetricSpace& space, std::size_t x,
                                     double radius) {
  if (x >= space.size()) throw LookupError("point index " + std::to_string(x) + " out of range");
  if (radius < 0.0) throw StructuralError("ball radius must be non-negative");
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < space.size(); ++y)
    if (space.distance(x, y) <= radius) out.push_back(y);
  return out;
}

inline std::vector<std::size_t> ball(const FiniteMetricSpace& space, const Label& x,
                                     double radius) {
  return ball(space, space.index_of(x), radius);
}

/// sup_x |B_R(x)|.
inline std::size_t max_ball_size(const FiniteMetricSpace& space, double radius) {
  std::size_t best = 0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    std::size_t c = 0;
    for (std::size_t y = 0; y < space.size(); ++y)
      if (space.distance(x, y) <= radius) ++c;
    best = std::max(best, c);
  }
  return best;
}

/// Every distance value occurring in the space (including 0), ascending.
inline std::vector<double> distance_values(const FiniteMetricSpace& space) {
  std::vector<double> v;
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = 0; j < space.size(); ++j) v.push_back(space.distance(i, j));
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Growth profile R -> sup_x |B_R(x)| at every occurring distance value.
inline std::map<double, std::size_t> growth_profile(const FiniteMetricSpace& space) {
  std::map<double, std::size_t> out;
  for (double r : distance_values(space)) out.emplace(r, max_ball_size(space, r));
  return out;
}

}  // namespace roeforge
