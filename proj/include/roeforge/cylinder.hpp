#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "roeforge/coarse_maps.hpp"
#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/report.hpp"

namespace roeforge {

/// Point (x, n) of a p-cylinder; levels start at 1.
struct CylinderPoint {
  std::size_t base;
  std::size_t level;
  friend bool operator==(const CylinderPoint&, const CylinderPoint&) = default;
};

inline Label cylinder_label(const Label& x, std::size_t level) {
  return "(" + x + "," + std::to_string(level) + ")";
}

/// The p-cylinder over a base space: points (x, n) with 1 <= n <= p(x) + 1 and
/// dist((x,n),(y,m)) = dist(x,y) + |n - m|. Points are enumerated base-major.
class PCylinder {
 public:
  PCylinder(SpacePtr base, std::vector<long long> heights) : base_(std::move(base)) {
    if (heights.size() != base_->size())
      throw StructuralError("height function has " + std::to_string(heights.size()) +
                            " values but the base has " + std::to_string(base_->size()) +
                            " points");
    for (std::size_t x = 0; x < heights.size(); ++x) {
      if (heights[x] < 0)
        throw StructuralError("negative height p(" + base_->label(x) + ") = " +
                              std::to_string(heights[x]));
      heights_.push_back(static_cast<std::size_t>(heights[x]));
    }
    offset_.resize(base_->size());
    std::vector<Label> labels;
    for (std::size_t x = 0; x < base_->size(); ++x) {
      offset_[x] = points_.size();
      for (std::size_t n = 1; n <= heights_[x] + 1; ++n) {
        points_.push_back({x, n});
        labels.push_back(cylinder_label(base_->label(x), n));
      }
    }
    space_ = share(FiniteMetricSpace::from_function(
        std::move(labels), [this](std::size_t a, std::size_t b) {
          const CylinderPoint& p = points_[a];
          const CylinderPoint& q = points_[b];
          const double dn = p.level > q.level ? static_cast<double>(p.level - q.level)
                                              : static_cast<double>(q.level - p.level);
          return base_->distance(p.base, q.base) + dn;
        }));
  }

  const SpacePtr& base() const { return base_; }
  const SpacePtr& space() const { return space_; }
  const std::vector<std::size_t>& heights() const { return heights_; }
  std::size_t height(std::size_t x) const { return heights_[x]; }
  std::size_t max_height() const {
    return heights_.empty() ? 0 : *std::max_element(heights_.begin(), heights_.end());
  }
  const std::vector<CylinderPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  // Enumeration position of (x, level).
  std::size_t index_of(std::size_t x, std::size_t level) const {
    if (x >= base_->size() || level < 1 || level > heights_[x] + 1)
      throw LookupError("(" + std::to_string(x) + "," + std::to_string(level) +
                        ") is not a point of the cylinder");
    return offset_[x] + level - 1;
  }

 private:
  SpacePtr base_;
  std::vector<std::size_t> heights_;
  std::vector<CylinderPoint> points_;
  std::vector<std::size_t> offset_;
  SpacePtr space_;
};

inline PCylinder build_cylinder(const SpacePtr& base, std::vector<long long> heights) {
  return PCylinder(base, std::move(heights));
}

/// Bottom and top faces: i0(x) = (x, 1), i1(x) = (x, p(x) + 1).
inline std::pair<PointMap, PointMap> inclusions(const PCylinder& cyl) {
  auto i0 = PointMap::from_function(cyl.base(), cyl.space(),
                                    [&](std::size_t x) { return cyl.index_of(x, 1); });
  auto i1 = PointMap::from_function(cyl.base(), cyl.space(), [&](std::size_t x) {
    return cyl.index_of(x, cyl.height(x) + 1);
  });
  return {std::move(i0), std::move(i1)};
}

/// A coarse homotopy H on a p-cylinder with designated endpoints f = H∘i0, g = H∘i1.
struct CoarseHomotopy {
  PCylinder cylinder;
  PointMap homotopy;
  PointMap f;
  PointMap g;

  const SpacePtr& base() const { return cylinder.base(); }
  const SpacePtr& target() const { return homotopy.target(); }

  // H∘i0 = f and H∘i1 = g, exactly; failures name the first offending point.
  VerificationReport check_endpoints() const {
    VerificationReport r("homotopy endpoints");
    if (!same_space(homotopy.source(), cylinder.space())) {
      r.expect("H is defined on the cylinder", false, "source space differs from the cylinder");
      return r;
    }
    auto [i0, i1] = inclusions(cylinder);
    auto face = [&](const PointMap& inc, const PointMap& end, const char* name) {
      if (!same_space(end.source(), base()) || !same_space(end.target(), target())) {
        r.expect(name, false, "endpoint map has the wrong source or target");
        return;
      }
      std::string witness;
      for (std::size_t x = 0; x < base()->size(); ++x) {
        if (homotopy(inc(x)) != end(x)) {
          witness = "x=" + base()->label(x);
          break;
        }
      }
      r.expect(name, witness.empty(), witness);
    };
    face(i0, f, "H o i0 = f");
    face(i1, g, "H o i1 = g");
    return r;
  }
};

/// Builds the homotopy data, deriving f and g from H; H must be defined on cyl.space().
inline CoarseHomotopy make_homotopy(PCylinder cyl, PointMap h) {
  if (!same_space(h.source(), cyl.space()))
    throw StructuralError("homotopy is not defined on the cylinder");
  auto [i0, i1] = inclusions(cyl);
  PointMap f = compose(h, i0);
  PointMap g = compose(h, i1);
  return CoarseHomotopy{std::move(cyl), std::move(h), std::move(f), std::move(g)};
}

/// f_n(x) = H(x, min(n, p(x) + 1)) for n = 1..n_max.
inline std::vector<PointMap> slice_family(const CoarseHomotopy& data, std::size_t n_max) {
  const PCylinder& cyl = data.cylinder;
  const std::size_t need = cyl.max_height() + 1;
  if (n_max < need)
    throw StructuralError("n_max = " + std::to_string(n_max) + " is too small: the family is only stationary from n = " +
                          std::to_string(need) + " (1 + max p)");
  std::vector<PointMap> family;
  family.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    family.push_back(PointMap::from_function(data.base(), data.target(), [&](std::size_t x) {
      return data.homotopy(cyl.index_of(x, std::min(n, cyl.height(x) + 1)));
    }));
  }
  return family;
}

/// Per-point stationarity index N(x): least N with f_n(x) = f_N(x) for all N <= n <= n_max.
inline std::vector<std::size_t> stationarity_indices(const std::vector<PointMap>& family) {
  if (family.empty()) return {};
  const std::size_t points = family.front().size();
  std::vector<std::size_t> out(points, 1);
  for (std::size_t x = 0; x < points; ++x) {
    std::size_t n = family.size();
    while (n > 1 && family[n - 2](x) == family.back()(x)) --n;
    out[x] = n;
  }
  return out;
}

/// For each y: the source points whose slice orbit {(x, min(n, p(x)+1))}_n meets H^{-1}{y},
/// equivalently the x with f_n(x) = y for some n.
inline std::vector<std::vector<std::size_t>> orbit_preimages(const std::vector<PointMap>& family,
                                                             std::size_t target_size) {
  std::vector<std::vector<std::size_t>> out(target_size);
  if (family.empty()) return out;
  for (std::size_t x = 0; x < family.front().size(); ++x) {
    std::vector<bool> hit(target_size, false);
    for (const PointMap& f : family) hit[f(x)] = true;
    for (std::size_t y = 0; y < target_size; ++y)
      if (hit[y]) out[y].push_back(x);
  }
  return out;
}

/// Largest consecutive-slice distance sup_n sup_x dist(f_n(x), f_{n+1}(x)).
inline double max_step_distance(const std::vector<PointMap>& family) {
  double d = 0.0;
  for (std::size_t n = 0; n + 1 < family.size(); ++n)
    d = std::max(d, closeness_distance(family[n], family[n + 1]));
  return d;
}

/// Properties of the sliced family: equibornologous, bounded steps, per-point
/// stationarity, finite orbit preimages, and the endpoint laws.
inline VerificationReport verify_family_properties(const std::vector<PointMap>& family,
                                                   const CoarseHomotopy& data) {
  VerificationReport r("family properties");
  if (family.empty()) {
    r.expect("non-empty family", false, "no slices");
    return r;
  }
  const PCylinder& cyl = data.cylinder;
  const FiniteMetricSpace& base = *data.base();
  const FiniteMetricSpace& target = *data.target();
  const ExpansionModulus h_mod = expansion_modulus(data.homotopy);

  // (1) one modulus for the whole family, dominated pairwise by H's modulus at
  // the cylinder distance dist(x,y) + |p(x) - p(y)|.
  const ExpansionModulus family_mod = equibornologous_modulus(family);
  {
    auto& c = r.expect("equibornologous modulus is finite and monotone", family_mod.monotone());
    c.measured = family_mod.table().empty() ? 0.0 : family_mod.table().rbegin()->second;
  }
  std::string witness;
  double worst = -1.0;
  for (std::size_t n = 0; n < family.size() && witness.empty(); ++n) {
    for (std::size_t x = 0; x < base.size() && witness.empty(); ++x)
      for (std::size_t y = 0; y < base.size(); ++y) {
        const double hp = static_cast<double>(cyl.height(x) > cyl.height(y) ? cyl.height(x) - cyl.height(y)
                                                                            : cyl.height(y) - cyl.height(x));
        const double bound = h_mod.at(base.distance(x, y) + hp);
        const double got = target.distance(family[n](x), family[n](y));
        worst = std::max(worst, got - bound);
        if (got > bound) {
          witness = "n=" + std::to_string(n + 1) + " x=" + base.label(x) + " y=" + base.label(y);
          break;
        }
      }
  }
  r.expect("slice distances bounded by H modulus at dist(x,y)+|p(x)-p(y)|", witness.empty(),
           witness)
      .measured = worst;

  // (2) consecutive slices are images of cylinder points at distance <= 1.
  const double step = max_step_distance(family);
  r.expect_le("step distance <= modulus of H at 1", step, h_mod.at(1.0));

  // (3) stationarity.
  const auto stat = stationarity_indices(family);
  const std::size_t max_stat = stat.empty() ? 1 : *std::max_element(stat.begin(), stat.end());
  r.expect_le("stationarity index within 1 + max p", static_cast<double>(max_stat),
              static_cast<double>(cyl.max_height() + 1));

  // (4) orbit preimages of points are finite sets; report the largest.
  const auto pre = orbit_preimages(family, target.size());
  std::size_t largest = 0;
  for (const auto& s : pre) largest = std::max(largest, s.size());
  r.info("largest orbit preimage", "max_y |{x : f_n(x) = y for some n}|",
         static_cast<double>(largest), static_cast<double>(base.size()));

  // (5) endpoints.
  r.expect("f_1 = f", family.front().values() == data.f.values());
  std::string lim_witness;
  for (std::size_t x = 0; x < base.size(); ++x) {
    if (family.back()(x) != data.g(x) || stat[x] > family.size()) {
      lim_witness = "x=" + base.label(x);
      break;
    }
  }
  r.expect("stationary limit = g", lim_witness.empty(), lim_witness);
  return r;
}

}  // namespace roeforge
