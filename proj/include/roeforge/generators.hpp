#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roeforge/block_matrix.hpp"
#include "roeforge/coarse_maps.hpp"
#include "roeforge/cylinder.hpp"
#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/rotation.hpp"

namespace roeforge {

/// Seeded generator with platform-independent conversions (the standard
/// distributions are implementation-defined, so they are not used here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::size_t>(engine_() % span);
  }
  std::size_t below(std::size_t n) { return index(0, n - 1); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<Label> integer_labels(std::size_t n) {
  std::vector<Label> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back(std::to_string(i));
  return l;
}

inline FiniteMetricSpace grid_space(std::size_t width, std::size_t height) {
  return FiniteMetricSpace::from_function(integer_labels(width * height), [width](std::size_t a, std::size_t b) {
    const auto ax = static_cast<double>(a % width), ay = static_cast<double>(a / width);
    const auto bx = static_cast<double>(b % width), by = static_cast<double>(b / width);
    return std::abs(ax - bx) + std::abs(ay - by);
  });
}

/// Random tree on n vertices with integer edge weights 1..3 and its path metric.
inline FiniteMetricSpace tree_space(Rng& rng, std::size_t n) {
  std::vector<std::size_t> parent(n, 0);
  std::vector<double> weight(n, 0.0);
  for (std::size_t v = 1; v < n; ++v) {
    parent[v] = rng.below(v);
    weight[v] = static_cast<double>(rng.index(1, 3));
  }
  std::vector<double> depth(n, 0.0);
  std::vector<std::size_t> level(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    depth[v] = depth[parent[v]] + weight[v];
    level[v] = level[parent[v]] + 1;
  }
  return FiniteMetricSpace::from_function(integer_labels(n), [&](std::size_t a, std::size_t b) {
    std::size_t u = a, w = b;
    while (u != w) {
      if (level[u] >= level[w])
        u = parent[u];
      else
        w = parent[w];
    }
    return depth[a] + depth[b] - 2.0 * depth[u];
  });
}

/// Points of a w x h lattice moved by multiples of 1/8 (at most 1/4 per axis),
/// with the l1 metric. Dyadic coordinates keep every distance exact.
inline FiniteMetricSpace perturbed_lattice(Rng& rng, std::size_t width, std::size_t height) {
  const std::size_t n = width * height;
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = static_cast<double>(i % width) + (static_cast<double>(rng.index(0, 4)) - 2.0) / 8.0;
    py[i] = static_cast<double>(i / width) + (static_cast<double>(rng.index(0, 4)) - 2.0) / 8.0;
  }
  return FiniteMetricSpace::from_function(integer_labels(n), [&](std::size_t a, std::size_t b) {
    return std::abs(px[a] - px[b]) + std::abs(py[a] - py[b]);
  });
}

enum class SpaceKind { Line, Grid, Tree, Lattice };

inline SpaceKind parse_space_kind(std::string_view s) {
  if (s == "line") return SpaceKind::Line;
  if (s == "grid") return SpaceKind::Grid;
  if (s == "tree") return SpaceKind::Tree;
  if (s == "lattice") return SpaceKind::Lattice;
  throw StructuralError("unknown space generator '" + std::string(s) + "'");
}

/// A space of the given kind with about `size` points (grids and lattices use
/// the largest w x h <= size with w = ceil(sqrt(size))).
inline FiniteMetricSpace generate_space(Rng& rng, SpaceKind kind, std::size_t size) {
  if (size == 0) throw StructuralError("generated spaces need at least one point");
  auto shape = [size] {
    std::size_t w = 1;
    while (w * w < size) ++w;
    const std::size_t h = std::max<std::size_t>(1, size / w);
    return std::pair{w, h};
  };
  switch (kind) {
    case SpaceKind::Line: return FiniteMetricSpace::line(size);
    case SpaceKind::Grid: {
      auto [w, h] = shape();
      return grid_space(w, h);
    }
    case SpaceKind::Tree: return tree_space(rng, size);
    case SpaceKind::Lattice: {
      auto [w, h] = shape();
      return perturbed_lattice(rng, w, h);
    }
  }
  throw StructuralError("unknown space generator");
}

inline SpaceKind random_space_kind(Rng& rng) {
  static constexpr SpaceKind kinds[] = {SpaceKind::Line, SpaceKind::Grid, SpaceKind::Tree, SpaceKind::Lattice};
  return kinds[rng.below(4)];
}

inline SpacePtr random_space(Rng& rng, std::size_t min_size, std::size_t max_size) {
  return share(generate_space(rng, random_space_kind(rng), rng.index(min_size, max_size)));
}

// Maps -----------------------------------------------------------------------

inline PointMap random_map(Rng& rng, const SpacePtr& source, const SpacePtr& target) {
  return PointMap::from_function(source, target, [&](std::size_t) { return rng.below(target->size()); });
}

/// x -> clamp(x + k) by enumeration position.
inline PointMap shift_map(const SpacePtr& source, const SpacePtr& target, long long k) {
  return PointMap::from_function(source, target, [&](std::size_t x) {
    const long long v = static_cast<long long>(x) + k;
    return static_cast<std::size_t>(std::clamp<long long>(v, 0, static_cast<long long>(target->size()) - 1));
  });
}

/// x -> floor(x / k), clamped to the target.
inline PointMap collapse_map(const SpacePtr& source, const SpacePtr& target, std::size_t k) {
  return PointMap::from_function(source, target,
                                 [&](std::size_t x) { return std::min(x / std::max<std::size_t>(k, 1), target->size() - 1); });
}

/// A mixture of random, shift and collapse maps.
inline PointMap random_coarse_map(Rng& rng, const SpacePtr& source, const SpacePtr& target) {
  switch (rng.below(3)) {
    case 0: return random_map(rng, source, target);
    case 1: return shift_map(source, target, static_cast<long long>(rng.index(0, 4)) - 2);
    default: return collapse_map(source, target, rng.index(1, 3));
  }
}

/// Random map within distance `radius` of f (each value moved to a random point
/// of the closed ball around f(x)).
inline PointMap nearby_map(Rng& rng, const PointMap& f, double radius) {
  return PointMap::from_function(f.source(), f.target(), [&](std::size_t x) {
    const auto b = ball(*f.target(), f(x), radius);
    return b[rng.below(b.size())];
  });
}

// Matrices -------------------------------------------------------------------

inline Block random_block(Rng& rng, std::size_t d) {
  Block b(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return b;
}

/// Each pair with pdist <= propagation_cap carries a random block with
/// probability `density`.
inline BlockMatrix random_matrix(Rng& rng, const IndexSpace& index, std::size_t d, double density,
                                 double propagation_cap) {
  BlockMatrix m(index, d);
  for (std::size_t i = 0; i < index.size(); ++i)
    for (std::size_t j = 0; j < index.size(); ++j)
      if (index.pdist(i, j) <= propagation_cap && rng.chance(density)) m.set_block(i, j, random_block(rng, d));
  return m;
}

// Involutions ----------------------------------------------------------------

/// Random involution on n positions moving at most `max_moved` of them, with a
/// random enumeration order.
inline Involution random_involution(Rng& rng, std::size_t n, std::size_t max_moved) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const std::size_t pairs = rng.index(0, std::min(max_moved, n) / 2);
  std::vector<std::size_t> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = i;
  for (std::size_t p = 0; p < pairs; ++p) {
    sigma[perm[2 * p]] = perm[2 * p + 1];
    sigma[perm[2 * p + 1]] = perm[2 * p];
  }
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(rank[i - 1], rank[rng.below(i)]);
  return Involution(std::move(sigma), std::move(rank));
}

// Homotopies -----------------------------------------------------------------

/// Random coarse homotopy: heights p(x) <= max_height, H(x, 1) from a random
/// coarse map, and each level moves H to a random point within distance
/// `step` of the previous level.
inline CoarseHomotopy random_homotopy(Rng& rng, const SpacePtr& base, const SpacePtr& target,
                                      std::size_t max_height, double step = 1.0) {
  std::vector<long long> heights(base->size());
  for (auto& h : heights) h = static_cast<long long>(rng.index(0, max_height));
  PCylinder cyl(base, heights);
  const PointMap f = random_coarse_map(rng, base, target);
  std::vector<std::size_t> values(cyl.size());
  for (std::size_t x = 0; x < base->size(); ++x) {
    std::size_t y = f(x);
    for (std::size_t n = 1; n <= cyl.height(x) + 1; ++n) {
      if (n > 1) {
        const auto b = ball(*target, y, step);
        y = b[rng.below(b.size())];
      }
      values[cyl.index_of(x, n)] = y;
    }
  }
  PointMap h(cyl.space(), target, std::move(values));
  return make_homotopy(std::move(cyl), std::move(h));
}

/// Line {0..n-1}, f = id, g = constant 0, p(x) = x, H(x, k) = max(x - k + 1, 0).
inline CoarseHomotopy contraction_homotopy(std::size_t n) {
  auto line = share(FiniteMetricSpace::line(n));
  std::vector<long long> heights(n);
  for (std::size_t x = 0; x < n; ++x) heights[x] = static_cast<long long>(x);
  PCylinder cyl(line, heights);
  auto h = PointMap::from_function(cyl.space(), line, [&](std::size_t i) {
    const CylinderPoint& p = cyl.points()[i];
    const long long v = static_cast<long long>(p.base) - static_cast<long long>(p.level) + 1;
    return static_cast<std::size_t>(std::max<long long>(v, 0));
  });
  return make_homotopy(std::move(cyl), std::move(h));
}

}  // namespace roeforge
