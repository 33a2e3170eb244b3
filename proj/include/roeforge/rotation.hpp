#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roeforge/block_matrix.hpp"
#include "roeforge/coarse_maps.hpp"
#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/report.hpp"

namespace roeforge {

/// A bijection with sigma∘sigma = id on positions 0..n-1, together with the
/// enumeration order used by the rotation formula: rank[i] is the place of
/// position i in that order (identity by default).
class Involution {
 public:
  Involution() = default;
  explicit Involution(std::vector<std::size_t> sigma)
      : Involution(sigma, identity_ranks(sigma.size())) {}

  Involution(std::vector<std::size_t> sigma, std::vector<std::size_t> rank)
      : sigma_(std::move(sigma)), rank_(std::move(rank)) {
    const std::size_t n = sigma_.size();
    if (rank_.size() != n) throw StructuralError("enumeration order has the wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (sigma_[i] >= n) throw StructuralError("sigma maps " + std::to_string(i) + " outside the index");
      if (sigma_[sigma_[i]] != i)
        throw StructuralError("sigma is not an involution at " + std::to_string(i));
      if (rank_[i] >= n || seen[rank_[i]]) throw StructuralError("enumeration order is not a permutation");
      seen[rank_[i]] = true;
    }
  }

  static Involution identity(std::size_t n) { return Involution(identity_ranks(n)); }

  /// Swaps each (a, b) pair, with the order oriented so that a comes after b.
  /// Pairs must be disjoint; (a, a) entries are ignored.
  static Involution swapping(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::size_t> sigma = identity_ranks(n);
    std::vector<std::size_t> rank = identity_ranks(n);
    for (auto [a, b] : pairs) {
      if (a == b) continue;
      if (a >= n || b >= n) throw StructuralError("swap pair outside the index");
      if (sigma[a] != a || sigma[b] != b) throw StructuralError("swap pairs overlap");
      sigma[a] = b;
      sigma[b] = a;
      if (rank[a] < rank[b]) std::swap(rank[a], rank[b]);
    }
    return Involution(std::move(sigma), std::move(rank));
  }

  std::size_t size() const { return sigma_.size(); }
  std::size_t operator[](std::size_t i) const { return sigma_[i]; }
  const std::vector<std::size_t>& map() const { return sigma_; }
  const std::vector<std::size_t>& ranks() const { return rank_; }
  bool before(std::size_t a, std::size_t b) const { return rank_[a] < rank_[b]; }

  std::size_t moved_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < sigma_.size(); ++i) c += sigma_[i] != i;
    return c;
  }

 private:
  static std::vector<std::size_t> identity_ranks(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
  }

  std::vector<std::size_t> sigma_;
  std::vector<std::size_t> rank_;
};

/// cos(pi t / 2), sin(pi t / 2), exact at t = 0 and t = 1.
struct QuarterTurn {
  double c;
  double s;
};

inline QuarterTurn quarter_turn(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw StructuralError("rotation parameter t must lie in [0, 1]");
  if (t == 0.0) return {1.0, 0.0};
  if (t == 1.0) return {0.0, 1.0};
  const double a = std::numbers::pi * t / 2.0;
  return {std::cos(a), std::sin(a)};
}

/// Entry (x1, x2) of Rot_sigma(t).
inline double rotation_entry(const Involution& inv, std::size_t x1, std::size_t x2, QuarterTurn q) {
  const bool fixed = inv[x1] == x1;
  if (x1 == x2) return fixed ? 1.0 : q.c;
  if (inv[x1] != x2) return 0.0;
  return inv.before(x1, x2) ? q.s : -q.s;
}

/// Rot_sigma(t) as a dense real matrix.
inline Eigen::MatrixXd rotation_matrix(const Involution& inv, double t) {
  const QuarterTurn q = quarter_turn(t);
  const auto n = static_cast<Eigen::Index>(inv.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = rotation_entry(inv, i, i, q);
    if (inv[i] != i)
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(inv[i])) = rotation_entry(inv, i, inv[i], q);
  }
  return r;
}

/// Rot_sigma(t) ⊗ 1_d as a block matrix. sigma acts either on the whole index
/// (inv.size() == index.size()) or on the internal coordinates inside every
/// outer point (inv.size() == index.inner_count()).
inline BlockMatrix rotation_operator(const Involution& inv, const IndexSpace& index,
                                     std::size_t block_dim, double t) {
  const QuarterTurn q = quarter_turn(t);
  const auto d = static_cast<Eigen::Index>(block_dim);
  BlockMatrix out(index, block_dim);
  auto emit = [&](std::size_t row, std::size_t col, double v) {
    if (std::abs(v) >= kPruneThreshold) out.emplace_unchecked({row, col}, Block::Identity(d, d) * v);
  };
  if (inv.size() == index.size()) {
    for (std::size_t i = 0; i < inv.size(); ++i) {
      emit(i, i, rotation_entry(inv, i, i, q));
      if (inv[i] != i) emit(i, inv[i], rotation_entry(inv, i, inv[i], q));
    }
  } else if (inv.size() == index.inner_count()) {
    for (std::size_t z = 0; z < index.outer()->size(); ++z)
      for (std::size_t i = 0; i < inv.size(); ++i) {
        emit(index.position(z, i), index.position(z, i), rotation_entry(inv, i, i, q));
        if (inv[i] != i)
          emit(index.position(z, i), index.position(z, inv[i]), rotation_entry(inv, i, inv[i], q));
      }
  } else {
    throw StructuralError("involution size matches neither the index nor its internal factor");
  }
  return out;
}

/// t -> Rot_sigma(t) for a fixed involution.
class RotationPath {
 public:
  explicit RotationPath(Involution inv) : inv_(std::move(inv)) {}
  const Involution& involution() const { return inv_; }
  Eigen::MatrixXd operator()(double t) const { return rotation_matrix(inv_, t); }
  BlockMatrix on(const IndexSpace& index, std::size_t block_dim, double t) const {
    return rotation_operator(inv_, index, block_dim, t);
  }

 private:
  Involution inv_;
};

/// max_x dist(x, sigma(x)): the propagation of Rot_sigma(t) for every t in (0, 1].
inline double rotation_propagation(const Involution& inv, const FiniteMetricSpace& space) {
  if (inv.size() != space.size()) throw StructuralError("involution does not act on this space");
  double p = 0.0;
  for (std::size_t x = 0; x < inv.size(); ++x) p = std::max(p, space.distance(x, inv[x]));
  return p;
}

/// k equispaced samples of [0, 1], endpoints included.
inline std::vector<double> t_grid(std::size_t k = 21) {
  if (k < 2) return {0.0, 1.0};
  std::vector<double> ts(k);
  for (std::size_t i = 0; i < k; ++i) ts[i] = static_cast<double>(i) / static_cast<double>(k - 1);
  ts.back() = 1.0;
  return ts;
}

/// Sampled conjugation path t -> Rot(t) start Rot(t)*.
struct ConjugationPath {
  Involution sigma;
  BlockMatrix start;
  std::vector<double> ts;
  std::vector<BlockMatrix> values;

  BlockMatrix at(double t) const {
    return conjugate(rotation_operator(sigma, start.index(), start.block_dim(), t), start);
  }
  BlockMatrix rotation(double t) const {
    return rotation_operator(sigma, start.index(), start.block_dim(), t);
  }
};

inline ConjugationPath sample_conjugation(Involution sigma, BlockMatrix start, std::vector<double> ts) {
  ConjugationPath p{std::move(sigma), std::move(start), std::move(ts), {}};
  p.values.reserve(p.ts.size());
  for (double t : p.ts) p.values.push_back(p.at(t));
  return p;
}

/// sigma on the index of f_+ m swapping (f(x), x, u) <-> (g(x), x, u), oriented so
/// that every (f(x), x, u) comes after its partner; this makes Rot(1) carry the
/// graph of f onto the graph of g with sign +1, so the path ends exactly at g_+ m.
inline Involution closeness_involution(const PointMap& f, const PointMap& g, const IndexSpace& pushed) {
  require_parallel(f, g);
  const std::size_t rest = pushed.inner_count() / f.source()->size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f(x) == g(x)) continue;
    for (std::size_t u = 0; u < rest; ++u)
      pairs.emplace_back(pushed.position(f(x), x * rest + u), pushed.position(g(x), x * rest + u));
  }
  return Involution::swapping(pushed.size(), pairs);
}

/// The homotopy eta(t) = Rot(t) f_+ m Rot(t)* between f_+ m and g_+ m.
inline ConjugationPath closeness_homotopy(const PointMap& f, const PointMap& g, const BlockMatrix& m,
                                          const std::vector<double>& ts) {
  require_parallel(f, g);
  BlockMatrix start = pushforward(f, m);
  Involution sigma = closeness_involution(f, g, start.index());
  return sample_conjugation(std::move(sigma), std::move(start), ts);
}

inline std::string t_witness(double t) {
  std::ostringstream o;
  o.precision(6);
  o << "t=" << t;
  return o.str();
}

/// prop(eta(t)) <= prop(f_+ m) + 2 sup_x dist(f(x), g(x)) at every sample, and
/// prop(Rot(t)) <= sup_x dist(f(x), g(x)) in the outer metric.
inline VerificationReport propagation_bound_check(const ConjugationPath& path, const PointMap& f,
                                                  const PointMap& g, const BlockMatrix& m) {
  VerificationReport r("homotopy propagation bound");
  const double delta = closeness_distance(f, g);
  const double base = propagation(pushforward(f, m));
  const double bound = base + 2.0 * delta;
  double worst = 0.0, worst_rot = 0.0, min_slack = bound;
  std::string witness, rot_witness;
  for (std::size_t k = 0; k < path.ts.size(); ++k) {
    const double p = propagation(path.values[k]);
    worst = std::max(worst, p);
    min_slack = std::min(min_slack, bound - p);
    if (p > bound && witness.empty()) witness = t_witness(path.ts[k]);
    const double pr = propagation(path.rotation(path.ts[k]));
    worst_rot = std::max(worst_rot, pr);
    if (pr > delta && rot_witness.empty()) rot_witness = t_witness(path.ts[k]);
  }
  auto& c = r.expect("prop(eta(t)) <= prop(f_+ m) + 2 sup dist(f, g)", witness.empty(), witness);
  c.measured = worst;
  c.bound = bound;
  auto& c2 = r.expect("prop(Rot(t)) <= sup dist(f, g)", rot_witness.empty(), rot_witness);
  c2.measured = worst_rot;
  c2.bound = delta;
  r.info("minimum slack", "bound minus measured propagation over all samples", min_slack);
  return r;
}

/// f and g agree on f^{-1}{y1, y2} ∪ g^{-1}{y1, y2}.
inline bool constancy_hypothesis(const PointMap& f, const PointMap& g, std::size_t y1, std::size_t y2) {
  for (std::size_t x = 0; x < f.size(); ++x) {
    const bool involved = f(x) == y1 || f(x) == y2 || g(x) == y1 || g(x) == y2;
    if (involved && f(x) != g(x)) return false;
  }
  return true;
}

/// The (y1, y2) outer block of eta(t) is t-independent whenever f and g agree on
/// the preimages of {y1, y2}; otherwise the check is skipped.
inline VerificationReport constancy_check(const ConjugationPath& path, const PointMap& f,
                                          const PointMap& g, std::size_t y1, std::size_t y2,
                                          double tol = 1e-12) {
  VerificationReport r("block constancy");
  const std::size_t ny = f.target()->size();
  if (y1 >= ny || y2 >= ny) throw LookupError("block coordinates outside the target space");
  const std::string name = "block (" + f.target()->label(y1) + "," + f.target()->label(y2) + ") constant";
  if (!constancy_hypothesis(f, g, y1, y2)) {
    Check c;
    c.name = name;
    c.status = CheckStatus::Skipped;
    c.detail = "hypothesis not met";
    r.add(std::move(c));
    return r;
  }
  const auto reference = outer_block(path.values.front(), y1, y2);
  double dev = 0.0;
  std::string witness;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    const double d = max_abs_diff(reference, outer_block(path.values[k], y1, y2));
    if (d > dev) {
      dev = d;
      if (d > tol) witness = t_witness(path.ts[k]);
    }
  }
  r.expect_le(name, dev, tol, 0.0, witness);
  return r;
}

}  // namespace roeforge
