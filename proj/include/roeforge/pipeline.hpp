#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roeforge/block_matrix.hpp"
#include "roeforge/coarse_maps.hpp"
#include "roeforge/cylinder.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/report.hpp"
#include "roeforge/rotation.hpp"

namespace roeforge {

inline constexpr double kIdentityTol = 1e-12;

// ---------------------------------------------------------------------------
// Functoriality: g_+ f_+ m and the corner-embedded (g∘f)_+ m are conjugate by
// Rot_sigma(1), sigma swapping (f(x), x) and (y0, x) inside every Z-coefficient.

struct FunctorialityOutcome {
  double endpoint_error = 0.0;     // max |P A P* - B| entrywise
  double propagation_excess = 0.0; // max over the path of prop - prop(A), should be <= 0
};

inline Involution functoriality_involution(const PointMap& f, std::size_t y0, std::size_t rest) {
  const std::size_t nx = f.source()->size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t u = 0; u < rest; ++u)
      pairs.emplace_back((f(x) * nx + x) * rest + u, (y0 * nx + x) * rest + u);
  return Involution::swapping(f.target()->size() * nx * rest, pairs);
}

inline FunctorialityOutcome functoriality_outcome(const PointMap& f, const PointMap& g,
                                                  const BlockMatrix& m, std::size_t y0,
                                                  const std::vector<double>& ts) {
  const BlockMatrix a = pushforward(g, pushforward(f, m));
  const BlockMatrix b = insert_corner_factor(pushforward(compose(g, f), m), f.target()->size(), y0);
  const Involution sigma = functoriality_involution(f, y0, m.index().inner_count());
  FunctorialityOutcome out;
  out.endpoint_error = max_abs_diff(conjugate(rotation_operator(sigma, a.index(), a.block_dim(), 1.0), a), b);
  const double base = propagation(a);
  for (double t : ts) {
    const BlockMatrix r = rotation_operator(sigma, a.index(), a.block_dim(), t);
    const double bound = base + 2.0 * propagation(r);
    out.propagation_excess = std::max(out.propagation_excess, propagation(conjugate(r, a)) - bound);
  }
  return out;
}

inline VerificationReport verify_functoriality(const PointMap& f, const PointMap& g,
                                               const std::vector<BlockMatrix>& samples,
                                               std::optional<std::size_t> y0 = std::nullopt,
                                               const std::vector<double>& ts = t_grid()) {
  VerificationReport r("functoriality");
  if (!same_space(f.target(), g.source())) throw StructuralError("g does not start where f ends");
  const std::size_t ny = f.target()->size();
  const std::size_t base_point = y0.value_or(0);
  if (base_point >= ny) throw LookupError("base point y0 is not a point of Y");
  const std::size_t alt = (base_point + 1) % ny;

  double worst = 0.0, worst_alt = 0.0, excess = 0.0;
  std::string witness;
  bool same_outcome = true;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto o = functoriality_outcome(f, g, samples[s], base_point, ts);
    const auto o2 = functoriality_outcome(f, g, samples[s], alt, {});
    worst = std::max(worst, o.endpoint_error);
    worst_alt = std::max(worst_alt, o2.endpoint_error);
    excess = std::max(excess, o.propagation_excess);
    if ((o.endpoint_error <= kIdentityTol) != (o2.endpoint_error <= kIdentityTol)) same_outcome = false;
    if (o.endpoint_error > kIdentityTol && witness.empty()) witness = "sample " + std::to_string(s);
  }
  r.expect_le("Rot(1) g_+f_+m Rot(1)* = corner (g o f)_+ m", worst, kIdentityTol, 0.0, witness);
  r.expect_le("propagation bounded along the rotation path", excess, 0.0);
  Check& indep = r.expect("outcome independent of y0", same_outcome);
  indep.measured = worst_alt;
  indep.detail = "y0 = " + f.target()->label(base_point) + ", re-run with " + f.target()->label(alt);
  return r;
}

// ---------------------------------------------------------------------------
// Identity law: id_+ m conjugated by Rot(1) for (x, x) <-> (x0, x) is m placed
// in the (x0, x0) outer block.

inline BlockMatrix outer_corner(const BlockMatrix& m, std::size_t x0) {
  IndexSpace target(m.index().outer(), [&] {
    std::vector<std::size_t> inner{m.index().outer()->size()};
    inner.insert(inner.end(), m.index().inner_dims().begin(), m.index().inner_dims().end());
    return inner;
  }());
  BlockMatrix out(target, m.block_dim());
  const std::size_t c = m.size();
  for (const auto& [key, b] : m.blocks()) out.emplace_unchecked({x0 * c + key.first, x0 * c + key.second}, b);
  return out;
}

inline VerificationReport verify_identity_law(const SpacePtr& space, const std::vector<BlockMatrix>& samples,
                                              std::size_t x0 = 0,
                                              const std::vector<double>& ts = t_grid()) {
  VerificationReport r("identity law");
  if (x0 >= space->size()) throw LookupError("corner point outside the space");
  const PointMap id = PointMap::identity(space);
  double worst = 0.0, excess = 0.0;
  std::string witness;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const BlockMatrix& m = samples[s];
    const BlockMatrix a = pushforward(id, m);
    const std::size_t rest = m.index().inner_count();
    const std::size_t nx = space->size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t u = 0; u < rest; ++u) pairs.emplace_back((x * nx + x) * rest + u, (x0 * nx + x) * rest + u);
    const Involution sigma = Involution::swapping(a.size(), pairs);
    const double err = max_abs_diff(conjugate(rotation_operator(sigma, a.index(), a.block_dim(), 1.0), a),
                                    outer_corner(m, x0));
    worst = std::max(worst, err);
    if (err > kIdentityTol && witness.empty()) witness = "sample " + std::to_string(s);
    double spread = 0.0;
    for (std::size_t x = 0; x < nx; ++x) spread = std::max(spread, space->distance(x, x0));
    for (double t : ts) {
      const BlockMatrix rot = rotation_operator(sigma, a.index(), a.block_dim(), t);
      excess = std::max(excess, propagation(conjugate(rot, a)) - (propagation(a) + 2.0 * spread));
    }
  }
  r.expect_le("Rot(1) id_+ m Rot(1)* = m in the corner", worst, kIdentityTol, 0.0, witness);
  r.expect_le("propagation bounded along the rotation path", excess, 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Corner path in M_k ⊗ M_d: b -> ε_00 ⊗ b, then the interleaving enumeration
// (a, i) -> i k + a, is connected to b sitting in the first d coordinates by a
// chain of single-transposition rotation paths.

struct CornerModel {
  std::size_t block_dim;
  std::size_t copies;  // k
  IndexSpace tensor_index;  // (a, i), a < k, i < d
  IndexSpace flat_index;    // k d positions
  std::vector<std::size_t> theta;  // (a, i) position -> flat position
};

inline CornerModel make_corner_model(std::size_t d, std::size_t k) {
  if (d == 0 || k < 2) throw StructuralError("corner model needs d >= 1 and k >= 2");
  auto point = share(FiniteMetricSpace::line(1));
  CornerModel cm{d, k, IndexSpace(point, {k, d}), IndexSpace(point, {k * d}), {}};
  cm.theta.resize(k * d);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < d; ++i) cm.theta[a * d + i] = i * k + a;
  return cm;
}

inline BlockMatrix scalar_matrix(const Block& b, const IndexSpace& index, std::size_t offset = 0,
                                 std::size_t stride = 1) {
  BlockMatrix out(index, 1);
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      out.set_block(offset + static_cast<std::size_t>(i) * stride, offset + static_cast<std::size_t>(j) * stride,
                    Block::Constant(1, 1, b(i, j)));
  return out;
}

/// The transpositions (from, to) that move vector i from position i*k to position i,
/// parking any occupant of a target position in a free slot first.
inline std::vector<std::pair<std::size_t, std::size_t>> corner_moves(std::size_t d, std::size_t k) {
  const std::size_t n = d * k;
  constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);
  std::vector<std::size_t> loc(d), occupant(n, kEmpty);
  for (std::size_t i = 0; i < d; ++i) {
    loc[i] = i * k;
    occupant[i * k] = i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> moves;
  auto move = [&](std::size_t from, std::size_t to) {
    const std::size_t v = occupant[from];
    moves.emplace_back(from, to);
    occupant[to] = v;
    occupant[from] = kEmpty;
    loc[v] = to;
  };
  for (std::size_t i = 0; i < d; ++i) {
    if (loc[i] == i) continue;
    if (occupant[i] != kEmpty) {
      std::size_t parking = d;
      while (occupant[parking] != kEmpty) ++parking;
      move(i, parking);
    }
    move(loc[i], i);
  }
  return moves;
}

inline VerificationReport verify_corner_path(std::size_t d, const std::vector<Block>& blocks, std::size_t k = 2,
                                              const std::vector<double>& ts = t_grid()) {
  VerificationReport r("corner path");
  const CornerModel cm = make_corner_model(d, k);
  const auto moves = corner_moves(d, k);
  double sv_err = 0.0, norm_err = 0.0, trace_err = 0.0, end_err = 0.0, junction_err = 0.0, start_err = 0.0;
  for (const Block& b : blocks) {
    if (b.rows() != static_cast<Eigen::Index>(d) || b.cols() != static_cast<Eigen::Index>(d))
      throw StructuralError("corner path sample has the wrong block size");
    const BlockMatrix corner = scalar_matrix(b, cm.tensor_index);  // a = 0 slot
    const BlockMatrix image = reindex(corner, cm.theta, cm.flat_index);
    const BlockMatrix target = scalar_matrix(b, cm.flat_index);

    Eigen::JacobiSVD<Block> svd(b);
    const Eigen::VectorXd sb = svd.singularValues();
    const auto si = full_singular_values(image);
    for (std::size_t i = 0; i < si.size(); ++i) {
      const double expect = i < static_cast<std::size_t>(sb.size()) ? sb(static_cast<Eigen::Index>(i)) : 0.0;
      sv_err = std::max(sv_err, std::abs(si[i] - expect));
    }
    const double nb = sb.size() ? sb(0) : 0.0;
    norm_err = std::max(norm_err, std::abs(operator_norm(image) - nb) / std::max(1.0, nb));
    trace_err = std::max(trace_err, std::abs(trace(image) - b.trace()));

    BlockMatrix current = image;
    bool first = true;
    for (const auto& [from, to] : moves) {
      const Involution sigma = Involution::swapping(cm.flat_index.size(), {{from, to}});
      const ConjugationPath step = sample_conjugation(sigma, current, ts);
      if (step.values.empty()) continue;
      const double e = max_abs_diff(step.values.front(), current);
      if (first) start_err = std::max(start_err, e);
      else junction_err = std::max(junction_err, e);
      first = false;
      current = step.values.back();
    }
    end_err = std::max(end_err, max_abs_diff(current, target));
  }
  r.expect_le("singular values preserved", sv_err, 1e-10);
  r.expect_le("norm preserved (relative)", norm_err, 1e-10);
  r.expect_le("trace preserved", trace_err, 1e-10);
  r.expect_le("path starts at theta(iota(b))", start_err, 0.0);
  r.expect_le("steps join continuously", junction_err, kIdentityTol);
  r.expect_le("path ends at b in the standard corner", end_err, kIdentityTol);
  r.info("rotation steps", "single-transposition rotations in the path", static_cast<double>(moves.size()));
  return r;
}

// ---------------------------------------------------------------------------
// Homotopy invariance: the chained closeness homotopies of the sliced family.

/// The chain t -> eta_n(t) placed on the global parameter u = n + t, u in [1, n_max].
struct ChainedHomotopy {
  std::vector<PointMap> family;
  std::vector<double> step_closeness;             // sup_x dist(f_n(x), f_{n+1}(x))
  std::vector<std::size_t> stationarity;          // N(x)
  std::map<BlockKey, std::size_t> constancy_index;  // N(y1, y2)

  std::size_t n_max() const { return family.size(); }

  // Global parameter -> (1-based step, local t).
  std::pair<std::size_t, double> locate(double u) const {
    if (u < 1.0 || u > static_cast<double>(n_max())) throw StructuralError("global parameter outside [1, n_max]");
    if (n_max() == 1) return {1, 0.0};
    auto n = static_cast<std::size_t>(u);
    if (n >= n_max()) n = n_max() - 1;
    return {n, u - static_cast<double>(n)};
  }
};

/// N(y1, y2) = max over x whose slice orbit meets {y1, y2} of N(x); 1 when no
/// orbit meets them. Beyond it every involved point is stationary and no other
/// point ever lands on y1 or y2.
inline std::map<BlockKey, std::size_t> constancy_indices(const std::vector<PointMap>& family,
                                                         const std::vector<std::size_t>& stationarity,
                                                         std::size_t target_size) {
  const auto pre = orbit_preimages(family, target_size);
  std::vector<std::size_t> per_point(target_size, 1);
  for (std::size_t y = 0; y < target_size; ++y)
    for (std::size_t x : pre[y]) per_point[y] = std::max(per_point[y], stationarity[x]);
  std::map<BlockKey, std::size_t> out;
  for (std::size_t y1 = 0; y1 < target_size; ++y1)
    for (std::size_t y2 = 0; y2 < target_size; ++y2) out[{y1, y2}] = std::max(per_point[y1], per_point[y2]);
  return out;
}

inline ChainedHomotopy build_chain(const CoarseHomotopy& data, std::size_t n_max = 0) {
  ChainedHomotopy chain;
  chain.family = slice_family(data, std::max(n_max, data.cylinder.max_height() + 1));
  for (std::size_t n = 0; n + 1 < chain.family.size(); ++n)
    chain.step_closeness.push_back(closeness_distance(chain.family[n], chain.family[n + 1]));
  chain.stationarity = stationarity_indices(chain.family);
  chain.constancy_index = constancy_indices(chain.family, chain.stationarity, data.target()->size());
  return chain;
}

struct ChainSample {
  double u;
  BlockMatrix value;
};

/// Samples of the chained path for one matrix, in increasing u; each junction
/// appears twice (end of step n, start of step n + 1).
inline std::vector<ChainSample> sample_chain(const ChainedHomotopy& chain, const BlockMatrix& m,
                                             const std::vector<double>& ts) {
  std::vector<ChainSample> out;
  if (chain.n_max() == 1) {
    out.push_back({1.0, pushforward(chain.family.front(), m)});
    return out;
  }
  for (std::size_t n = 0; n + 1 < chain.n_max(); ++n) {
    const ConjugationPath p = closeness_homotopy(chain.family[n], chain.family[n + 1], m, ts);
    for (std::size_t k = 0; k < ts.size(); ++k)
      out.push_back({static_cast<double>(n + 1) + ts[k], p.values[k]});
  }
  return out;
}

using GroupedBlocks = std::map<BlockKey, std::map<BlockKey, Block>>;

inline GroupedBlocks group_by_outer(const BlockMatrix& m) {
  GroupedBlocks g;
  const IndexSpace& ix = m.index();
  for (const auto& [key, b] : m.blocks())
    g[{ix.outer_of(key.first), ix.outer_of(key.second)}].emplace(
        BlockKey{ix.inner_of(key.first), ix.inner_of(key.second)}, b);
  return g;
}

struct HomotopyInvarianceResult {
  VerificationReport report;
  ChainedHomotopy chain;
  std::map<BlockKey, std::size_t> observed_threshold;  // smallest integer u from which the block was seen constant (max over samples)
};

inline HomotopyInvarianceResult verify_homotopy_invariance(const CoarseHomotopy& data,
                                                           const std::vector<BlockMatrix>& samples,
                                                           const std::vector<double>& ts = t_grid(),
                                                           double tol = kIdentityTol) {
  HomotopyInvarianceResult res;
  VerificationReport& r = res.report;
  r = VerificationReport("homotopy invariance");
  const VerificationReport endpoints = data.check_endpoints();
  r.merge(endpoints);
  if (!endpoints.ok()) return res;

  ChainedHomotopy& chain = res.chain;
  chain = build_chain(data);
  const std::size_t ny = data.target()->size();

  // (2) consecutive slices are close, with constants bounded by the homotopy's modulus at 1.
  const ExpansionModulus h_mod = expansion_modulus(data.homotopy);
  const double max_step = chain.step_closeness.empty()
                              ? 0.0
                              : *std::max_element(chain.step_closeness.begin(), chain.step_closeness.end());
  r.expect_le("consecutive slices close (<= modulus of H at 1)", max_step, h_mod.at(1.0));

  std::vector<ExpansionModulus> moduli;
  for (const PointMap& fn : chain.family) moduli.push_back(expansion_modulus(fn));

  double junction_err = 0.0, start_err = 0.0, end_err = 0.0, prop_excess = -1.0;
  double worst_const = 0.0;
  std::string junction_w, prop_w, const_w;
  for (auto& [key, n] : chain.constancy_index) res.observed_threshold[key] = 1;

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const BlockMatrix& m = samples[s];
    const auto values = sample_chain(chain, m, ts);

    // (3) junctions.
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      if (values[k].u == values[k + 1].u) {
        const double e = max_abs_diff(values[k].value, values[k + 1].value);
        if (e > junction_err) {
          junction_err = e;
          if (e > tol) junction_w = "sample " + std::to_string(s) + " u=" + std::to_string(values[k].u);
        }
      }
    }
    // (4) global endpoints.
    start_err = std::max(start_err, max_abs_diff(values.front().value, pushforward(data.f, m)));
    end_err = std::max(end_err, max_abs_diff(values.back().value, pushforward(data.g, m)));

    // (5) uniform propagation bound.
    const double pm = propagation(m);
    double mod = 0.0;
    for (const auto& md : moduli) mod = std::max(mod, md.at(pm));
    const double bound = mod + 2.0 * max_step;
    for (const auto& v : values) {
      const double e = propagation(v.value) - bound;
      if (e > prop_excess) {
        prop_excess = e;
        if (e > 0.0) prop_w = "sample " + std::to_string(s) + " u=" + std::to_string(v.u);
      }
    }

    // (6) eventual constancy.
    std::vector<GroupedBlocks> grouped;
    grouped.reserve(values.size());
    for (const auto& v : values) grouped.push_back(group_by_outer(v.value));
    const GroupedBlocks& ref = grouped.back();
    static const std::map<BlockKey, Block> kEmptyBlock;
    auto lookup = [&](const GroupedBlocks& g, const BlockKey& key) -> const std::map<BlockKey, Block>& {
      auto it = g.find(key);
      return it == g.end() ? kEmptyBlock : it->second;
    };
    for (std::size_t y1 = 0; y1 < ny; ++y1)
      for (std::size_t y2 = 0; y2 < ny; ++y2) {
        const BlockKey key{y1, y2};
        const auto n_const = static_cast<double>(chain.constancy_index.at(key));
        const auto& ref_block = lookup(ref, key);
        double last_varying_u = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) {
          const double e = max_abs_diff(lookup(grouped[k], key), ref_block);
          if (e > tol) last_varying_u = std::max(last_varying_u, values[k].u);
          if (values[k].u >= n_const && e > worst_const) {
            worst_const = e;
            if (e > tol)
              const_w = "sample " + std::to_string(s) + " block (" + data.target()->label(y1) + "," +
                        data.target()->label(y2) + ") u=" + std::to_string(values[k].u);
          }
        }
        // Smallest integer threshold with every later sample equal to the reference.
        auto& obs = res.observed_threshold[key];
        const auto threshold = static_cast<std::size_t>(last_varying_u) + (last_varying_u > 0.0 ? 1 : 0);
        obs = std::max(obs, std::max<std::size_t>(threshold, 1));
      }
  }

  r.expect_le("junctions agree", junction_err, tol, 0.0, junction_w);
  r.expect_le("chain starts at f_+ m", start_err, tol);
  r.expect_le("chain ends at g_+ m", end_err, tol);
  r.expect_le("uniform propagation bound along the chain", std::max(prop_excess, 0.0), 0.0, 0.0, prop_w)
      .detail = "excess over max_n M_{f_n}(prop m) + 2 max_n step";
  r.expect_le("blocks constant beyond N(y1, y2)", worst_const, tol, 0.0, const_w);
  std::size_t max_n = 1, sharper = 0;
  for (const auto& [key, n] : chain.constancy_index) {
    max_n = std::max(max_n, n);
    if (res.observed_threshold[key] < n) ++sharper;
  }
  r.info("largest constancy index", "max N(y1, y2)", static_cast<double>(max_n));
  r.info("pairs constant before N", "blocks observed constant earlier than the computed index",
         static_cast<double>(sharper));
  return res;
}

// ---------------------------------------------------------------------------
// Propagation of products: the additive bound holds, the multiplicative form
// fails on a line whose metric is scaled below 1.

inline VerificationReport demonstrate_propmult_gap(double scale = 0.5) {
  VerificationReport r("propagation of products");
  auto line = share(FiniteMetricSpace::line(3, scale));
  IndexSpace ix(line);
  BlockMatrix shift(ix, 1);
  shift.set_block(0, 1, Block::Ones(1, 1));
  shift.set_block(1, 2, Block::Ones(1, 1));
  const BlockMatrix sq = multiply(shift, shift);
  const double p1 = propagation(shift);
  const double p2 = propagation(sq);
  r.expect("shift squared is supported at (0,2) only",
           sq.blocks().size() == 1 && sq.blocks().count({0, 2}) == 1);
  r.expect_le("additive bound prop(m1 m2) <= prop(m1) + prop(m2)", p2, p1 + p1);
  const bool mult = p2 <= p1 * p1;
  r.info("multiplicative bound prop(m1 m2) <= prop(m1) prop(m2)",
         mult ? "holds" : "violated: the multiplicative form is not a valid bound", p2, p1 * p1);

  const BlockMatrix diag = BlockMatrix::identity(ix, 1);
  r.expect_le("diagonal product propagation", propagation(multiply(diag, diag)), 0.0);
  return r;
}

}  // namespace roeforge
