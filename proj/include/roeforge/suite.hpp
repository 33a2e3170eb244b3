#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roeforge/block_matrix.hpp"
#include "roeforge/coarse_maps.hpp"
#include "roeforge/cylinder.hpp"
#include "roeforge/generators.hpp"
#include "roeforge/io.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/pipeline.hpp"
#include "roeforge/report.hpp"
#include "roeforge/rotation.hpp"

namespace roeforge {

/// Knobs for the randomized verification sweep. Every section draws from its
/// own generator seeded from (seed, section), so sections are independent of
/// each other's counts.
struct SuiteConfig {
  std::uint64_t seed = 7;

  std::size_t max_points = 30;         // metric, propagation, norm sections
  std::size_t map_max_points = 12;     // pushforward, closeness sections
  std::size_t functor_max_points = 6;  // X, Y, Z in functoriality (triple products)
  std::size_t homotopy_max_points = 15;
  std::size_t homotopy_max_levels = 12;  // cylinder heights p(x) + 1 <= this
  std::size_t max_block_dim = 4;
  std::size_t homotopy_max_block_dim = 4;
  double density = 0.3;
  double propagation_cap = 3.0;
  std::size_t max_moved = 12;
  std::size_t t_samples = 21;
  std::size_t matrices_per_instance = 2;

  std::size_t metric_count = 50;
  std::size_t propagation_count = 100;
  std::size_t norm_count = 100;
  std::size_t pushforward_count = 60;
  std::size_t rotation_count = 25;
  std::size_t closeness_count = 50;
  std::size_t functoriality_count = 25;
  std::size_t identity_count = 25;
  std::size_t corner_count = 25;
  std::size_t homotopy_count = 10;

  double identity_tol = 1e-12;
  double norm_tol = 1e-9;

  /// Counts used by the acceptance gate.
  static SuiteConfig acceptance() {
    SuiteConfig c;
    c.metric_count = 200;
    c.propagation_count = 500;
    c.norm_count = 500;
    c.pushforward_count = 300;
    c.rotation_count = 100;
    c.closeness_count = 200;
    c.functoriality_count = 100;
    c.identity_count = 100;
    c.corner_count = 100;
    c.homotopy_count = 50;
    return c;
  }
};

#define ROEFORGE_CONFIG_FIELDS(X)                                                                         \
  X(seed) X(max_points) X(map_max_points) X(functor_max_points) X(homotopy_max_points)                    \
  X(homotopy_max_levels) X(max_block_dim) X(homotopy_max_block_dim) X(density) X(propagation_cap)         \
  X(max_moved) X(t_samples) X(matrices_per_instance) X(metric_count) X(propagation_count) X(norm_count)   \
  X(pushforward_count) X(rotation_count) X(closeness_count) X(functoriality_count) X(identity_count)      \
  X(corner_count) X(homotopy_count) X(identity_tol) X(norm_tol)

inline nlohmann::json config_to_json(const SuiteConfig& c) {
  nlohmann::json j;
#define ROEFORGE_WRITE(f) j[#f] = c.f;
  ROEFORGE_CONFIG_FIELDS(ROEFORGE_WRITE)
#undef ROEFORGE_WRITE
  return j;
}

/// Unknown keys are rejected so typos do not silently fall back to defaults.
inline SuiteConfig config_from_json(const nlohmann::json& j, SuiteConfig c = {}) {
  if (!j.is_object()) io::fail("config", "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
#define ROEFORGE_READ(f)                                                           \
  if (key == #f) {                                                                 \
    known = true;                                                                  \
    if (!value.is_number()) io::fail("config." + key, "expected a number");      \
    if constexpr (std::is_floating_point_v<decltype(c.f)>) {                       \
      c.f = value.get<double>();                                                   \
    } else {                                                                       \
      if (!value.is_number_unsigned()) io::fail("config." + key, "expected a non-negative integer"); \
      c.f = value.get<decltype(c.f)>();                                            \
    }                                                                              \
  }
    ROEFORGE_CONFIG_FIELDS(ROEFORGE_READ)
#undef ROEFORGE_READ
    if (!known) io::fail("config." + key, "unknown setting");
  }
  if (c.max_points == 0 || c.map_max_points == 0 || c.functor_max_points == 0 || c.homotopy_max_points == 0 ||
      c.max_block_dim == 0 || c.homotopy_max_block_dim == 0 || c.homotopy_max_levels == 0 || c.t_samples < 2)
    io::fail("config", "sizes must be positive and t_samples at least 2");
  return c;
}

/// Folds per-instance reports into one: a check fails if it failed anywhere
/// (first witness kept, prefixed by the instance), measured = worst value.
class ReportAggregator {
 public:
  explicit ReportAggregator(std::string title) : title_(std::move(title)) {}

  void add(const VerificationReport& r, const std::string& instance) {
    for (const Check& c : r.checks()) {
      auto [it, fresh] = index_.try_emplace(c.name, order_.size());
      if (fresh) {
        order_.push_back(c);
        Check& slot = order_.back();
        slot.witness.clear();
        if (c.status == CheckStatus::Fail) slot.witness = instance + ": " + c.witness;
        runs_.push_back(0);
        fails_.push_back(0);
      } else {
        Check& slot = order_[it->second];
        if (c.measured) slot.measured = slot.measured ? std::max(*slot.measured, *c.measured) : *c.measured;
        if (c.bound && (!slot.bound || *c.bound > *slot.bound)) slot.bound = c.bound;
        if (c.status == CheckStatus::Fail) {
          if (slot.status != CheckStatus::Fail) slot.witness = instance + ": " + c.witness;
          slot.status = CheckStatus::Fail;
        } else if (slot.status == CheckStatus::Skipped && c.status == CheckStatus::Pass) {
          slot.status = CheckStatus::Pass;
        }
        if (c.status == CheckStatus::Info) slot.detail = c.detail;
      }
      const std::size_t k = index_[c.name];
      if (c.status == CheckStatus::Pass || c.status == CheckStatus::Fail) ++runs_[k];
      if (c.status == CheckStatus::Fail) ++fails_[k];
    }
  }

  VerificationReport finish() const {
    VerificationReport r(title_);
    for (std::size_t k = 0; k < order_.size(); ++k) {
      Check c = order_[k];
      if (c.status == CheckStatus::Pass || c.status == CheckStatus::Fail) {
        c.detail = std::to_string(runs_[k]) + " runs, " + std::to_string(fails_[k]) + " failures";
      }
      r.add(std::move(c));
    }
    return r;
  }

 private:
  std::string title_;
  std::vector<Check> order_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> runs_, fails_;
};

/// A space from a named generator, seeded by cfg.seed alone.
inline FiniteMetricSpace generate_instance(const SuiteConfig& cfg, std::string_view kind, std::size_t size) {
  Rng rng(cfg.seed);
  return generate_space(rng, parse_space_kind(kind), size);
}

inline std::uint64_t section_seed(std::uint64_t seed, std::uint64_t section) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (section + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::string instance_name(std::size_t i) { return "instance " + std::to_string(i); }

// Sections -------------------------------------------------------------------

/// Generated spaces validate; growth profiles are monotone and end at |X|;
/// balls are nested in the radius.
inline VerificationReport metric_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 1));
  ReportAggregator agg("metric spaces");
  for (std::size_t i = 0; i < count; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.max_points);
    VerificationReport r;
    r.expect("generated space passes validation", validate_metric(*x).ok());
    const auto profile = growth_profile(*x);
    bool mono = true;
    std::size_t prev = 0;
    for (const auto& [radius, size] : profile) {
      mono = mono && size >= prev;
      prev = size;
    }
    r.expect("growth profile monotone", mono);
    r.expect("growth profile ends at |X|", prev == x->size());
    const auto radii = distance_values(*x);
    bool nested = true;
    std::string witness;
    for (std::size_t p = 0; p < x->size() && nested; ++p)
      for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
        auto small = ball(*x, p, radii[k]);
        auto big = ball(*x, p, radii[k + 1]);
        if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) {
          nested = false;
          witness = "x=" + x->label(p);
          break;
        }
      }
    r.expect("balls nested in the radius", nested, witness);
    r.info("points", "", static_cast<double>(x->size()));
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

inline IndexSpace random_index(Rng& rng, std::size_t max_points) {
  return IndexSpace(random_space(rng, 1, max_points));
}

inline std::size_t random_block_dim(Rng& rng, std::size_t max_dim) { return rng.index(1, max_dim); }

/// prop(m1 m2) <= prop(m1) + prop(m2), compared exactly.
inline VerificationReport propagation_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 2));
  ReportAggregator agg("propagation of products");
  for (std::size_t i = 0; i < count; ++i) {
    const IndexSpace ix = random_index(rng, cfg.max_points);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const BlockMatrix a = random_matrix(rng, ix, d, cfg.density, cfg.propagation_cap * rng.unit() * 2.0);
    const BlockMatrix b = random_matrix(rng, ix, d, cfg.density, cfg.propagation_cap * rng.unit() * 2.0);
    VerificationReport r;
    const double pa = propagation(a), pb = propagation(b), pab = propagation(multiply(a, b));
    r.expect_le("prop(m1 m2) <= prop(m1) + prop(m2)", pab - (pa + pb), 0.0);
    agg.add(r, instance_name(i));
  }
  VerificationReport out = agg.finish();
  out.merge(demonstrate_propmult_gap(0.5), "scaled line");
  return out;
}

/// ||m|| <= schur_constant(X, prop m) max ||b_xy||.
inline VerificationReport norm_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 3));
  ReportAggregator agg("norm inequality");
  for (std::size_t i = 0; i < count; ++i) {
    const IndexSpace ix = random_index(rng, cfg.max_points);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const BlockMatrix m = random_matrix(rng, ix, d, rng.uniform(0.05, 1.0), cfg.propagation_cap * rng.unit() * 2.0);
    const double bound = static_cast<double>(schur_constant(*ix.outer(), propagation(m))) * max_block_norm(m);
    const double norm = operator_norm(m);
    VerificationReport r;
    r.expect_le("||m|| <= N(prop m) sup||b||", norm - bound, 0.0, cfg.norm_tol * std::max(1.0, bound));
    r.info("slack ratio", "||m|| / bound", bound > 0 ? norm / bound : 0.0);
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

/// f_+ is a linear, multiplicative, *-preserving isometry with prop_Y(f_+ m) <= M_f(prop m).
inline VerificationReport verify_pushforward(const PointMap& f, const BlockMatrix& a, const BlockMatrix& b,
                                             Complex c, double tol = kIdentityTol, double norm_tol = 1e-9) {
  const BlockMatrix fa = pushforward(f, a), fb = pushforward(f, b);
  VerificationReport r("pushforward");
  r.expect_le("f+(m1 + m2) = f+m1 + f+m2", max_abs_diff(pushforward(f, a + b), fa + fb), tol);
  r.expect_le("f+(c m) = c f+m", max_abs_diff(pushforward(f, scale(a, c)), scale(fa, c)), tol);
  r.expect_le("f+(m1 m2) = f+m1 f+m2", max_abs_diff(pushforward(f, a * b), fa * fb), tol);
  r.expect_le("f+(m*) = (f+m)*", max_abs_diff(pushforward(f, adjoint(a)), adjoint(fa)), tol);
  const double na = operator_norm(a);
  r.expect_le("||f+m|| = ||m||", std::abs(operator_norm(fa) - na), norm_tol * std::max(1.0, na));
  r.expect_le("prop(f+m) <= M_f(prop m)", propagation(fa) - expansion_modulus(f).at(propagation(a)), 0.0);
  return r;
}

/// Endpoints, propagation bound and block constancy of the closeness homotopy.
inline VerificationReport verify_closeness(const PointMap& f, const PointMap& g, const BlockMatrix& m,
                                           const std::vector<double>& ts, double tol = kIdentityTol) {
  const ConjugationPath path = closeness_homotopy(f, g, m, ts);
  VerificationReport r("closeness homotopy");
  r.expect_le("eta(0) = f+m exactly", max_abs_diff(path.values.front(), pushforward(f, m)), 0.0);
  r.expect_le("eta(1) = g+m", max_abs_diff(path.values.back(), pushforward(g, m)), tol);
  r.merge(propagation_bound_check(path, f, g, m));
  std::size_t constant_blocks = 0;
  const std::size_t ny = f.target()->size();
  for (std::size_t y1 = 0; y1 < ny; ++y1)
    for (std::size_t y2 = 0; y2 < ny; ++y2) {
      const auto c = constancy_check(path, f, g, y1, y2, tol);
      const Check& only = c.checks().front();
      if (only.status == CheckStatus::Skipped) continue;
      ++constant_blocks;
      Check renamed = only;
      renamed.name = "blocks with the constancy hypothesis are t-constant";
      if (renamed.status == CheckStatus::Fail) renamed.witness = only.name + " " + only.witness;
      r.add(std::move(renamed));
    }
  r.info("blocks meeting the constancy hypothesis", "", static_cast<double>(constant_blocks));
  return r;
}

inline VerificationReport pushforward_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 4));
  ReportAggregator agg("pushforward");
  for (std::size_t i = 0; i < count; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.map_max_points);
    const SpacePtr y = random_space(rng, 1, cfg.map_max_points);
    const PointMap f = random_coarse_map(rng, x, y);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const IndexSpace ix(x);
    const BlockMatrix a = random_matrix(rng, ix, d, cfg.density, cfg.propagation_cap);
    const BlockMatrix b = random_matrix(rng, ix, d, cfg.density, cfg.propagation_cap);
    const Complex c(rng.uniform(-2, 2), rng.uniform(-2, 2));
    VerificationReport r = verify_pushforward(f, a, b, c, cfg.identity_tol, cfg.norm_tol);
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

/// Rot(t) is orthogonal, starts at I, ends at a signed permutation, has
/// propagation max dist(x, sigma x) on (0, 1], and is (pi/2)-Lipschitz.
inline VerificationReport rotation_instance(const Involution& inv, const FiniteMetricSpace& space,
                                            const std::vector<double>& ts, double tol) {
  VerificationReport r;
  const auto n = static_cast<Eigen::Index>(inv.size());
  std::vector<Eigen::MatrixXd> mats;
  for (double t : ts) mats.push_back(rotation_matrix(inv, t));

  double orth = 0.0;
  for (const auto& m : mats) orth = std::max(orth, (m * m.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  r.expect_le("Rot(t) Rot(t)* = I", orth, tol);

  r.expect("Rot(0) = I exactly", rotation_matrix(inv, 0.0) == Eigen::MatrixXd::Identity(n, n));

  const Eigen::MatrixXd end = rotation_matrix(inv, 1.0);
  std::string perm_w;
  for (std::size_t x = 0; x < inv.size(); ++x) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(static_cast<Eigen::Index>(x)) = 1.0;
    const Eigen::VectorXd img = end * e;
    const auto sx = static_cast<Eigen::Index>(inv[x]);
    const bool ok = std::abs(img(sx)) == 1.0 && (img.cwiseAbs().sum() == 1.0);
    if (!ok && perm_w.empty()) perm_w = "x=" + space.label(x);
  }
  r.expect("Rot(1) e_x = +-e_sigma(x)", perm_w.empty(), perm_w);

  const double expected = rotation_propagation(inv, space);
  const IndexSpace ix(std::make_shared<const FiniteMetricSpace>(space));
  std::string prop_w;
  for (double t : ts) {
    const double p = propagation(rotation_operator(inv, ix, 1, t));
    const double want = t == 0.0 ? 0.0 : expected;
    if (p != want && prop_w.empty()) prop_w = t_witness(t);
  }
  r.expect("prop(Rot(t)) = max dist(x, sigma x) on (0,1], 0 at t=0", prop_w.empty(), prop_w);

  double lip = 0.0;
  std::string lip_w;
  for (std::size_t a = 0; a < ts.size(); ++a)
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      const double lhs = spectral_norm(mats[a] - mats[b]);
      const double rhs = std::numbers::pi / 2.0 * std::abs(ts[a] - ts[b]);
      lip = std::max(lip, lhs - rhs);
      if (lhs > rhs + tol && lip_w.empty()) lip_w = t_witness(ts[a]) + " " + t_witness(ts[b]);
    }
  r.expect_le("||Rot(t1) - Rot(t2)|| <= (pi/2)|t1 - t2|", lip, tol, 0.0, lip_w);
  return r;
}

inline VerificationReport rotation_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 5));
  ReportAggregator agg("rotation paths");
  const auto ts = t_grid(cfg.t_samples);
  for (std::size_t i = 0; i < count; ++i) {
    const SpacePtr x = random_space(rng, 1, std::max<std::size_t>(cfg.max_moved + 2, 2));
    const Involution inv = random_involution(rng, x->size(), cfg.max_moved);
    VerificationReport r = rotation_instance(inv, *x, ts, cfg.identity_tol);
    r.info("moved points", "", static_cast<double>(inv.moved_count()));
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

/// Closeness homotopy endpoints, propagation bound, and block constancy.
inline VerificationReport closeness_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 6));
  ReportAggregator agg("closeness homotopy");
  const auto ts = t_grid(cfg.t_samples);
  for (std::size_t i = 0; i < count; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.map_max_points);
    const SpacePtr y = random_space(rng, 1, cfg.map_max_points);
    const PointMap f = random_coarse_map(rng, x, y);
    const PointMap g = rng.chance(0.5) ? nearby_map(rng, f, rng.uniform(0.0, 3.0)) : random_map(rng, x, y);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const BlockMatrix m = random_matrix(rng, IndexSpace(x), d, cfg.density, cfg.propagation_cap);
    VerificationReport r = verify_closeness(f, g, m, ts, cfg.identity_tol);
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

inline std::vector<BlockMatrix> random_samples(Rng& rng, const IndexSpace& ix, std::size_t d, std::size_t count,
                                               const SuiteConfig& cfg) {
  std::vector<BlockMatrix> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_matrix(rng, ix, d, cfg.density, cfg.propagation_cap));
  return out;
}

/// Functoriality tuples, the identity law, and the corner path.
inline VerificationReport functoriality_section(const SuiteConfig& cfg, std::size_t tuples, std::size_t identities,
                                                std::size_t corners) {
  Rng rng(section_seed(cfg.seed, 7));
  const auto ts = t_grid(cfg.t_samples);
  ReportAggregator fagg("functoriality");
  for (std::size_t i = 0; i < tuples; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.functor_max_points);
    const SpacePtr y = random_space(rng, 1, cfg.functor_max_points);
    const SpacePtr z = random_space(rng, 1, cfg.functor_max_points);
    const PointMap f = random_coarse_map(rng, x, y);
    const PointMap g = random_coarse_map(rng, y, z);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const std::size_t y0 = rng.below(y->size());
    // One sample matrix per tuple, so a tuple is (f, g, m, y0).
    fagg.add(verify_functoriality(f, g, random_samples(rng, IndexSpace(x), d, 1, cfg), y0, ts), instance_name(i));
  }
  ReportAggregator iagg("identity law");
  for (std::size_t i = 0; i < identities; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.functor_max_points);
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    iagg.add(verify_identity_law(x, random_samples(rng, IndexSpace(x), d, 1, cfg), rng.below(x->size()), ts),
             instance_name(i));
  }
  ReportAggregator cagg("corner path");
  for (std::size_t i = 0; i < corners; ++i) {
    const std::size_t d = random_block_dim(rng, cfg.max_block_dim);
    const std::size_t k = rng.index(2, 3);
    cagg.add(verify_corner_path(d, {random_block(rng, d)}, k, ts), instance_name(i));
  }
  VerificationReport out("functoriality and identity");
  out.merge(fagg.finish(), "functoriality");
  out.merge(iagg.finish(), "identity");
  out.merge(cagg.finish(), "corner");
  return out;
}

/// Generated coarse homotopies through the chained homotopy verifier.
inline VerificationReport homotopy_section(const SuiteConfig& cfg, std::size_t count) {
  Rng rng(section_seed(cfg.seed, 8));
  ReportAggregator agg("homotopy invariance");
  const auto ts = t_grid(cfg.t_samples);
  for (std::size_t i = 0; i < count; ++i) {
    const SpacePtr x = random_space(rng, 1, cfg.homotopy_max_points);
    const SpacePtr y = random_space(rng, 1, cfg.homotopy_max_points);
    const CoarseHomotopy h = random_homotopy(rng, x, y, cfg.homotopy_max_levels - 1, rng.index(1, 2));
    const std::size_t d = random_block_dim(rng, cfg.homotopy_max_block_dim);
    const auto samples = random_samples(rng, IndexSpace(x), d, cfg.matrices_per_instance, cfg);
    VerificationReport r = verify_homotopy_invariance(h, samples, ts, cfg.identity_tol).report;
    r.merge(verify_family_properties(slice_family(h, h.cylinder.max_height() + 1), h), "family");
    r.info("levels", "max p(x) + 1", static_cast<double>(h.cylinder.max_height() + 1));
    agg.add(r, instance_name(i));
  }
  return agg.finish();
}

struct SuiteResult {
  std::vector<VerificationReport> sections;
  bool ok() const {
    return std::all_of(sections.begin(), sections.end(), [](const VerificationReport& r) { return r.ok(); });
  }
};

inline SuiteResult run_suite(const SuiteConfig& cfg) {
  SuiteResult res;
  res.sections.push_back(metric_section(cfg, cfg.metric_count));
  res.sections.push_back(propagation_section(cfg, cfg.propagation_count));
  res.sections.push_back(norm_section(cfg, cfg.norm_count));
  res.sections.push_back(pushforward_section(cfg, cfg.pushforward_count));
  res.sections.push_back(rotation_section(cfg, cfg.rotation_count));
  res.sections.push_back(closeness_section(cfg, cfg.closeness_count));
  res.sections.push_back(functoriality_section(cfg, cfg.functoriality_count, cfg.identity_count, cfg.corner_count));
  res.sections.push_back(homotopy_section(cfg, cfg.homotopy_count));
  return res;
}

inline nlohmann::json suite_to_json(const SuiteConfig& cfg, const SuiteResult& res) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : res.sections) sections.push_back(io::report_to_json(s));
  return nlohmann::json{{"config", config_to_json(cfg)}, {"ok", res.ok()}, {"sections", sections}};
}

}  // namespace roeforge
