#include <gtest/gtest.h>

#include "roeforge/generators.hpp"
#include "roeforge/pipeline.hpp"
#include "roeforge/suite.hpp"

using namespace roeforge;

namespace {

SpacePtr line(std::size_t n) { return share(FiniteMetricSpace::line(n)); }

const Check& check(const VerificationReport& r, const std::string& name) {
  const Check* c = r.find(name);
  if (!c) throw std::runtime_error("missing check " + name);
  return *c;
}

}  // namespace

// functoriality --------------------------------------------------------------

TEST(Functoriality, IdentityMaps) {
  Rng rng(1);
  const auto x = line(3);
  const auto id = PointMap::identity(x);
  const auto m = random_matrix(rng, IndexSpace(x), 2, 0.6, 2.0);
  for (std::size_t y0 = 0; y0 < 3; ++y0) {
    const auto r = verify_functoriality(id, id, {m}, y0);
    EXPECT_TRUE(r.ok()) << r.to_text();
  }
}

TEST(Functoriality, ZeroMatrix) {
  const auto x = line(2), y = line(3), z = line(2);
  const PointMap f(x, y, {2, 0}), g(y, z, {1, 1, 0});
  const auto out = functoriality_outcome(f, g, BlockMatrix(IndexSpace(x), 1), 1, t_grid(5));
  EXPECT_EQ(out.endpoint_error, 0.0);
}

TEST(Functoriality, CollapsingToAPointNeedsNoRotation) {
  Rng rng(2);
  const auto x = line(2), a = line(1);
  const PointMap f(x, a, {0, 0}), g(a, a, {0});
  EXPECT_EQ(functoriality_involution(f, 0, 1).moved_count(), 0u);
  const auto m = random_matrix(rng, IndexSpace(x), 1, 1.0, 5.0);
  const BlockMatrix lhs = pushforward(g, pushforward(f, m));
  const BlockMatrix rhs = insert_corner_factor(pushforward(compose(g, f), m), 1, 0);
  EXPECT_EQ(max_abs_diff(lhs, rhs), 0.0);
  EXPECT_TRUE(verify_functoriality(f, g, {m}, 0).ok());
}

TEST(Functoriality, RandomTuples) {
  Rng rng(77);
  for (int i = 0; i < 25; ++i) {
    const auto x = random_space(rng, 1, 5), y = random_space(rng, 1, 5), z = random_space(rng, 1, 5);
    const auto f = random_coarse_map(rng, x, y), g = random_coarse_map(rng, y, z);
    const auto m = random_matrix(rng, IndexSpace(x), rng.index(1, 3), 0.4, 3.0);
    const auto r = verify_functoriality(f, g, {m}, rng.below(y->size()));
    EXPECT_TRUE(r.ok()) << r.to_text();
    EXPECT_LE(*check(r, "Rot(1) g_+f_+m Rot(1)* = corner (g o f)_+ m").measured, 1e-12);
  }
}

TEST(Functoriality, Mismatch) {
  const auto x = line(2), y = line(3);
  EXPECT_THROW(verify_functoriality(PointMap::identity(x), PointMap::identity(y), {}), StructuralError);
}

// identity law ---------------------------------------------------------------

TEST(IdentityLaw, SinglePoint) {
  const auto x = line(1);
  BlockMatrix m(IndexSpace(x), 2);
  m.set_block(0, 0, Block::Identity(2, 2) * Complex(3.0, 1.0));
  EXPECT_TRUE(verify_identity_law(x, {m}, 0).ok());
}

TEST(IdentityLaw, IdentityMatrixLandsInTheCorner) {
  const auto x = line(3);
  const auto m = BlockMatrix::identity(IndexSpace(x), 1);
  const auto r = verify_identity_law(x, {m}, 1);
  EXPECT_TRUE(r.ok()) << r.to_text();
  const auto corner = outer_corner(m, 1);
  // The (1,1) outer block holds m itself: three unit entries on the inner diagonal.
  const auto blk = outer_block(corner, 1, 1);
  ASSERT_EQ(blk.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(blk.at({i, i})(0, 0), Complex(1.0));
}

TEST(IdentityLaw, RandomThreePoint) {
  Rng rng(13);
  const auto x = line(3);
  const auto m = random_matrix(rng, IndexSpace(x), 2, 1.0, 5.0);
  const auto r = verify_identity_law(x, {m}, 2);
  EXPECT_TRUE(r.ok());
  EXPECT_LE(*check(r, "Rot(1) id_+ m Rot(1)* = m in the corner").measured, 1e-12);
}

// corner path ------------------------------------------------------------------

TEST(CornerPath, ZeroBlock) {
  const auto r = verify_corner_path(2, {Block::Zero(2, 2)});
  EXPECT_TRUE(r.ok()) << r.to_text();
}

TEST(CornerPath, IdentityBlockKeepsSpectrum) {
  const auto cm = make_corner_model(3, 2);
  const BlockMatrix image = reindex(scalar_matrix(Block::Identity(3, 3), cm.tensor_index), cm.theta, cm.flat_index);
  const auto sv = full_singular_values(image);
  ASSERT_EQ(sv.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sv[i], 1.0, 1e-14);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_NEAR(sv[i], 0.0, 1e-14);
  EXPECT_TRUE(verify_corner_path(3, {Block::Identity(3, 3)}).ok());
}

TEST(CornerPath, RandomBlocks) {
  Rng rng(3);
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::size_t k = 2; k <= 3; ++k) {
      const auto r = verify_corner_path(d, {random_block(rng, d), random_block(rng, d)}, k);
      EXPECT_TRUE(r.ok()) << "d=" << d << " k=" << k << "\n" << r.to_text();
    }
}

// homotopy invariance ------------------------------------------------------------

TEST(HomotopyInvariance, ContractionOfFivePoints) {
  const auto data = contraction_homotopy(5);
  const auto chain = build_chain(data);
  EXPECT_EQ(chain.n_max(), 5u);
  // Hand enumeration: f_n(x) = max(x - n + 1, 0), so x settles at n = x + 1.
  EXPECT_EQ(chain.stationarity, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  // Every y is visited by x = 4 (values 4,3,2,1,0), so every pair waits for N(4) = 5.
  for (const auto& [key, n] : chain.constancy_index) EXPECT_EQ(n, 5u) << key.first << "," << key.second;
  for (double s : chain.step_closeness) EXPECT_EQ(s, 1.0);

  Rng rng(5);
  const auto m = random_matrix(rng, IndexSpace(data.base()), 2, 0.7, 2.0);
  const auto res = verify_homotopy_invariance(data, {m, BlockMatrix::identity(IndexSpace(data.base()), 2)});
  EXPECT_TRUE(res.report.ok()) << res.report.to_text();
  for (const auto& [key, obs] : res.observed_threshold) EXPECT_LE(obs, chain.constancy_index.at(key));
}

TEST(HomotopyInvariance, ZeroHeightReducesToEquality) {
  Rng rng(6);
  const auto x = line(4), y = line(4);
  const auto data = random_homotopy(rng, x, y, 0);
  const auto chain = build_chain(data);
  EXPECT_EQ(chain.n_max(), 1u);
  const auto m = random_matrix(rng, IndexSpace(x), 1, 0.5, 2.0);
  EXPECT_TRUE(verify_homotopy_invariance(data, {m}).report.ok());
}

TEST(HomotopyInvariance, ConstantHomotopy) {
  const auto x = line(3), y = line(2);
  const PointMap f(x, y, {0, 1, 1});
  PCylinder c(x, {2, 1, 0});
  std::vector<std::size_t> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = f(c.points()[i].base);
  const auto data = make_homotopy(c, PointMap(c.space(), y, v));
  const auto chain = build_chain(data);
  for (const auto& [key, n] : chain.constancy_index) EXPECT_EQ(n, 1u);
  Rng rng(7);
  const auto res = verify_homotopy_invariance(data, {random_matrix(rng, IndexSpace(x), 2, 0.5, 2.0)});
  EXPECT_TRUE(res.report.ok());
}

TEST(HomotopyInvariance, EndpointMismatchIsReported) {
  auto data = contraction_homotopy(3);
  data.g = PointMap::identity(data.base());
  const auto res = verify_homotopy_invariance(data, {});
  EXPECT_FALSE(res.report.ok());
}

TEST(HomotopyInvariance, GeneratedHomotopies) {
  Rng rng(99);
  for (int i = 0; i < 8; ++i) {
    const auto x = random_space(rng, 1, 8), y = random_space(rng, 1, 8);
    const auto data = random_homotopy(rng, x, y, 5);
    const auto m = random_matrix(rng, IndexSpace(x), 2, 0.4, 2.0);
    EXPECT_TRUE(verify_homotopy_invariance(data, {m}).report.ok()) << i;
  }
}

// propagation of products --------------------------------------------------------

TEST(PropMult, ScaledLineCounterexample) {
  const auto r = demonstrate_propmult_gap(0.5);
  EXPECT_TRUE(r.ok());
  const Check& mult = check(r, "multiplicative bound prop(m1 m2) <= prop(m1) prop(m2)");
  EXPECT_EQ(mult.status, CheckStatus::Info);
  EXPECT_EQ(*mult.measured, 1.0);  // prop(S^2) = dist(0, 2) = 2 * 0.5
  EXPECT_EQ(*mult.bound, 0.25);    // prop(S)^2 = 0.5^2
  const Check& add = check(r, "additive bound prop(m1 m2) <= prop(m1) + prop(m2)");
  EXPECT_EQ(*add.measured, *add.bound);  // tight: 1 = 0.5 + 0.5
}

TEST(PropMult, UnitLineBothHold) {
  const auto r = demonstrate_propmult_gap(1.0);
  const Check& add = check(r, "additive bound prop(m1 m2) <= prop(m1) + prop(m2)");
  EXPECT_EQ(*add.measured, 2.0);
  EXPECT_EQ(*add.bound, 2.0);
  // The multiplicative form fails here too: 2 > 1 * 1.
  EXPECT_EQ(*check(r, "multiplicative bound prop(m1 m2) <= prop(m1) prop(m2)").bound, 1.0);
}

// suite -------------------------------------------------------------------------

TEST(Suite, AggregatorKeepsWorstAndFirstFailure) {
  VerificationReport a, b, c;
  a.expect_le("x", 0.1, 1.0);
  b.expect_le("x", 2.0, 1.0, 0.0, "w1");
  c.expect_le("x", 3.0, 1.0, 0.0, "w2");
  ReportAggregator agg("t");
  agg.add(a, "i0");
  agg.add(b, "i1");
  agg.add(c, "i2");
  const auto r = agg.finish();
  ASSERT_EQ(r.checks().size(), 1u);
  EXPECT_EQ(r.checks()[0].status, CheckStatus::Fail);
  EXPECT_EQ(*r.checks()[0].measured, 3.0);
  EXPECT_EQ(r.checks()[0].witness, "i1: w1");
  EXPECT_EQ(r.checks()[0].detail, "3 runs, 2 failures");
}

TEST(Suite, GenerateInstance) {
  SuiteConfig cfg;
  cfg.seed = 1;
  EXPECT_EQ(generate_instance(cfg, "line", 5), FiniteMetricSpace::line(5));
  EXPECT_EQ(generate_instance(cfg, "tree", 8), generate_instance(cfg, "tree", 8));
  EXPECT_TRUE(validate_metric(generate_instance(cfg, "grid", 9)).ok());
  EXPECT_THROW(generate_instance(cfg, "sphere", 4), StructuralError);
}

TEST(Suite, SmallRunIsDeterministicAndGreen) {
  SuiteConfig cfg;
  cfg.metric_count = cfg.propagation_count = cfg.norm_count = 5;
  cfg.pushforward_count = cfg.rotation_count = cfg.closeness_count = 4;
  cfg.functoriality_count = cfg.identity_count = cfg.corner_count = 3;
  cfg.homotopy_count = 2;
  const auto a = suite_to_json(cfg, run_suite(cfg)).dump();
  const auto b = suite_to_json(cfg, run_suite(cfg)).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"ok\":true"), std::string::npos);
  cfg.seed = 8;
  EXPECT_NE(suite_to_json(cfg, run_suite(cfg)).dump(), a);
}

TEST(Suite, ConfigRoundTrip) {
  SuiteConfig cfg = SuiteConfig::acceptance();
  cfg.seed = 123;
  cfg.density = 0.25;
  const SuiteConfig back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_THROW(config_from_json(nlohmann::json{{"sede", 1}}), ParseError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"t_samples", 1}}), ParseError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"norm_count", -3}}), ParseError);
}
