#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "roeforge/block_matrix.hpp"
#include "roeforge/generators.hpp"
#include "roeforge/rotation.hpp"

using namespace roeforge;

namespace {

SpacePtr line(std::size_t n) { return share(FiniteMetricSpace::line(n)); }

Block scalar(Complex c) { return Block::Constant(1, 1, c); }

SpacePtr two_labels(const char* a, const char* b) {
  return share(FiniteMetricSpace({a, b}, {{0, 1}, {1, 0}}));
}

}  // namespace

// roe_matrix -----------------------------------------------------------------

TEST(Propagation, Examples) {
  const IndexSpace ix(line(3));
  EXPECT_EQ(propagation(BlockMatrix::identity(ix, 2)), 0.0);
  BlockMatrix m(ix, 1);
  m.set_block(0, 2, scalar(1.0));
  EXPECT_EQ(propagation(m), 2.0);
  BlockMatrix diag(ix, 1);
  diag.set_block(1, 1, scalar(4.0));
  EXPECT_EQ(propagation(diag), 0.0);
}

TEST(Propagation, PruningDropsTinyBlocks) {
  BlockMatrix m(IndexSpace(line(3)), 1);
  m.set_block(0, 2, scalar(1e-15));
  EXPECT_TRUE(m.is_zero());
}

TEST(OperatorNorm, Examples) {
  const IndexSpace ix(line(2));
  EXPECT_EQ(operator_norm(BlockMatrix(ix, 3)), 0.0);
  BlockMatrix swap(ix, 1);
  swap.set_block(0, 1, scalar(1.0));
  swap.set_block(1, 0, scalar(1.0));
  EXPECT_NEAR(operator_norm(swap), 1.0, 1e-14);
  BlockMatrix diag(ix, 1);
  diag.set_block(0, 0, scalar(1.0));
  diag.set_block(1, 1, scalar(-3.0));
  EXPECT_NEAR(operator_norm(diag), 3.0, 1e-14);
}

TEST(SchurConstant, Examples) {
  const auto l3 = FiniteMetricSpace::line(3);
  EXPECT_EQ(schur_constant(l3, 0.0), 1u);
  EXPECT_EQ(schur_constant(l3, 1.0), 3u);
  EXPECT_EQ(schur_constant(l3, 2.0), 3u);
}

TEST(NormInequality, RandomMatrices) {
  Rng rng(17);
  for (int i = 0; i < 80; ++i) {
    const IndexSpace ix(random_space(rng, 1, 20));
    const auto m = random_matrix(rng, ix, rng.index(1, 3), rng.uniform(0.1, 1.0), rng.uniform(0.0, 4.0));
    const double bound = static_cast<double>(schur_constant(*ix.outer(), propagation(m))) * max_block_norm(m);
    EXPECT_LE(operator_norm(m), bound * (1 + 1e-9) + 1e-12) << i;
  }
}

TEST(Multiply, PropagationSubadditive) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const IndexSpace ix(random_space(rng, 1, 20));
    const std::size_t d = rng.index(1, 3);
    const auto a = random_matrix(rng, ix, d, 0.3, rng.uniform(0, 4));
    const auto b = random_matrix(rng, ix, d, 0.3, rng.uniform(0, 4));
    EXPECT_LE(propagation(a * b), propagation(a) + propagation(b));
    const Eigen::MatrixXcd dense = a.to_dense() * b.to_dense();
    if (dense.size() > 0) EXPECT_LE(((a * b).to_dense() - dense).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pushforward, TwoPointCaseSplit) {
  const auto x = line(2);
  const auto y = two_labels("a", "b");
  const PointMap f(x, y, {0, 1});
  BlockMatrix m(IndexSpace(x), 1);
  m.set_block(0, 0, scalar(1.0));
  m.set_block(0, 1, scalar(2.0));
  m.set_block(1, 0, scalar(3.0));
  m.set_block(1, 1, scalar(4.0));
  const BlockMatrix p = pushforward(f, m);
  ASSERT_EQ(p.index().size(), 4u);
  // (a,0) -> 0, (b,1) -> 3.
  std::map<BlockKey, Complex> expect{{{0, 0}, 1.0}, {{0, 3}, 2.0}, {{3, 0}, 3.0}, {{3, 3}, 4.0}};
  ASSERT_EQ(p.blocks().size(), expect.size());
  for (const auto& [k, v] : expect) EXPECT_EQ(p.block(k.first, k.second)(0, 0), v);
}

TEST(Pushforward, HomomorphismOnRandomTriples) {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const auto x = random_space(rng, 1, 8), y = random_space(rng, 1, 8);
    const auto f = random_coarse_map(rng, x, y);
    const std::size_t d = rng.index(1, 3);
    const auto a = random_matrix(rng, IndexSpace(x), d, 0.4, 3.0);
    const auto b = random_matrix(rng, IndexSpace(x), d, 0.4, 3.0);
    EXPECT_LE(max_abs_diff(pushforward(f, a * b), pushforward(f, a) * pushforward(f, b)), 1e-12);
    EXPECT_LE(max_abs_diff(pushforward(f, adjoint(a)), adjoint(pushforward(f, a))), 1e-12);
    EXPECT_NEAR(operator_norm(pushforward(f, a)), operator_norm(a), 1e-9);
    EXPECT_LE(propagation(pushforward(f, a)), expansion_modulus(f).at(propagation(a)));
  }
}

TEST(CornerEmbed, ZeroBlock) {
  const auto m = corner_embed(std::string("1"), Block::Zero(2, 2), line(3));
  EXPECT_TRUE(m.is_zero());
  EXPECT_THROW(corner_embed(std::string("5"), Block::Zero(2, 2), line(3)), LookupError);
}

TEST(Reindex, IdentityAndErrors) {
  Rng rng(2);
  const IndexSpace ix(line(4));
  const auto m = random_matrix(rng, ix, 2, 0.6, 3.0);
  EXPECT_EQ(max_abs_diff(reindex(m, {0, 1, 2, 3}), m), 0.0);
  EXPECT_THROW(reindex(m, {0, 0, 2, 3}), StructuralError);
  EXPECT_THROW(reindex(m, {0, 1, 2}), StructuralError);
  const auto r = reindex(m, {3, 2, 1, 0});
  for (const auto& [k, b] : m.blocks()) EXPECT_EQ(r.block(3 - k.first, 3 - k.second), b);
}

// rotation_homotopy ------------------------------------------------------------

TEST(Rotation, IdentityInvolution) {
  const auto inv = Involution::identity(4);
  for (double t : {0.0, 0.3, 1.0}) EXPECT_EQ(rotation_matrix(inv, t), Eigen::MatrixXd::Identity(4, 4));
}

TEST(Rotation, SwapAtHalf) {
  const Involution inv({1, 0});
  const double h = std::sqrt(2.0) / 2.0;
  Eigen::MatrixXd expect(2, 2);
  expect << h, h, -h, h;
  EXPECT_LE((rotation_matrix(inv, 0.5) - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rotation, SwapAtOneIsExact) {
  const Involution inv({1, 0});
  Eigen::MatrixXd expect(2, 2);
  expect << 0, 1, -1, 0;
  EXPECT_EQ(rotation_matrix(inv, 1.0), expect);
  EXPECT_EQ(rotation_matrix(inv, 0.0), Eigen::MatrixXd::Identity(2, 2));
}

TEST(Rotation, Propagation) {
  const auto l3 = FiniteMetricSpace::line(3);
  EXPECT_EQ(rotation_propagation(Involution::identity(3), l3), 0.0);
  EXPECT_EQ(rotation_propagation(Involution({2, 1, 0}), l3), 2.0);
}

TEST(Rotation, RejectsNonInvolutions) {
  EXPECT_THROW(Involution({1, 2, 0}), StructuralError);
  EXPECT_THROW(quarter_turn(1.5), StructuralError);
}

TEST(Rotation, OrthogonalAndLipschitz) {
  Rng rng(8);
  const auto ts = t_grid(21);
  for (int i = 0; i < 20; ++i) {
    const auto inv = random_involution(rng, rng.index(1, 14), 12);
    const auto n = static_cast<Eigen::Index>(inv.size());
    for (double t : ts) {
      const auto r = rotation_matrix(inv, t);
      EXPECT_LE((r * r.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    }
    for (std::size_t a = 0; a + 1 < ts.size(); ++a) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(rotation_matrix(inv, ts[a]) - rotation_matrix(inv, ts[a + 1]));
      EXPECT_LE(svd.singularValues()(0), std::numbers::pi / 2 * (ts[a + 1] - ts[a]) + 1e-12);
    }
  }
}

TEST(Closeness, SinglePointSource) {
  const auto x = line(1);
  const auto y = two_labels("a", "b");
  const PointMap f(x, y, {0}), g(x, y, {1});
  BlockMatrix m(IndexSpace(x), 1);
  const Complex c(2.0, -1.0);
  m.set_block(0, 0, scalar(c));
  const auto path = closeness_homotopy(f, g, m, {0.0, 0.25, 0.5, 1.0});
  for (std::size_t k = 0; k < path.ts.size(); ++k) {
    const double th = std::numbers::pi * path.ts[k] / 2;
    const double co = std::cos(th), si = std::sin(th);
    const auto& v = path.values[k];
    EXPECT_NEAR(std::abs(v.block(0, 0)(0, 0) - c * co * co), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.block(1, 1)(0, 0) - c * si * si), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.block(0, 1)(0, 0)), std::abs(c) * co * si, 1e-15);
    EXPECT_NEAR(std::abs(v.block(1, 0)(0, 0)), std::abs(c) * co * si, 1e-15);
  }
  EXPECT_EQ(max_abs_diff(path.values.front(), pushforward(f, m)), 0.0);
  EXPECT_EQ(max_abs_diff(path.values.back(), pushforward(g, m)), 0.0);
  // Propagation 1 strictly inside, against the bound 0 + 2 dist(a, b) = 2.
  EXPECT_EQ(propagation(path.values[2]), 1.0);
  const auto r = propagation_bound_check(path, f, g, m);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(*r.checks().front().bound, 2.0);
}

TEST(Closeness, EqualMapsGiveConstantPath) {
  Rng rng(4);
  const auto x = line(4), y = line(3);
  const auto f = random_map(rng, x, y);
  const auto m = random_matrix(rng, IndexSpace(x), 2, 0.5, 2.0);
  const auto path = closeness_homotopy(f, f, m, t_grid(5));
  for (const auto& v : path.values) EXPECT_EQ(max_abs_diff(v, pushforward(f, m)), 0.0);
  const auto zero = closeness_homotopy(f, random_map(rng, x, y), BlockMatrix(IndexSpace(x), 2), t_grid(5));
  for (const auto& v : zero.values) EXPECT_TRUE(v.is_zero());
}

TEST(Closeness, ConstantBlockWhereMapsAgree) {
  // f = (0,1,2), g = (0,1,3): they agree over {0,1} and differ at x = 2.
  const auto x = line(3), y = line(4);
  const PointMap f(x, y, {0, 1, 2}), g(x, y, {0, 1, 3});
  BlockMatrix m(IndexSpace(x), 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m.set_block(i, j, scalar(1.0));
  const auto path = closeness_homotopy(f, g, m, {0.0, 0.5, 1.0});
  EXPECT_TRUE(constancy_hypothesis(f, g, 0, 1));
  EXPECT_FALSE(constancy_hypothesis(f, g, 2, 2));
  EXPECT_EQ(constancy_check(path, f, g, 0, 1).checks().front().status, CheckStatus::Pass);
  EXPECT_EQ(constancy_check(path, f, g, 2, 2).checks().front().status, CheckStatus::Skipped);
  // Block (2,2) at inner (2,2): 1, 1/2, 0.
  const auto b0 = outer_block(path.values[0], 2, 2), b1 = outer_block(path.values[1], 2, 2);
  EXPECT_EQ(b0.at({2, 2})(0, 0), Complex(1.0));
  EXPECT_NEAR(b1.at({2, 2})(0, 0).real(), 0.5, 1e-15);
  EXPECT_TRUE(outer_block(path.values[2], 2, 2).empty());
  // y = 3 lies outside f's image but is g(2); y1 = y2 = 3 is not hypothesis-free.
  EXPECT_FALSE(constancy_hypothesis(f, g, 3, 3));
}

TEST(Closeness, PointOutsideBothImages) {
  const auto x = line(2), y = line(4);
  const PointMap f(x, y, {0, 1}), g(x, y, {1, 0});
  BlockMatrix m(IndexSpace(x), 1);
  m.set_block(0, 1, scalar(1.0));
  const auto path = closeness_homotopy(f, g, m, t_grid(5));
  const auto r = constancy_check(path, f, g, 3, 3);
  EXPECT_EQ(r.checks().front().status, CheckStatus::Pass);
  for (const auto& v : path.values) EXPECT_TRUE(outer_block(v, 3, 3).empty());
}
