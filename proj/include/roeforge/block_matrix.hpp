#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roeforge/coarse_maps.hpp"
#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"

namespace roeforge {

using Complex = std::complex<double>;
using Block = Eigen::MatrixXcd;
using DenseMatrix = Eigen::MatrixXcd;

/// Blocks whose largest entry is below this are dropped as numerical zeros.
inline constexpr double kPruneThreshold = 1e-14;

inline bool negligible(const Block& b) {
  return b.size() == 0 || b.cwiseAbs().maxCoeff() < kPruneThreshold;
}

/// Index set of a block matrix: an outer metric space carrying the propagation
/// metric, times zero or more internal label sets (their sizes only). Position
/// i enumerates lexicographically, outer factor first.
class IndexSpace {
 public:
  IndexSpace() = default;
  explicit IndexSpace(SpacePtr outer, std::vector<std::size_t> inner = {})
      : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (!outer_) throw StructuralError("index space needs an outer metric space");
    inner_count_ = std::accumulate(inner_.begin(), inner_.end(), std::size_t{1},
                                   std::multiplies<>());
  }

  const SpacePtr& outer() const { return outer_; }
  const std::vector<std::size_t>& inner_dims() const { return inner_; }
  std::size_t inner_count() const { return inner_count_; }
  std::size_t size() const { return outer_->size() * inner_count_; }

  std::size_t outer_of(std::size_t i) const { return i / inner_count_; }
  std::size_t inner_of(std::size_t i) const { return i % inner_count_; }
  std::size_t position(std::size_t outer, std::size_t inner) const {
    return outer * inner_count_ + inner;
  }

  // Propagation distance: the outer factor's metric only.
  double pdist(std::size_t i, std::size_t j) const {
    return outer_->distance(outer_of(i), outer_of(j));
  }

  std::string describe() const {
    std::string s = std::to_string(outer_->size());
    for (std::size_t d : inner_) s += "x" + std::to_string(d);
    return s;
  }

  friend bool operator==(const IndexSpace& a, const IndexSpace& b) {
    return same_space(a.outer_, b.outer_) && a.inner_ == b.inner_;
  }

 private:
  SpacePtr outer_;
  std::vector<std::size_t> inner_;
  std::size_t inner_count_ = 1;
};

using BlockKey = std::pair<std::size_t, std::size_t>;

/// Sparse index-by-index matrix with d x d complex blocks; absent blocks are zero.
class BlockMatrix {
 public:
  BlockMatrix(IndexSpace index, std::size_t block_dim)
      : index_(std::move(index)), dim_(block_dim) {
    if (dim_ == 0) throw StructuralError("block dimension must be at least 1");
  }

  static BlockMatrix identity(const IndexSpace& index, std::size_t block_dim) {
    BlockMatrix m(index, block_dim);
    for (std::size_t i = 0; i < index.size(); ++i)
      m.blocks_.emplace(BlockKey{i, i}, Block::Identity(block_dim, block_dim));
    return m;
  }

  const IndexSpace& index() const { return index_; }
  std::size_t block_dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  const std::map<BlockKey, Block>& blocks() const { return blocks_; }
  bool is_zero() const { return blocks_.empty(); }

  // Stores b at (i, j); negligible blocks erase the entry.
  void set_block(std::size_t i, std::size_t j, Block b) {
    if (i >= size() || j >= size())
      throw LookupError("block position (" + std::to_string(i) + "," + std::to_string(j) +
                        ") outside a " + std::to_string(size()) + "-point index");
    if (b.rows() != static_cast<Eigen::Index>(dim_) || b.cols() != static_cast<Eigen::Index>(dim_))
      throw StructuralError("block has shape " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ", expected " + std::to_string(dim_) +
                            "x" + std::to_string(dim_));
    if (negligible(b))
      blocks_.erase({i, j});
    else
      blocks_[{i, j}] = std::move(b);
  }

  Block block(std::size_t i, std::size_t j) const {
    auto it = blocks_.find({i, j});
    return it == blocks_.end() ? Block::Zero(dim_, dim_) : it->second;
  }

  DenseMatrix to_dense() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(size()) * d,
                                        static_cast<Eigen::Index>(size()) * d);
    for (const auto& [key, b] : blocks_)
      out.block(static_cast<Eigen::Index>(key.first) * d, static_cast<Eigen::Index>(key.second) * d, d, d) = b;
    return out;
  }

  // Internal: insert without pruning or shape checks (callers guarantee both).
  void emplace_unchecked(BlockKey key, Block b) { blocks_.insert_or_assign(key, std::move(b)); }

 private:
  IndexSpace index_;
  std::size_t dim_;
  std::map<BlockKey, Block> blocks_;
};

inline void require_compatible(const BlockMatrix& a, const BlockMatrix& b) {
  if (!(a.index() == b.index()))
    throw StructuralError("block matrices live on different index spaces (" +
                          a.index().describe() + " vs " + b.index().describe() + ")");
  if (a.block_dim() != b.block_dim())
    throw StructuralError("block dimensions differ (" + std::to_string(a.block_dim()) + " vs " +
                          std::to_string(b.block_dim()) + ")");
}

/// max{ pdist(i, j) : block (i, j) nonzero }, 0 for the zero matrix.
inline double propagation(const BlockMatrix& m) {
  double p = 0.0;
  for (const auto& [key, b] : m.blocks()) p = std::max(p, m.index().pdist(key.first, key.second));
  return p;
}

inline BlockMatrix add(const BlockMatrix& a, const BlockMatrix& b) {
  require_compatible(a, b);
  BlockMatrix out = a;
  for (const auto& [key, blk] : b.blocks()) out.set_block(key.first, key.second, a.block(key.first, key.second) + blk);
  return out;
}

inline BlockMatrix scale(const BlockMatrix& m, Complex s) {
  BlockMatrix out(m.index(), m.block_dim());
  for (const auto& [key, b] : m.blocks()) out.set_block(key.first, key.second, s * b);
  return out;
}

inline BlockMatrix subtract(const BlockMatrix& a, const BlockMatrix& b) { return add(a, scale(b, -1.0)); }

/// (i, j) -> conjugate transpose of block (j, i).
inline BlockMatrix adjoint(const BlockMatrix& m) {
  BlockMatrix out(m.index(), m.block_dim());
  for (const auto& [key, b] : m.blocks()) out.emplace_unchecked({key.second, key.first}, b.adjoint());
  return out;
}

/// (a b)(i, k) = sum_j a(i, j) b(j, k).
inline BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b) {
  require_compatible(a, b);
  std::vector<std::vector<std::pair<std::size_t, const Block*>>> rows(b.size());
  for (const auto& [key, blk] : b.blocks()) rows[key.first].emplace_back(key.second, &blk);
  std::map<BlockKey, Block> acc;
  for (const auto& [key, ablk] : a.blocks()) {
    for (const auto& [k, bblk] : rows[key.second]) {
      auto [it, fresh] = acc.try_emplace({key.first, k});
      if (fresh)
        it->second = ablk * *bblk;
      else
        it->second.noalias() += ablk * *bblk;
    }
  }
  BlockMatrix out(a.index(), a.block_dim());
  for (auto& [key, blk] : acc)
    if (!negligible(blk)) out.emplace_unchecked(key, std::move(blk));
  return out;
}

inline BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) { return multiply(a, b); }
inline BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) { return add(a, b); }
inline BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) { return subtract(a, b); }

/// u m u*.
inline BlockMatrix conjugate(const BlockMatrix& u, const BlockMatrix& m) {
  return multiply(multiply(u, m), adjoint(u));
}

/// Largest entrywise modulus of a - b over the union of stored blocks.
inline double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b) {
  require_compatible(a, b);
  double d = 0.0;
  for (const auto& [key, blk] : a.blocks())
    d = std::max(d, (blk - b.block(key.first, key.second)).cwiseAbs().maxCoeff());
  for (const auto& [key, blk] : b.blocks())
    if (!a.blocks().count(key)) d = std::max(d, blk.cwiseAbs().maxCoeff());
  return d;
}

/// Operator norm of a single block (largest singular value).
inline double block_norm(const Block& b) {
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Block> svd(b);
  return svd.singularValues()(0);
}

inline double max_block_norm(const BlockMatrix& m) {
  double n = 0.0;
  for (const auto& [key, b] : m.blocks()) n = std::max(n, block_norm(b));
  return n;
}

/// Singular values (descending) of the flattened matrix restricted to the
/// block rows and columns that carry a nonzero block; dropped rows/columns
/// only contribute zero singular values.
inline Eigen::VectorXd singular_values(const BlockMatrix& m) {
  std::vector<std::size_t> rows, cols;
  for (const auto& [key, b] : m.blocks()) {
    rows.push_back(key.first);
    cols.push_back(key.second);
  }
  auto uniq = [](std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(rows);
  uniq(cols);
  if (rows.empty()) return Eigen::VectorXd();
  std::map<std::size_t, Eigen::Index> rpos, cpos;
  for (std::size_t i = 0; i < rows.size(); ++i) rpos[rows[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) cpos[cols[i]] = static_cast<Eigen::Index>(i);
  const auto d = static_cast<Eigen::Index>(m.block_dim());
  DenseMatrix dense = DenseMatrix::Zero(static_cast<Eigen::Index>(rows.size()) * d,
                                        static_cast<Eigen::Index>(cols.size()) * d);
  for (const auto& [key, b] : m.blocks())
    dense.block(rpos[key.first] * d, cpos[key.second] * d, d, d) = b;
  Eigen::BDCSVD<DenseMatrix> svd(dense);
  return svd.singularValues();
}

inline double operator_norm(const BlockMatrix& m) {
  const Eigen::VectorXd s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Singular values of the full flattened matrix, zeros included, descending.
inline std::vector<double> full_singular_values(const BlockMatrix& m) {
  std::vector<double> out(m.size() * m.block_dim(), 0.0);
  const Eigen::VectorXd s = singular_values(m);
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i);
  return out;
}

inline Complex trace(const BlockMatrix& m) {
  Complex t = 0.0;
  for (const auto& [key, b] : m.blocks())
    if (key.first == key.second) t += b.trace();
  return t;
}

/// Constant N in ||m|| <= N sup ||b_xy|| for prop(m) <= R: the largest R-ball.
/// Row and column block-norm sums are each bounded by N sup ||b||, so the
/// Schur test gives the bound.
inline std::size_t schur_constant(const FiniteMetricSpace& space, double radius) {
  if (radius < 0.0) throw StructuralError("propagation radius must be non-negative");
  return max_ball_size(space, radius);
}

/// f_+ m: block ((f(x1), x1, u), (f(x2), x2, v)) = m((x1, u), (x2, v)), i.e. m placed
/// along the graph x -> (f(x), x). The result's outer factor is f's target; the
/// old outer factor becomes the first internal factor.
inline BlockMatrix pushforward(const PointMap& f, const BlockMatrix& m) {
  if (!same_space(f.source(), m.index().outer()))
    throw StructuralError("pushforward: matrix is not indexed by the source of the map");
  std::vector<std::size_t> inner{f.source()->size()};
  const auto& old_inner = m.index().inner_dims();
  inner.insert(inner.end(), old_inner.begin(), old_inner.end());
  IndexSpace out_index(f.target(), std::move(inner));
  const IndexSpace& in = m.index();
  auto place = [&](std::size_t i) {
    const std::size_t x = in.outer_of(i);
    return out_index.position(f(x), x * in.inner_count() + in.inner_of(i));
  };
  BlockMatrix out(out_index, m.block_dim());
  for (const auto& [key, b] : m.blocks()) out.emplace_unchecked({place(key.first), place(key.second)}, b);
  return out;
}

/// b ⊗ ε_{x0,x0}: the single block b at (x0, x0).
inline BlockMatrix corner_embed(std::size_t x0, const Block& b, const IndexSpace& index) {
  if (x0 >= index.size()) throw LookupError("corner point " + std::to_string(x0) + " outside the index");
  if (b.rows() != b.cols()) throw StructuralError("corner block must be square");
  BlockMatrix out(index, static_cast<std::size_t>(b.rows()));
  out.set_block(x0, x0, b);
  return out;
}

inline BlockMatrix corner_embed(const Label& x0, const Block& b, const SpacePtr& space) {
  return corner_embed(space->index_of(x0), b, IndexSpace(space));
}

/// Inserts a new first internal factor of the given size and places every
/// block at `coordinate` in it: the corner embedding applied inside the
/// coefficients, (z, rest) -> (z, coordinate, rest).
inline BlockMatrix insert_corner_factor(const BlockMatrix& m, std::size_t factor_size,
                                        std::size_t coordinate) {
  if (coordinate >= factor_size) throw LookupError("corner coordinate outside the inserted factor");
  std::vector<std::size_t> inner{factor_size};
  const auto& old_inner = m.index().inner_dims();
  inner.insert(inner.end(), old_inner.begin(), old_inner.end());
  IndexSpace out_index(m.index().outer(), std::move(inner));
  const IndexSpace& in = m.index();
  auto place = [&](std::size_t i) {
    return out_index.position(in.outer_of(i), coordinate * in.inner_count() + in.inner_of(i));
  };
  BlockMatrix out(out_index, m.block_dim());
  for (const auto& [key, b] : m.blocks()) out.emplace_unchecked({place(key.first), place(key.second)}, b);
  return out;
}

/// Conjugation by the permutation i -> bijection[i] onto `target` (same size).
inline BlockMatrix reindex(const BlockMatrix& m, const std::vector<std::size_t>& bijection,
                           const IndexSpace& target) {
  if (bijection.size() != m.size() || target.size() != m.size())
    throw StructuralError("reindex: bijection size does not match the index sets");
  std::vector<bool> seen(m.size(), false);
  for (std::size_t v : bijection) {
    if (v >= m.size() || seen[v]) throw StructuralError("reindex: map is not a bijection");
    seen[v] = true;
  }
  BlockMatrix out(target, m.block_dim());
  for (const auto& [key, b] : m.blocks())
    out.emplace_unchecked({bijection[key.first], bijection[key.second]}, b);
  return out;
}

inline BlockMatrix reindex(const BlockMatrix& m, const std::vector<std::size_t>& bijection) {
  return reindex(m, bijection, m.index());
}

/// The (y1, y2) outer block: all stored blocks whose row lies over y1 and column over y2,
/// keyed by their internal coordinates.
inline std::map<BlockKey, Block> outer_block(const BlockMatrix& m, std::size_t y1, std::size_t y2) {
  std::map<BlockKey, Block> out;
  const IndexSpace& ix = m.index();
  const std::size_t c = ix.inner_count();
  auto lo = m.blocks().lower_bound({y1 * c, 0});
  auto hi = m.blocks().lower_bound({(y1 + 1) * c, 0});
  for (auto it = lo; it != hi; ++it)
    if (ix.outer_of(it->first.second) == y2)
      out.emplace(BlockKey{ix.inner_of(it->first.first), ix.inner_of(it->first.second)}, it->second);
  return out;
}

inline double max_abs_diff(const std::map<BlockKey, Block>& a, const std::map<BlockKey, Block>& b) {
  double d = 0.0;
  for (const auto& [key, blk] : a) {
    auto it = b.find(key);
    d = std::max(d, it == b.end() ? blk.cwiseAbs().maxCoeff() : (blk - it->second).cwiseAbs().maxCoeff());
  }
  for (const auto& [key, blk] : b)
    if (!a.count(key)) d = std::max(d, blk.cwiseAbs().maxCoeff());
  return d;
}

}  // namespace roeforge
