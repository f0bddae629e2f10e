#include "gegennet/eigensolvers.hpp"
#include "gegennet/error.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/sparse.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace gegennet {
namespace {

using testing::random_dense;
using testing::random_symmetric;

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (rng.uniform() < density) t.push_back({r, c, rng.normal()});
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

TEST(SparseMatrix, FromTripletsSumsDuplicatesAndDropsZeros) {
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 1.0}, {1, 0, -1.0}});
  EXPECT_EQ(m.nnz(), 1u);
  EXPECT_EQ(m.coeff(0, 1), 5.0);
  EXPECT_EQ(m.coeff(1, 0), 0.0);
}

TEST(SparseMatrix, ColumnIndicesIncreasing) {
  Rng rng(3);
  const SparseMatrix m = random_sparse(30, 40, 0.2, rng);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto cols = m.row_cols(r);
    for (std::size_t k = 1; k < cols.size(); ++k) EXPECT_LT(cols[k - 1], cols[k]);
  }
  EXPECT_EQ(m.row_ptr().back(), m.nnz());
}

TEST(SparseMatrix, TransposeAndDenseRoundTrip) {
  Rng rng(4);
  const SparseMatrix m = random_sparse(7, 9, 0.3, rng);
  EXPECT_EQ(m.transpose().to_dense(), DenseMatrix(m.to_dense().transpose()));
  EXPECT_EQ(SparseMatrix::from_dense(m.to_dense()), m);
}

TEST(Spmm, Identity) {
  Rng rng(1);
  const DenseMatrix x = random_dense(6, 3, rng);
  EXPECT_EQ(spmm(SparseMatrix::identity(6), x), x);
}

TEST(Spmm, RowSumsOfNormalizedToy) {
  const SparseMatrix a = normalize_adjacency(symmetrize(build_sign_matrices(testing::toy_graph()).a_pos));
  const DenseMatrix ones = DenseMatrix::Ones(5, 1);
  const DenseMatrix y = spmm(a, ones);
  const Vector sums = a.row_sums();
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(y(i, 0), sums[i]);
}

TEST(Spmm, ZeroMatrix) {
  Rng rng(2);
  const DenseMatrix y = spmm(SparseMatrix(4, 5), random_dense(5, 2, rng));
  EXPECT_EQ(y, DenseMatrix::Zero(4, 2));
}

TEST(Spmm, ShapeMismatch) { EXPECT_THROW(spmm(SparseMatrix(3, 4), DenseMatrix(DenseMatrix::Zero(3, 1))), ConfigError); }

TEST(Spmm, MatchesDenseProduct) {
  Rng rng(8);
  const SparseMatrix m = random_sparse(20, 15, 0.25, rng);
  const DenseMatrix x = random_dense(15, 4, rng);
  EXPECT_LT((spmm(m, x) - m.to_dense() * x).norm(), 1e-12);
}

TEST(Spmm, DistributesOverAdditionProperty) {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const SparseMatrix m = random_sparse(25, 25, 0.2, rng);
    const DenseMatrix x = random_dense(25, 3, rng);
    const DenseMatrix y = random_dense(25, 3, rng);
    EXPECT_LT((spmm(m, DenseMatrix(x + y)) - spmm(m, x) - spmm(m, y)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DenseEig, Examples) {
  DenseMatrix a(2, 2);
  a << 0, 1, 1, 0;
  EigenPairs e = dense_eig(a);
  EXPECT_NEAR(e.values[0], -1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 1.0, 1e-15);
  DenseMatrix b(2, 2);
  b << 2, 0, 0, 3;
  e = dense_eig(b);
  EXPECT_EQ(e.values[0], 2.0);
  EXPECT_EQ(e.values[1], 3.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-15);
}

TEST(DenseEig, Reconstruction) {
  Rng rng(10);
  const DenseMatrix m = random_symmetric(50, rng);
  const EigenPairs e = dense_eig(m);
  const DenseMatrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LT((rec - m).norm(), 1e-8);
}

TEST(DenseEig, Ceiling) { EXPECT_THROW(dense_eig(DenseMatrix::Zero(5, 5), 4), ConfigError); }

void expect_eigen_invariants(const EigenPairs& e, const DenseMatrix& m, double tol) {
  const Eigen::Index d = e.values.size();
  const DenseMatrix gram = e.vectors.transpose() * e.vectors;
  EXPECT_LT((gram - DenseMatrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-6);
  for (Eigen::Index i = 0; i < d; ++i) {
    EXPECT_NEAR(e.vectors.col(i).norm(), 1.0, 1e-8);
    EXPECT_LE((m * e.vectors.col(i) - e.values[i] * e.vectors.col(i)).norm(), tol);
  }
}

TEST(SmallestEigenpairs, PathLaplacian) {
  const SparseMatrix l = laplacian(symmetrize(build_sign_matrices(testing::single_edge_graph()).a_all));
  const EigenPairs e = smallest_eigenpairs(l, 1);
  EXPECT_NEAR(e.values[0], 0.0, 1e-10);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0 / std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(e.vectors(0, 0), e.vectors(1, 0), 1e-8);
}

TEST(SmallestEigenpairs, FullSpectrumMatchesDense) {
  Rng rng(11);
  const DenseMatrix m = random_symmetric(10, rng);
  const EigenPairs e = smallest_eigenpairs(SparseMatrix::from_dense(m), 10);
  const EigenPairs oracle = dense_eig(m);
  EXPECT_LT((e.values - oracle.values).cwiseAbs().maxCoeff(), 1e-6);
  expect_eigen_invariants(e, m, 1e-7);
}

TEST(SmallestEigenpairs, ZeroMatrix) {
  const EigenPairs e = smallest_eigenpairs(SparseMatrix(6, 6), 3);
  EXPECT_EQ(e.values.size(), 3);
  EXPECT_LT(e.values.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((e.vectors.transpose() * e.vectors - DenseMatrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(SmallestEigenpairs, DTooLarge) { EXPECT_THROW(smallest_eigenpairs(SparseMatrix(3, 3), 4), ConfigError); }

TEST(SmallestEigenpairs, RandomMatchesDenseProperty) {
  Rng rng(12);
  for (int t = 0; t < 8; ++t) {
    const auto n = static_cast<Eigen::Index>(20 + rng.below(181));
    DenseMatrix m = random_symmetric(n, rng);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (rng.uniform() < 0.7) m.data()[i] = 0.0;
    m = (0.5 * (m + m.transpose())).eval();
    const std::size_t d = 1 + rng.below(8);
    const EigenPairs e = smallest_eigenpairs(SparseMatrix::from_dense(m), d);
    const EigenPairs oracle = dense_eig(m);
    EXPECT_LT((e.values - oracle.values.head(static_cast<Eigen::Index>(d))).cwiseAbs().maxCoeff(), 1e-6);
    expect_eigen_invariants(e, m, 1e-7);
  }
}

TEST(SmallestEigenpairs, SignConvention) {
  Rng rng(13);
  const DenseMatrix m = random_symmetric(30, rng);
  const EigenPairs e = smallest_eigenpairs(SparseMatrix::from_dense(m), 4);
  for (Eigen::Index c = 0; c < 4; ++c) {
    Eigen::Index arg = 0;
    e.vectors.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(e.vectors(arg, c), 0.0);
  }
}

TEST(TopLeftSingularVectors, Diagonal) {
  const SparseMatrix b = SparseMatrix::from_triplets(2, 2, {{0, 0, 3.0}, {1, 1, 1.0}});
  const SingularTriplets s = top_left_singular_vectors(b, 2);
  EXPECT_NEAR(s.values[0], 3.0, 1e-10);
  EXPECT_NEAR(s.values[1], 1.0, 1e-10);
  EXPECT_NEAR(std::abs(s.left(0, 0)), 1.0, 1e-8);
  EXPECT_NEAR(std::abs(s.left(1, 1)), 1.0, 1e-8);
}

TEST(TopLeftSingularVectors, Orthonormal) {
  Rng rng(14);
  const SparseMatrix b = random_sparse(20, 15, 0.3, rng);
  const SingularTriplets s = top_left_singular_vectors(b, 5);
  EXPECT_LT((s.left.transpose() * s.left - DenseMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-6);
  for (Eigen::Index i = 1; i < 5; ++i) EXPECT_GE(s.values[i - 1], s.values[i]);
}

TEST(TopLeftSingularVectors, RankTwoReconstruction) {
  Rng rng(15);
  const DenseMatrix dense = random_dense(12, 2, rng) * random_dense(2, 9, rng);
  const SparseMatrix b = SparseMatrix::from_dense(dense);
  const SingularTriplets s = top_left_singular_vectors(b, 2);
  DenseMatrix rec = DenseMatrix::Zero(12, 9);
  for (Eigen::Index i = 0; i < 2; ++i) rec += s.values[i] * s.left.col(i) * s.right.col(i).transpose();
  EXPECT_LE((dense - rec).norm(), 1e-6);
}

TEST(TopLeftSingularVectors, MatchesGramEigenvectorsProperty) {
  Rng rng(16);
  for (int t = 0; t < 6; ++t) {
    const auto p = static_cast<std::size_t>(10 + rng.below(40));
    const auto q = static_cast<std::size_t>(10 + rng.below(50));
    const SparseMatrix b = random_sparse(p, q, 0.2, rng);
    const std::size_t d = 4;
    const SingularTriplets s = top_left_singular_vectors(b, d);
    const DenseMatrix bd = b.to_dense();
    const EigenPairs oracle = dense_eig(bd * bd.transpose());
    const auto n = oracle.values.size();
    const double gap = oracle.values[n - 4] - oracle.values[n - 5];
    if (gap < 1e-6) continue;
    EXPECT_LE(projector_distance(s.left, oracle.vectors.rightCols(4)), 1e-5);
  }
}

TEST(TopLeftSingularVectors, DTooLarge) {
  EXPECT_THROW(top_left_singular_vectors(SparseMatrix(3, 2), 3), ConfigError);
}

TEST(ProjectorDistance, SignAndRotationInvariant) {
  Rng rng(17);
  const DenseMatrix q = dense_eig(random_symmetric(8, rng)).vectors.leftCols(3);
  DenseMatrix flipped = q;
  flipped.col(1) *= -1.0;
  EXPECT_LT(projector_distance(q, flipped), 1e-12);
  EXPECT_GT(projector_distance(q, dense_eig(random_symmetric(8, rng)).vectors.leftCols(3)), 1e-3);
}

}  // namespace
}  // namespace gegennet
