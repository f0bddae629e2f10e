#include "gegennet/eigensolvers.hpp"
#include "gegennet/error.hpp"
#include "gegennet/features.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/synthetic.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/QR>

#include <set>

namespace gegennet {
namespace {

using testing::all_edges;
using testing::random_dense;

DenseMatrix random_orthonormal(Eigen::Index n, Eigen::Index d, Rng& rng) {
  const Eigen::MatrixXd g = random_dense(n, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return DenseMatrix(qr.householderQ() * Eigen::MatrixXd::Identity(n, d));
}

// Every node has at least one edge.
SignedBipartiteGraph covered(std::size_t p, std::size_t q, double density, std::uint64_t seed) {
  SignedBipartiteGraph g = random_signed_graph(p, q, density, 0.6, seed);
  std::vector<bool> seen_u(p), seen_v(q);
  std::set<std::pair<std::size_t, std::size_t>> have;
  for (const auto& e : g.edges) {
    seen_u[e.u] = seen_v[e.v] = true;
    have.insert({e.u, e.v});
  }
  for (std::size_t u = 0; u < p; ++u)
    if (!seen_u[u] && have.insert({u, u % q}).second) g.edges.push_back({u, u % q, 1});
  for (std::size_t v = 0; v < q; ++v)
    if (!seen_v[v] && have.insert({v % p, v}).second) g.edges.push_back({v % p, v, -1});
  return g;
}

TEST(InterPartition, SingleEdge) {
  const SparseMatrix l = laplacian(symmetrize(build_sign_matrices(testing::single_edge_graph()).a_all));
  const DenseMatrix phi = inter_partition_features(l, 1);
  EXPECT_NEAR(phi(0, 0), 1.0 / std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(phi(1, 0), 1.0 / std::sqrt(2.0), 1e-8);
}

TEST(InterPartition, ConnectedGraphNullVector) {
  SignedBipartiteGraph g;
  g.u_count = 3;
  g.v_count = 3;
  g.edges = {{0, 0, 1}, {0, 1, -1}, {1, 1, 1}, {1, 2, 1}, {2, 2, -1}};
  const SparseMatrix l = laplacian(symmetrize(build_sign_matrices(g).a_all));
  const DenseMatrix phi = inter_partition_features(l, 1);
  EXPECT_NEAR((phi.transpose() * l.to_dense() * phi).trace(), 0.0, 1e-8);
}

TEST(InterPartition, KyFanMinimizationProperty) {
  Rng rng(3);
  for (int t = 0; t < 4; ++t) {
    const SignedBipartiteGraph g = covered(20 + rng.below(25), 20 + rng.below(30), 0.1, rng.next_u64());
    const SparseMatrix l = laplacian(symmetrize(build_sign_matrices(g).a_all));
    const DenseMatrix phi = inter_partition_features(l, 8);
    const DenseMatrix ld = l.to_dense();
    const double best = (phi.transpose() * ld * phi).trace();
    for (int k = 0; k < 100; ++k) {
      const DenseMatrix q = random_orthonormal(ld.rows(), 8, rng);
      EXPECT_LE(best, (q.transpose() * ld * q).trace() + 1e-8);
    }
  }
}

TEST(IntraPartition, PermutationBlockCluster) {
  SignedBipartiteGraph g;
  g.u_count = 3;
  g.v_count = 3;
  g.edges = {{0, 1, 1}, {1, 2, 1}, {2, 0, -1}};
  const SparseMatrix b = cosine_block_matrix(build_sign_matrices(g).a_all);
  const DenseMatrix psi = intra_partition_features(b, 2);
  EXPECT_LT((psi.transpose() * psi - DenseMatrix::Identity(2, 2)).norm(), 1e-8);
  // Every singular value is 1, so Psi only needs to lie in the space.
  const DenseMatrix bd = b.to_dense();
  EXPECT_NEAR((psi.transpose() * bd * bd.transpose() * psi).trace(), 2.0, 1e-8);
}

TEST(IntraPartition, KyFanMaximizationAndDenseOracleProperty) {
  Rng rng(4);
  int compared = 0;
  for (int t = 0; t < 5; ++t) {
    const SignedBipartiteGraph g = covered(15 + rng.below(30), 15 + rng.below(40), 0.12, rng.next_u64());
    const SparseMatrix b = cosine_block_matrix(build_sign_matrices(g).a_all);
    const DenseMatrix psi = intra_partition_features(b, 4);
    const DenseMatrix bd = b.to_dense();
    const DenseMatrix gram = bd * bd.transpose();
    const double best = (psi.transpose() * gram * psi).trace();
    for (int k = 0; k < 100; ++k) {
      const DenseMatrix q = random_orthonormal(gram.rows(), 4, rng);
      EXPECT_GE(best + 1e-8, (q.transpose() * gram * q).trace());
    }
    const EigenPairs oracle = dense_eig(gram);
    const auto n = oracle.values.size();
    if (oracle.values[n - 4] - oracle.values[n - 5] < 1e-6) continue;
    ++compared;
    DenseMatrix top = oracle.vectors.rightCols(4);
    EXPECT_LE(projector_distance(psi, top), 1e-5);
  }
  EXPECT_GT(compared, 0);
}

TEST(CombineFeatures, Examples) {
  Rng rng(5);
  const DenseMatrix phi = random_dense(6, 3, rng);
  const DenseMatrix psi = random_dense(6, 3, rng);
  EXPECT_EQ(combine_features(phi, psi, 1.0).x, phi);
  EXPECT_EQ(combine_features(phi, psi, 0.0).x, psi);
  DenseMatrix a = DenseMatrix::Constant(1, 1, 0.5);
  DenseMatrix b = DenseMatrix::Constant(1, 1, -0.5);
  EXPECT_NEAR(combine_features(a, b, 0.3).x(0, 0), -0.2, 1e-15);
  EXPECT_THROW(combine_features(phi, DenseMatrix::Zero(6, 2), 0.3), ConfigError);
  EXPECT_THROW(combine_features(phi, psi, 1.5), ConfigError);
}

TEST(SpectralFeatures, InvariantsAndDeterminism) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  const auto subset = all_edges(g);
  FeatureOptions o;
  o.d = 8;
  const SpectralFeatures a = compute_spectral_features(g, subset, o);
  const SpectralFeatures b = compute_spectral_features(g, subset, o);
  EXPECT_EQ(a.x, b.x);
  const auto n = static_cast<Eigen::Index>(g.node_count());
  EXPECT_EQ(a.x.rows(), n);
  EXPECT_EQ(a.x.cols(), 8);
  EXPECT_LT((a.phi.transpose() * a.phi - DenseMatrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((a.psi.transpose() * a.psi - DenseMatrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((a.x - (0.3 * a.phi + 0.7 * a.psi)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralFeatures, SubspaceMatchesDenseOracle) {
  const SignedBipartiteGraph g = covered(25, 30, 0.15, 77);
  FeatureOptions o;
  o.d = 6;
  const SpectralFeatures f = compute_spectral_features(g, all_edges(g), o);
  const SignMatrices s = build_sign_matrices(g);
  const EigenPairs oracle = dense_eig(laplacian(symmetrize(s.a_all)).to_dense());
  ASSERT_GT(oracle.values[6] - oracle.values[5], 1e-6);
  EXPECT_LE(projector_distance(f.phi, oracle.vectors.leftCols(6)), 1e-5);
}

TEST(SpectralFeatures, DirichletEnergyIdentity) {
  // sum over edges of |X_u - X_v|^2 equals Tr(X^T L X) for L from the same edges.
  Rng rng(6);
  SignedBipartiteGraph g = covered(12, 14, 0.25, 8);
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (g.edges[i].sign > 0) positive.push_back(i);
  const SparseMatrix l = laplacian(symmetrize(build_sign_matrices(g, positive).a_all));
  const DenseMatrix x = random_dense(26, 4, rng);
  double direct = 0.0;
  for (std::size_t i : positive) {
    const auto& e = g.edges[i];
    direct += (x.row(static_cast<Eigen::Index>(e.u)) - x.row(static_cast<Eigen::Index>(12 + e.v))).squaredNorm();
  }
  EXPECT_NEAR(direct, (x.transpose() * l.to_dense() * x).trace(), 1e-8);
}

TEST(RandomFeatures, ShapeAndDeterminism) {
  const DenseMatrix a = random_features(50, 8, 3);
  EXPECT_EQ(a.rows(), 50);
  EXPECT_EQ(a.cols(), 8);
  EXPECT_EQ(a, random_features(50, 8, 3));
  EXPECT_NE(a, random_features(50, 8, 4));
}

}  // namespace
}  // namespace gegennet
