#include "gegennet/features.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <cmath>

namespace gegennet {

DenseMatrix inter_partition_features(const SparseMatrix& l, std::size_t d, const SolverOptions& opts) {
  if (d > l.rows()) throw ConfigError("d = " + std::to_string(d) + " exceeds the node count " + std::to_string(l.rows()));
  return smallest_eigenpairs(l, d, opts).vectors;
}

DenseMatrix intra_partition_features(const SparseMatrix& b, std::size_t d, const SolverOptions& opts) {
  return top_left_singular_vectors(b, d, opts).left;
}

SpectralFeatures combine_features(DenseMatrix phi, DenseMatrix psi, double mu) {
  if (phi.rows() != psi.rows() || phi.cols() != psi.cols())
    throw ConfigError("combine_features: phi and psi shapes differ");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  SpectralFeatures f;
  f.x = mu * phi + (1.0 - mu) * psi;
  f.d = static_cast<std::size_t>(phi.cols());
  f.mu = mu;
  f.phi = std::move(phi);
  f.psi = std::move(psi);
  return f;
}

SpectralFeatures compute_spectral_features(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset,
                                           const FeatureOptions& opts) {
  const SignMatrices s = build_sign_matrices(g, subset);
  SparseMatrix l;
  if (opts.signed_laplacian) l = signed_laplacian(symmetrize(add(s.a_pos, s.a_neg, -1.0)));
  else l = laplacian(symmetrize(s.a_all));
  DenseMatrix phi = inter_partition_features(l, opts.d, opts.solver);
  DenseMatrix psi = intra_partition_features(cosine_block_matrix(s.a_all), opts.d, opts.solver);
  return combine_features(std::move(phi), std::move(psi), opts.mu);
}

DenseMatrix random_features(std::size_t nodes, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix x(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(d));
  const double scale = nodes > 0 ? 1.0 / std::sqrt(static_cast<double>(nodes)) : 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = scale * rng.normal();
  return x;
}

}  // namespace gegennet
