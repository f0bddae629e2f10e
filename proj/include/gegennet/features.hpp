#pragma once

#include "gegennet/eigensolvers.hpp"
#include "gegennet/graph.hpp"

#include <cstdint>
#include <vector>

namespace gegennet {

/// Initial node features: X = mu * Phi + (1 - mu) * Psi, one row per node
/// (U rows first, then V rows).
struct SpectralFeatures {
  DenseMatrix phi;
  DenseMatrix psi;
  DenseMatrix x;
  double mu = 0.3;
  std::size_t d = 0;
};

/// Bottom-d eigenvectors of a Laplacian.
DenseMatrix inter_partition_features(const SparseMatrix& l, std::size_t d, const SolverOptions& opts = {});

/// Top-d left singular vectors of the cosine block matrix.
DenseMatrix intra_partition_features(const SparseMatrix& b, std::size_t d, const SolverOptions& opts = {});

SpectralFeatures combine_features(DenseMatrix phi, DenseMatrix psi, double mu);

struct FeatureOptions {
  std::size_t d = 32;
  double mu = 0.3;
  /// Build L from the signed adjacency (positive minus negative) instead of
  /// treating every edge as +1.
  bool signed_laplacian = false;
  SolverOptions solver;
};

/// Features from the edges in `subset` (normally the training split).
SpectralFeatures compute_spectral_features(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset,
                                           const FeatureOptions& opts);

/// Gaussian features with entries of variance 1/n, for ablations.
DenseMatrix random_features(std::size_t nodes, std::size_t d, std::uint64_t seed);

}  // namespace gegennet
