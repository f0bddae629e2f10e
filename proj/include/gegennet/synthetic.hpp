#pragma once

#include "gegennet/graph.hpp"

#include <cstdint>

namespace gegennet {

/// Signed bipartite graph with planted structure: every node gets a Gaussian
/// latent vector, edges are distinct uniformly drawn (u, v) pairs, and the sign
/// follows the latent inner product plus noise, thresholded so that roughly
/// `positive_ratio` of the edges are positive.
struct SyntheticOptions {
  std::size_t u_count = 60;
  std::size_t v_count = 80;
  std::size_t edges = 600;
  std::size_t latent_dim = 4;
  double noise = 0.3;
  double positive_ratio = 0.6;
  std::uint64_t seed = 1;
};

SignedBipartiteGraph planted_signed_graph(const SyntheticOptions& opts);

/// Erdos-Renyi style signed bipartite graph: each pair is an edge with
/// probability `density`, sign +1 with probability `positive_ratio`.
SignedBipartiteGraph random_signed_graph(std::size_t u_count, std::size_t v_count, double density,
                                         double positive_ratio, std::uint64_t seed);

}  // namespace gegennet
