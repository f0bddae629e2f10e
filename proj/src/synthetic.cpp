#include "gegennet/synthetic.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace gegennet {

SignedBipartiteGraph planted_signed_graph(const SyntheticOptions& opts) {
  const std::size_t capacity = opts.u_count * opts.v_count;
  if (opts.edges > capacity) throw ConfigError("more edges requested than (u, v) pairs exist");
  if (!(opts.positive_ratio >= 0.0 && opts.positive_ratio <= 1.0)) throw ConfigError("positive_ratio must lie in [0, 1]");
  Rng rng(opts.seed);
  const auto latent = [&](std::size_t count) {
    std::vector<std::vector<double>> out(count, std::vector<double>(opts.latent_dim));
    for (auto& row : out)
      for (double& x : row) x = rng.normal();
    return out;
  };
  const auto p = latent(opts.u_count);
  const auto q = latent(opts.v_count);

  SignedBipartiteGraph g;
  g.u_count = opts.u_count;
  g.v_count = opts.v_count;
  std::unordered_set<std::uint64_t> used;
  std::vector<double> affinity;
  while (g.edges.size() < opts.edges) {
    const std::size_t u = rng.below(opts.u_count);
    const std::size_t v = rng.below(opts.v_count);
    if (!used.insert(static_cast<std::uint64_t>(u) * opts.v_count + v).second) continue;
    double a = 0.0;
    for (std::size_t k = 0; k < opts.latent_dim; ++k) a += p[u][k] * q[v][k];
    affinity.push_back(a + opts.noise * rng.normal());
    g.edges.push_back({u, v, 1});
  }

  std::vector<double> sorted = affinity;
  std::sort(sorted.begin(), sorted.end());
  const auto negatives = static_cast<std::size_t>(std::llround((1.0 - opts.positive_ratio) * static_cast<double>(sorted.size())));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const bool negative = negatives > 0 && affinity[i] <= sorted[negatives - 1];
    g.edges[i].sign = negative ? -1 : 1;
  }
  return g;
}

SignedBipartiteGraph random_signed_graph(std::size_t u_count, std::size_t v_count, double density,
                                         double positive_ratio, std::uint64_t seed) {
  Rng rng(seed);
  SignedBipartiteGraph g;
  g.u_count = u_count;
  g.v_count = v_count;
  for (std::size_t u = 0; u < u_count; ++u)
    for (std::size_t v = 0; v < v_count; ++v)
      if (rng.uniform() < density) g.edges.push_back({u, v, rng.uniform() < positive_ratio ? 1 : -1});
  return g;
}

}  // namespace gegennet
