#pragma once

#include "gegennet/features.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/metrics.hpp"
#include "gegennet/model.hpp"
#include "gegennet/train.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace gegennet {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t graph_hash(const SignedBipartiteGraph& g);
std::uint64_t split_hash(const EdgeSplit& split);
std::string hex64(std::uint64_t v);

/// {"seed", "ratios", "train", "validation", "test"}.
std::string split_to_json(const EdgeSplit& split);
/// Parses a manifest; when `edge_count` is given the three sets must partition 0..edge_count-1.
EdgeSplit split_from_json(std::string_view text, std::optional<std::size_t> edge_count = std::nullopt);
void save_split(const std::string& path, const EdgeSplit& split);
EdgeSplit load_split(const std::string& path, std::optional<std::size_t> edge_count = std::nullopt);

/// Feature cache: eight little-endian uint64 header words (magic "GEGNFEAT",
/// version, rows, cols = 2d, d, bit pattern of mu, dataset hash, split hash)
/// followed by [Phi | Psi] as little-endian float64, row-major.
inline constexpr std::uint64_t kFeatureCacheVersion = 1;

struct FeatureCacheKey {
  std::uint64_t dataset_hash = 0;
  std::uint64_t split_hash = 0;
};

void save_feature_cache(const std::string& path, const SpectralFeatures& f, const FeatureCacheKey& key);
/// Throws DataError on a malformed file or, when `expected` is given, a key mismatch.
SpectralFeatures load_feature_cache(const std::string& path, FeatureCacheKey* key_out = nullptr,
                                    const std::optional<FeatureCacheKey>& expected = std::nullopt);

/// Checkpoint: magic "GEGNCKPT", version, dataset hash, canonical config text,
/// then every tensor as (name, rows, cols, float64 data).
inline constexpr std::uint64_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::uint64_t dataset_hash = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

struct MetricsRecord {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string config_hash;
  Metrics metrics;
  int epochs_run = 0;
  int best_epoch = 0;
  std::optional<double> wall_seconds;  ///< written as null when absent
};

std::string metrics_to_json(const MetricsRecord& rec);
std::string history_line(const EpochRecord& rec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gegennet
