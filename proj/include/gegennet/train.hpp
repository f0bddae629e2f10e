#pragma once

#include "gegennet/features.hpp"
#include "gegennet/metrics.hpp"
#include "gegennet/model.hpp"

#include <functional>
#include <optional>

namespace gegennet {

struct EpochRecord {
  int epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  /// NaN when the validation split lacks one of the classes.
  double val_auc = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainResult {
  ModelParams params;  ///< parameters of the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  int epochs_run = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeds derived from ModelConfig::seed for each random stream.
std::uint64_t init_seed(const ModelConfig& cfg);
std::uint64_t dropout_seed(const ModelConfig& cfg, int epoch);
std::uint64_t feature_seed(const ModelConfig& cfg);
std::uint64_t solver_seed(const ModelConfig& cfg);

/**
 * Full-batch training on split.train with Adam. Validation AUC is computed
 * after every epoch and the best epoch's parameters are kept; training stops
 * after cfg.patience epochs without improvement. When the validation split
 * cannot yield an AUC the lowest training loss selects instead.
 * Throws NumericalError on a non-finite loss.
 */
TrainResult train(const SignedBipartiteGraph& g, const EdgeSplit& split, const DenseMatrix& x,
                  const ModelConfig& cfg, const EpochCallback& on_epoch = {});

/// Node features for a split per cfg.features (spectral from the training edges, or random).
DenseMatrix build_features(const SignedBipartiteGraph& g, const EdgeSplit& split, const ModelConfig& cfg);

/// Scores of `subset` edges under operators built from the training edges.
Vector score_edges(const ModelParams& params, const SignedBipartiteGraph& g, const EdgeSplit& split,
                   const std::vector<std::size_t>& subset, const DenseMatrix& x, const ModelConfig& cfg);

Metrics evaluate_edges(const ModelParams& params, const SignedBipartiteGraph& g, const EdgeSplit& split,
                       const std::vector<std::size_t>& subset, const DenseMatrix& x, const ModelConfig& cfg);

std::vector<int> edge_signs(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset);

struct ExperimentResult {
  TrainResult training;
  Metrics test;
  double wall_seconds = 0.0;
};

/// Features, training and test evaluation in one call.
ExperimentResult run_experiment(const SignedBipartiteGraph& g, const EdgeSplit& split, const ModelConfig& cfg,
                                const EpochCallback& on_epoch = {});

}  // namespace gegennet
