#include "gegennet/train.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace gegennet {

std::uint64_t init_seed(const ModelConfig& cfg) { return mix_seed(cfg.seed, 1); }
std::uint64_t dropout_seed(const ModelConfig& cfg, int epoch) {
  return mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch));
}
std::uint64_t feature_seed(const ModelConfig& cfg) { return mix_seed(cfg.seed, 2); }
std::uint64_t solver_seed(const ModelConfig& cfg) { return mix_seed(cfg.seed, 3); }

std::vector<int> edge_signs(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) out.push_back(g.edges.at(i).sign);
  return out;
}

namespace {

bool has_both_classes(const std::vector<int>& signs) {
  bool pos = false;
  bool neg = false;
  for (int s : signs) (s > 0 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

TrainResult train(const SignedBipartiteGraph& g, const EdgeSplit& split, const DenseMatrix& x,
                  const ModelConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (static_cast<std::size_t>(x.rows()) != g.node_count())
    throw ConfigError("feature rows (" + std::to_string(x.rows()) + ") do not match the node count (" +
                      std::to_string(g.node_count()) + ")");
  if (split.train.empty()) throw ConfigError("the training split is empty");

  const GraphOperators ops = build_operators(g, split.train);
  const std::vector<EdgePair> train_pairs = edge_pairs(g, split.train);
  const std::vector<double> train_labels = edge_labels(g, split.train);
  const std::vector<EdgePair> val_pairs = edge_pairs(g, split.validation);
  const std::vector<int> val_signs = edge_signs(g, split.validation);
  const bool val_auc_defined = has_both_classes(val_signs);

  TrainResult result;
  ModelParams params = init_params(cfg, static_cast<std::size_t>(x.cols()), init_seed(cfg));
  Adam adam(params, cfg.learning_rate, cfg.weight_decay);
  result.params = params;
  double best_score = -std::numeric_limits<double>::infinity();
  int since_best = 0;
  double last_finite_loss = std::numeric_limits<double>::quiet_NaN();

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    ForwardCache cache;
    PredictorCache pcache;
    const DenseMatrix z = forward(params, x, ops, cfg, {true, dropout_seed(cfg, epoch)}, &cache);
    const Vector scores = predict_scores(params, z, g.u_count, train_pairs, &pcache);
    const double loss = bce_loss(scores, train_labels);
    if (!std::isfinite(loss))
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) + " (last finite loss " +
                           std::to_string(last_finite_loss) + ")");
    last_finite_loss = loss;
    const ModelParams grads =
        backward(params, cache, pcache, bce_logit_gradient(scores, train_labels), ops, cfg, 0.0);
    adam.step(params, grads);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss;
    rec.val_auc = std::numeric_limits<double>::quiet_NaN();
    rec.val_macro_f1 = std::numeric_limits<double>::quiet_NaN();
    if (!val_pairs.empty()) {
      const DenseMatrix z_eval = forward(params, x, ops, cfg);
      const Vector val_scores = predict_scores(params, z_eval, g.u_count, val_pairs);
      const std::vector<double> vs(val_scores.data(), val_scores.data() + val_scores.size());
      rec.val_macro_f1 = classification_metrics(vs, val_signs).macro_f1;
      if (val_auc_defined) rec.val_auc = roc_auc(vs, val_signs);
    }
    result.history.push_back(rec);
    result.epochs_run = epoch;
    if (on_epoch) on_epoch(rec);

    const double score = val_auc_defined ? rec.val_auc : -loss;
    if (score > best_score) {
      best_score = score;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

DenseMatrix build_features(const SignedBipartiteGraph& g, const EdgeSplit& split, const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.features == FeatureSource::random)
    return random_features(g.node_count(), static_cast<std::size_t>(cfg.d), feature_seed(cfg));
  FeatureOptions fo;
  fo.d = static_cast<std::size_t>(cfg.d);
  fo.mu = cfg.mu;
  fo.signed_laplacian = cfg.signed_laplacian;
  fo.solver.tol = cfg.solver_tol;
  fo.solver.seed = solver_seed(cfg);
  return compute_spectral_features(g, split.train, fo).x;
}

Vector score_edges(const ModelParams& params, const SignedBipartiteGraph& g, const EdgeSplit& split,
                   const std::vector<std::size_t>& subset, const DenseMatrix& x, const ModelConfig& cfg) {
  const GraphOperators ops = build_operators(g, split.train);
  const DenseMatrix z = forward(params, x, ops, cfg);
  return predict_scores(params, z, g.u_count, edge_pairs(g, subset));
}

Metrics evaluate_edges(const ModelParams& params, const SignedBipartiteGraph& g, const EdgeSplit& split,
                       const std::vector<std::size_t>& subset, const DenseMatrix& x, const ModelConfig& cfg) {
  return evaluate(score_edges(params, g, split, subset, x, cfg), edge_signs(g, subset));
}

ExperimentResult run_experiment(const SignedBipartiteGraph& g, const EdgeSplit& split, const ModelConfig& cfg,
                                const EpochCallback& on_epoch) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  const DenseMatrix x = build_features(g, split, cfg);
  out.training = train(g, split, x, cfg, on_epoch);
  out.test = evaluate_edges(out.training.params, g, split, split.test, x, cfg);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace gegennet
