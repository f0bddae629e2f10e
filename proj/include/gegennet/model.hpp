#pragma once

#include "gegennet/gegenbauer.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/sparse.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gegennet {

enum class FeatureSource { spectral, random };

std::string_view to_string(FeatureSource s);

struct ModelConfig {
  int layers = 3;
  int embed_dim = 32;
  double alpha = 1.5;
  double delta = 1.0;
  double mu = 0.3;
  int d = 32;
  double dropout = 0.5;
  double learning_rate = 0.01;
  double weight_decay = 1e-5;
  int max_epochs = 300;
  int patience = 50;
  std::uint64_t seed = 7;
  FirstOrderCoefficient first_order_coefficient = FirstOrderCoefficient::alpha_plus_half;
  FeatureSource features = FeatureSource::spectral;
  bool signed_laplacian = false;
  bool positive_branch = true;
  bool negative_branch = true;
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  double solver_tol = 1e-8;

  GegenbauerParams gegenbauer() const { return {alpha, first_order_coefficient}; }
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses "key = value" lines ('#' comments, optional quotes around strings).
/// Keys are the ModelConfig field names plus train_ratio, validation_ratio and
/// test_ratio; an unknown or repeated key is an error.
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::string& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const ModelConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ModelConfig& cfg);

struct LayerParams {
  DenseMatrix w_pos;
  DenseMatrix w_neg;
  DenseMatrix w_org;
  DenseMatrix w_cat;  ///< 3*embed x embed, rows ordered (pos, neg, org)
  DenseMatrix slope_pos;  ///< 1x1 PReLU slopes
  DenseMatrix slope_neg;
  DenseMatrix slope_org;
};

struct ModelParams {
  DenseMatrix w0;  ///< input_dim x embed
  std::vector<LayerParams> layers;
  DenseMatrix w1;  ///< 2*embed x embed
  DenseMatrix b1;  ///< 1 x embed
  DenseMatrix w2;  ///< embed x 1
  DenseMatrix b2;  ///< 1 x 1

  std::vector<std::pair<std::string, DenseMatrix*>> tensors();
  std::vector<std::pair<std::string, const DenseMatrix*>> tensors() const;

  /// Same shapes, all zero.
  ModelParams zeros_like() const;
  bool operator==(const ModelParams& other) const;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases, PReLU slopes 0.25.
ModelParams init_params(const ModelConfig& cfg, std::size_t input_dim, std::uint64_t seed);

/// Normalized symmetrized sign matrices over the joint node ordering (U then V).
struct GraphOperators {
  SparseMatrix a_pos_hat;
  SparseMatrix a_neg_hat;
  std::size_t u_count = 0;
};

GraphOperators build_operators(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset);

struct LayerCache {
  DenseMatrix input;  ///< H^(l) before dropout
  DenseMatrix mask;   ///< empty when dropout was not applied
  DenseMatrix dropped;
  DenseMatrix prop_pos;  ///< delta * J(A+) dropped
  DenseMatrix prop_neg;
  DenseMatrix pre_pos;
  DenseMatrix pre_neg;
  DenseMatrix pre_org;
  DenseMatrix concat;  ///< [PReLU(pre_pos) | PReLU(pre_neg) | PReLU(pre_org)]
};

struct ForwardCache {
  DenseMatrix x;
  std::vector<LayerCache> layers;
  DenseMatrix z;
};

struct ForwardOptions {
  bool training = false;
  std::uint64_t dropout_seed = 0;
};

/// Node embeddings Z = H^(L). Fills `cache` when given.
DenseMatrix forward(const ModelParams& params, const DenseMatrix& x, const GraphOperators& ops,
                    const ModelConfig& cfg, const ForwardOptions& fopts = {}, ForwardCache* cache = nullptr);

/// Sum over all 3^L branch choices of (P_L ... P_1) X W0 prod(W_branch W_cat,branch),
/// materializing each J_l densely. Equals forward() when every PReLU slope is 1
/// and dropout is off. Returns the number of terms through `terms`.
DenseMatrix linearized_forward(const ModelParams& params, const DenseMatrix& x, const GraphOperators& ops,
                               const ModelConfig& cfg, std::size_t* terms = nullptr);

inline constexpr int kMaxLinearizedLayers = 6;

struct EdgePair {
  std::size_t u;
  std::size_t v;
};

std::vector<EdgePair> edge_pairs(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset);
std::vector<double> edge_labels(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset);

struct PredictorCache {
  std::vector<EdgePair> pairs;
  DenseMatrix joined;  ///< [Z_u | Z_v]
  DenseMatrix hidden_pre;
  DenseMatrix hidden;
  Vector logits;
};

/// sigmoid(relu([Z_u | Z_v] W1 + b1) W2 + b2) per pair.
Vector predict_scores(const ModelParams& params, const DenseMatrix& z, std::size_t u_count,
                      const std::vector<EdgePair>& pairs, PredictorCache* cache = nullptr);

inline constexpr double kScoreClamp = 1e-7;

/// Mean binary cross-entropy with scores clamped to [eps, 1 - eps]; labels in {0, 1}.
double bce_loss(const Vector& scores, const std::vector<double>& labels);

/// d(mean BCE)/d(logit) per pair; zero where the clamp is active.
Vector bce_logit_gradient(const Vector& scores, const std::vector<double>& labels);

/// Reverse pass. Adds weight_decay * w to every gradient.
ModelParams backward(const ModelParams& params, const ForwardCache& cache, const PredictorCache& pcache,
                     const Vector& logit_grad, const GraphOperators& ops, const ModelConfig& cfg,
                     double weight_decay);

/// Adam with decoupled weight decay: each step also shrinks w by
/// learning_rate * weight_decay * w, outside the moment estimates.
class Adam {
 public:
  Adam(const ModelParams& like, double learning_rate, double weight_decay = 0.0, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);
  void step(ModelParams& params, const ModelParams& grads);
  long steps() const { return t_; }

 private:
  ModelParams m_;
  ModelParams v_;
  double lr_;
  double wd_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
};

}  // namespace gegennet
