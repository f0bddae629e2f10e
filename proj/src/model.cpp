#include "gegennet/model.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <cmath>

namespace gegennet {

namespace {

DenseMatrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

DenseMatrix scalar(double v) { return DenseMatrix::Constant(1, 1, v); }

DenseMatrix prelu(const DenseMatrix& pre, double slope) {
  return pre.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

void check_finite(const DenseMatrix& m, int layer, const char* branch) {
  if (!m.allFinite())
    throw NumericalError("non-finite activation in layer " + std::to_string(layer) + ", " + branch + " branch");
}

// Gradient of PReLU: returns d(pre) and accumulates d(slope).
DenseMatrix prelu_backward(const DenseMatrix& pre, const DenseMatrix& grad_out, double slope, double& slope_grad) {
  DenseMatrix g(pre.rows(), pre.cols());
  double acc = 0.0;
  for (Eigen::Index r = 0; r < pre.rows(); ++r) {
    for (Eigen::Index c = 0; c < pre.cols(); ++c) {
      const double p = pre(r, c);
      const double go = grad_out(r, c);
      if (p > 0.0) {
        g(r, c) = go;
      } else {
        g(r, c) = slope * go;
        acc += p * go;
      }
    }
  }
  slope_grad += acc;
  return g;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(FeatureSource s) { return s == FeatureSource::spectral ? "spectral" : "random"; }

std::vector<std::pair<std::string, DenseMatrix*>> ModelParams::tensors() {
  std::vector<std::pair<std::string, DenseMatrix*>> out;
  out.emplace_back("w0", &w0);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    auto& L = layers[l];
    out.emplace_back(p + "w_pos", &L.w_pos);
    out.emplace_back(p + "w_neg", &L.w_neg);
    out.emplace_back(p + "w_org", &L.w_org);
    out.emplace_back(p + "w_cat", &L.w_cat);
    out.emplace_back(p + "slope_pos", &L.slope_pos);
    out.emplace_back(p + "slope_neg", &L.slope_neg);
    out.emplace_back(p + "slope_org", &L.slope_org);
  }
  out.emplace_back("w1", &w1);
  out.emplace_back("b1", &b1);
  out.emplace_back("w2", &w2);
  out.emplace_back("b2", &b2);
  return out;
}

std::vector<std::pair<std::string, const DenseMatrix*>> ModelParams::tensors() const {
  std::vector<std::pair<std::string, const DenseMatrix*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->tensors()) out.emplace_back(name, t);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto& [name, t] : z.tensors()) t->setZero();
  return z;
}

bool ModelParams::operator==(const ModelParams& other) const {
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const DenseMatrix& x = *a[i].second;
    const DenseMatrix& y = *b[i].second;
    if (x.rows() != y.rows() || x.cols() != y.cols() || x != y) return false;
  }
  return true;
}

ModelParams init_params(const ModelConfig& cfg, std::size_t input_dim, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const Eigen::Index e = cfg.embed_dim;
  const auto bound = [](Eigen::Index fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };
  ModelParams p;
  p.w0 = uniform_matrix(static_cast<Eigen::Index>(input_dim), e, bound(static_cast<Eigen::Index>(input_dim)), rng);
  p.layers.resize(static_cast<std::size_t>(cfg.layers));
  for (auto& L : p.layers) {
    L.w_pos = uniform_matrix(e, e, bound(e), rng);
    L.w_neg = uniform_matrix(e, e, bound(e), rng);
    L.w_org = uniform_matrix(e, e, bound(e), rng);
    L.w_cat = uniform_matrix(3 * e, e, bound(3 * e), rng);
    L.slope_pos = scalar(0.25);
    L.slope_neg = scalar(0.25);
    L.slope_org = scalar(0.25);
  }
  p.w1 = uniform_matrix(2 * e, e, bound(2 * e), rng);
  p.b1 = uniform_matrix(1, e, bound(2 * e), rng);
  p.w2 = uniform_matrix(e, 1, bound(e), rng);
  p.b2 = uniform_matrix(1, 1, bound(e), rng);
  return p;
}

GraphOperators build_operators(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset) {
  const SignMatrices s = build_sign_matrices(g, subset);
  return {normalize_adjacency(symmetrize(s.a_pos)), normalize_adjacency(symmetrize(s.a_neg)), g.u_count};
}

DenseMatrix forward(const ModelParams& params, const DenseMatrix& x, const GraphOperators& ops,
                    const ModelConfig& cfg, const ForwardOptions& fopts, ForwardCache* cache) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (ops.a_pos_hat.rows() != n || ops.a_neg_hat.rows() != n)
    throw ConfigError("forward: operators and features disagree on the node count");
  if (x.cols() != params.w0.rows()) throw ConfigError("forward: feature width does not match w0");
  if (params.layers.size() != static_cast<std::size_t>(cfg.layers)) throw ConfigError("forward: layer count mismatch");

  const GegenbauerParams gp = cfg.gegenbauer();
  gp.validate(cfg.layers);
  const bool use_dropout = fopts.training && cfg.dropout > 0.0;
  Rng rng(fopts.dropout_seed);
  const double keep_scale = use_dropout ? 1.0 / (1.0 - cfg.dropout) : 1.0;

  if (cache) {
    cache->x = x;
    cache->layers.assign(params.layers.size(), {});
  }
  DenseMatrix h = x * params.w0;
  const Eigen::Index e = h.cols();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& L = params.layers[l];
    const int order = static_cast<int>(l) + 1;
    DenseMatrix mask;
    DenseMatrix dropped = h;
    if (use_dropout) {
      mask.resize(h.rows(), h.cols());
      for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) mask(r, c) = rng.uniform() >= cfg.dropout ? keep_scale : 0.0;
      dropped = h.cwiseProduct(mask);
    }

    DenseMatrix concat = DenseMatrix::Zero(h.rows(), 3 * e);
    DenseMatrix prop_pos, prop_neg, pre_pos, pre_neg;
    if (cfg.positive_branch) {
      prop_pos = cfg.delta * gegenbauer_apply(ops.a_pos_hat, dropped, order, gp);
      pre_pos = prop_pos * L.w_pos;
      concat.leftCols(e) = prelu(pre_pos, L.slope_pos(0, 0));
      check_finite(concat.leftCols(e), order, "positive");
    }
    if (cfg.negative_branch) {
      prop_neg = cfg.delta * gegenbauer_apply(ops.a_neg_hat, dropped, order, gp);
      pre_neg = prop_neg * L.w_neg;
      concat.middleCols(e, e) = prelu(pre_neg, L.slope_neg(0, 0));
      check_finite(concat.middleCols(e, e), order, "negative");
    }
    DenseMatrix pre_org = dropped * L.w_org;
    concat.rightCols(e) = prelu(pre_org, L.slope_org(0, 0));
    check_finite(concat.rightCols(e), order, "self");

    DenseMatrix next = concat * L.w_cat;
    if (cache) {
      LayerCache& c = cache->layers[l];
      c.input = std::move(h);
      c.mask = std::move(mask);
      c.dropped = std::move(dropped);
      c.prop_pos = std::move(prop_pos);
      c.prop_neg = std::move(prop_neg);
      c.pre_pos = std::move(pre_pos);
      c.pre_neg = std::move(pre_neg);
      c.pre_org = std::move(pre_org);
      c.concat = std::move(concat);
    }
    h = std::move(next);
  }
  if (cache) cache->z = h;
  return h;
}

DenseMatrix linearized_forward(const ModelParams& params, const DenseMatrix& x, const GraphOperators& ops,
                               const ModelConfig& cfg, std::size_t* terms) {
  const int layers = cfg.layers;
  if (layers > kMaxLinearizedLayers)
    throw ConfigError("linearized_forward supports at most " + std::to_string(kMaxLinearizedLayers) + " layers");
  const auto n = static_cast<Eigen::Index>(x.rows());
  const Eigen::Index e = params.w0.cols();
  const GegenbauerParams gp = cfg.gegenbauer();
  const DenseMatrix eye = DenseMatrix::Identity(n, n);

  // Per layer: the three propagation matrices and right-hand weight factors.
  std::vector<std::array<DenseMatrix, 3>> props(static_cast<std::size_t>(layers));
  std::vector<std::array<DenseMatrix, 3>> weights(static_cast<std::size_t>(layers));
  std::vector<std::array<bool, 3>> active(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const LayerParams& L = params.layers[static_cast<std::size_t>(l)];
    auto& P = props[static_cast<std::size_t>(l)];
    auto& W = weights[static_cast<std::size_t>(l)];
    P[0] = cfg.delta * gegenbauer_apply(ops.a_pos_hat, eye, l + 1, gp);
    P[1] = cfg.delta * gegenbauer_apply(ops.a_neg_hat, eye, l + 1, gp);
    P[2] = eye;
    W[0] = L.w_pos * L.w_cat.topRows(e);
    W[1] = L.w_neg * L.w_cat.middleRows(e, e);
    W[2] = L.w_org * L.w_cat.bottomRows(e);
    active[static_cast<std::size_t>(l)] = {cfg.positive_branch, cfg.negative_branch, true};
  }

  std::size_t total = 1;
  for (int l = 0; l < layers; ++l) total *= 3;
  const DenseMatrix base = x * params.w0;
  DenseMatrix z = DenseMatrix::Zero(n, e);
  std::size_t counted = 0;
  std::vector<int> choice(static_cast<std::size_t>(layers), 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t code = t;
    bool live = true;
    for (int l = 0; l < layers; ++l) {
      choice[static_cast<std::size_t>(l)] = static_cast<int>(code % 3);
      code /= 3;
      live = live && active[static_cast<std::size_t>(l)][static_cast<std::size_t>(choice[static_cast<std::size_t>(l)])];
    }
    ++counted;
    if (!live) continue;
    DenseMatrix prop = eye;
    DenseMatrix w = DenseMatrix::Identity(e, e);
    for (int l = 0; l < layers; ++l) {
      const auto c = static_cast<std::size_t>(choice[static_cast<std::size_t>(l)]);
      prop = (props[static_cast<std::size_t>(l)][c] * prop).eval();
      w = (w * weights[static_cast<std::size_t>(l)][c]).eval();
    }
    z += prop * base * w;
  }
  if (terms) *terms = counted;
  return z;
}

std::vector<EdgePair> edge_pairs(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset) {
  std::vector<EdgePair> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) {
    if (i >= g.edges.size()) throw ConfigError("edge index out of range");
    out.push_back({g.edges[i].u, g.edges[i].v});
  }
  return out;
}

std::vector<double> edge_labels(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset) {
  std::vector<double> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) out.push_back(g.edges.at(i).sign > 0 ? 1.0 : 0.0);
  return out;
}

Vector predict_scores(const ModelParams& params, const DenseMatrix& z, std::size_t u_count,
                      const std::vector<EdgePair>& pairs, PredictorCache* cache) {
  const Eigen::Index e = z.cols();
  if (params.w1.rows() != 2 * e) throw ConfigError("predict_scores: embedding width does not match w1");
  const auto m = static_cast<Eigen::Index>(pairs.size());
  DenseMatrix joined(m, 2 * e);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    const std::size_t vrow = u_count + p.v;
    if (p.u >= u_count || vrow >= static_cast<std::size_t>(z.rows()))
      throw ConfigError("predict_scores: pair (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ") out of range");
    joined.row(i).head(e) = z.row(static_cast<Eigen::Index>(p.u));
    joined.row(i).tail(e) = z.row(static_cast<Eigen::Index>(vrow));
  }
  DenseMatrix hidden_pre = joined * params.w1;
  hidden_pre.rowwise() += params.b1.row(0);
  DenseMatrix hidden = hidden_pre.cwiseMax(0.0);
  Vector logits = hidden * params.w2.col(0);
  logits.array() += params.b2(0, 0);
  Vector scores = logits.unaryExpr([](double v) { return sigmoid(v); });
  if (cache) {
    cache->pairs = pairs;
    cache->joined = std::move(joined);
    cache->hidden_pre = std::move(hidden_pre);
    cache->hidden = std::move(hidden);
    cache->logits = std::move(logits);
  }
  return scores;
}

double bce_loss(const Vector& scores, const std::vector<double>& labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size()) throw ConfigError("bce_loss: length mismatch");
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s = std::clamp(scores[static_cast<Eigen::Index>(i)], kScoreClamp, 1.0 - kScoreClamp);
    total -= labels[i] * std::log(s) + (1.0 - labels[i]) * std::log(1.0 - s);
  }
  return total / static_cast<double>(labels.size());
}

Vector bce_logit_gradient(const Vector& scores, const std::vector<double>& labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size()) throw ConfigError("bce_logit_gradient: length mismatch");
  Vector g(scores.size());
  const double inv_m = labels.empty() ? 0.0 : 1.0 / static_cast<double>(labels.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    const bool clamped = s < kScoreClamp || s > 1.0 - kScoreClamp;
    g[i] = clamped ? 0.0 : (s - labels[static_cast<std::size_t>(i)]) * inv_m;
  }
  return g;
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache, const PredictorCache& pcache,
                     const Vector& logit_grad, const GraphOperators& ops, const ModelConfig& cfg,
                     double weight_decay) {
  if (cache.layers.size() != params.layers.size() || logit_grad.size() != pcache.logits.size())
    throw ConfigError("backward: cache does not match the parameters");
  ModelParams g = params.zeros_like();
  const Eigen::Index e = params.w0.cols();
  const GegenbauerParams gp = cfg.gegenbauer();

  // Predictor.
  g.w2.col(0) = pcache.hidden.transpose() * logit_grad;
  g.b2(0, 0) = logit_grad.sum();
  DenseMatrix d_hidden = logit_grad * params.w2.col(0).transpose();
  d_hidden = d_hidden.cwiseProduct((pcache.hidden_pre.array() > 0.0).cast<double>().matrix());
  g.w1 = pcache.joined.transpose() * d_hidden;
  g.b1.row(0) = d_hidden.colwise().sum();
  const DenseMatrix d_joined = d_hidden * params.w1.transpose();
  DenseMatrix dh = DenseMatrix::Zero(cache.z.rows(), e);
  for (std::size_t i = 0; i < pcache.pairs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    dh.row(static_cast<Eigen::Index>(pcache.pairs[i].u)) += d_joined.row(r).head(e);
    dh.row(static_cast<Eigen::Index>(ops.u_count + pcache.pairs[i].v)) += d_joined.row(r).tail(e);
  }

  // Layers in reverse.
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const LayerParams& L = params.layers[li];
    const LayerCache& c = cache.layers[li];
    LayerParams& G = g.layers[li];
    const int order = static_cast<int>(li) + 1;

    G.w_cat = c.concat.transpose() * dh;
    const DenseMatrix d_concat = dh * L.w_cat.transpose();
    DenseMatrix d_dropped = DenseMatrix::Zero(c.dropped.rows(), c.dropped.cols());

    if (cfg.positive_branch) {
      double sg = 0.0;
      const DenseMatrix d_pre = prelu_backward(c.pre_pos, d_concat.leftCols(e), L.slope_pos(0, 0), sg);
      G.slope_pos(0, 0) = sg;
      G.w_pos = c.prop_pos.transpose() * d_pre;
      // J(A) is symmetric, so its adjoint is itself.
      d_dropped += cfg.delta * gegenbauer_apply(ops.a_pos_hat, DenseMatrix(d_pre * L.w_pos.transpose()), order, gp);
    }
    if (cfg.negative_branch) {
      double sg = 0.0;
      const DenseMatrix d_pre = prelu_backward(c.pre_neg, d_concat.middleCols(e, e), L.slope_neg(0, 0), sg);
      G.slope_neg(0, 0) = sg;
      G.w_neg = c.prop_neg.transpose() * d_pre;
      d_dropped += cfg.delta * gegenbauer_apply(ops.a_neg_hat, DenseMatrix(d_pre * L.w_neg.transpose()), order, gp);
    }
    {
      double sg = 0.0;
      const DenseMatrix d_pre = prelu_backward(c.pre_org, d_concat.rightCols(e), L.slope_org(0, 0), sg);
      G.slope_org(0, 0) = sg;
      G.w_org = c.dropped.transpose() * d_pre;
      d_dropped += d_pre * L.w_org.transpose();
    }
    dh = c.mask.size() > 0 ? DenseMatrix(d_dropped.cwiseProduct(c.mask)) : d_dropped;
  }
  g.w0 = cache.x.transpose() * dh;

  if (weight_decay != 0.0) {
    auto gt = g.tensors();
    const auto pt = params.tensors();
    for (std::size_t i = 0; i < gt.size(); ++i) *gt[i].second += weight_decay * *pt[i].second;
  }
  return g;
}

Adam::Adam(const ModelParams& like, double learning_rate, double weight_decay, double beta1, double beta2, double eps)
    : m_(like.zeros_like()),
      v_(like.zeros_like()),
      lr_(learning_rate),
      wd_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void Adam::step(ModelParams& params, const ModelParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto ma = m[i].second->array();
    auto va = v[i].second->array();
    const auto ga = g[i].second->array();
    ma = beta1_ * ma + (1.0 - beta1_) * ga;
    va = beta2_ * va + (1.0 - beta2_) * ga.square();
    auto pa = p[i].second->array();
    pa -= lr_ * ((ma / c1) / ((va / c2).sqrt() + eps_) + wd_ * pa);
  }
}

}  // namespace gegennet
