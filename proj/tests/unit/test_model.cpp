#include "gegennet/error.hpp"
#include "gegennet/model.hpp"
#include "gegennet/selftest.hpp"
#include "gegennet/synthetic.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace gegennet {
namespace {

using testing::all_edges;
using testing::random_dense;

ModelConfig small_config(int layers = 2, int embed = 4) {
  ModelConfig cfg;
  cfg.layers = layers;
  cfg.embed_dim = embed;
  cfg.d = embed;
  cfg.dropout = 0.0;
  return cfg;
}

void set_slopes(ModelParams& p, double s) {
  for (auto& l : p.layers) l.slope_pos(0, 0) = l.slope_neg(0, 0) = l.slope_org(0, 0) = s;
}

TEST(InitParams, ShapesAndDeterminism) {
  ModelConfig cfg;
  const ModelParams a = init_params(cfg, 32, 5);
  EXPECT_EQ(a, init_params(cfg, 32, 5));
  ASSERT_EQ(a.layers.size(), 3u);
  EXPECT_EQ(a.w0.rows(), 32);
  EXPECT_EQ(a.w0.cols(), 32);
  for (const auto& l : a.layers) {
    EXPECT_EQ(l.w_cat.rows(), 96);
    EXPECT_EQ(l.w_cat.cols(), 32);
    EXPECT_EQ(l.slope_pos(0, 0), 0.25);
  }
  EXPECT_EQ(a.w1.rows(), 64);
  EXPECT_EQ(a.w2.cols(), 1);
  for (const auto& [name, t] : a.tensors()) {
    EXPECT_TRUE(t->allFinite()) << name;
    EXPECT_LE(t->cwiseAbs().maxCoeff(), 1.0) << name;
  }
}

TEST(Forward, ZeroInputGivesZero) {
  const SignedBipartiteGraph g = testing::single_edge_graph();
  ModelConfig cfg = small_config(1, 2);
  ModelParams p = init_params(cfg, 2, 1);
  set_slopes(p, 1.0);
  const GraphOperators ops = build_operators(g, all_edges(g));
  EXPECT_EQ(forward(p, DenseMatrix::Zero(2, 2), ops, cfg), DenseMatrix::Zero(2, 2));
}

TEST(Forward, SingleEdgePositiveBranchHandCheck) {
  const SignedBipartiteGraph g = testing::single_edge_graph();
  ModelConfig cfg = small_config(1, 2);
  cfg.alpha = 0.5;
  cfg.negative_branch = false;
  ModelParams p = init_params(cfg, 2, 1);
  p.w0 = DenseMatrix::Identity(2, 2);
  auto& l = p.layers[0];
  l.w_pos = l.w_neg = l.w_org = DenseMatrix::Identity(2, 2);
  const GraphOperators ops = build_operators(g, all_edges(g));
  ForwardCache cache;
  forward(p, DenseMatrix::Identity(2, 2), ops, cfg, {}, &cache);
  // J_1(A+) e_1 = e_2 on [[0,1],[1,0]], so the positive branch is the swap matrix.
  DenseMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_EQ(cache.layers[0].pre_pos, swap);
}

TEST(Forward, DropoutZeroTrainingMatchesInference) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  ModelConfig cfg = small_config();
  const ModelParams p = init_params(cfg, 4, 2);
  const GraphOperators ops = build_operators(g, all_edges(g));
  Rng rng(3);
  const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.node_count()), 4, rng);
  EXPECT_EQ(forward(p, x, ops, cfg, {true, 9}), forward(p, x, ops, cfg));
}

TEST(Forward, DropoutIsSeeded) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  ModelConfig cfg = small_config();
  cfg.dropout = 0.5;
  const ModelParams p = init_params(cfg, 4, 2);
  const GraphOperators ops = build_operators(g, all_edges(g));
  Rng rng(3);
  const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.node_count()), 4, rng);
  EXPECT_EQ(forward(p, x, ops, cfg, {true, 9}), forward(p, x, ops, cfg, {true, 9}));
  EXPECT_NE(forward(p, x, ops, cfg, {true, 9}), forward(p, x, ops, cfg, {true, 10}));
}

TEST(Forward, BlockSumIdentity) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  ModelConfig cfg = small_config(2, 4);
  const ModelParams p = init_params(cfg, 4, 4);
  const GraphOperators ops = build_operators(g, all_edges(g));
  Rng rng(5);
  const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.node_count()), 4, rng);
  ForwardCache cache;
  const DenseMatrix z = forward(p, x, ops, cfg, {}, &cache);
  const auto& lc = cache.layers.back();
  const auto& lp = p.layers.back();
  const Eigen::Index e = 4;
  const DenseMatrix sum = lc.concat.leftCols(e) * lp.w_cat.topRows(e) +
                          lc.concat.middleCols(e, e) * lp.w_cat.middleRows(e, e) +
                          lc.concat.rightCols(e) * lp.w_cat.bottomRows(e);
  EXPECT_LT((z - sum).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Forward, PermutationEquivariance) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  ModelConfig cfg = small_config(2, 4);
  const ModelParams p = init_params(cfg, 4, 6);
  const GraphOperators ops = build_operators(g, all_edges(g));
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Rng rng(7);
  const DenseMatrix x = random_dense(n, 4, rng);

  // Permute within each partition so the U-then-V layout is kept.
  std::vector<std::size_t> pu(g.u_count), pv(g.v_count);
  std::iota(pu.begin(), pu.end(), std::size_t{0});
  std::iota(pv.begin(), pv.end(), std::size_t{0});
  for (std::size_t i = pu.size(); i > 1; --i) std::swap(pu[i - 1], pu[rng.below(i)]);
  for (std::size_t i = pv.size(); i > 1; --i) std::swap(pv[i - 1], pv[rng.below(i)]);
  SignedBipartiteGraph h = g;
  for (auto& e : h.edges) {
    e.u = pu[e.u];
    e.v = pv[e.v];
  }
  DenseMatrix xp(n, 4);
  for (std::size_t u = 0; u < g.u_count; ++u) xp.row(static_cast<Eigen::Index>(pu[u])) = x.row(static_cast<Eigen::Index>(u));
  for (std::size_t v = 0; v < g.v_count; ++v)
    xp.row(static_cast<Eigen::Index>(g.u_count + pv[v])) = x.row(static_cast<Eigen::Index>(g.u_count + v));
  const DenseMatrix z = forward(p, x, ops, cfg);
  const DenseMatrix zp = forward(p, xp, build_operators(h, all_edges(h)), cfg);
  for (std::size_t u = 0; u < g.u_count; ++u)
    EXPECT_LT((zp.row(static_cast<Eigen::Index>(pu[u])) - z.row(static_cast<Eigen::Index>(u))).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(LinearizedForward, TermCounts) {
  const SignedBipartiteGraph g = planted_signed_graph({});
  const GraphOperators ops = build_operators(g, all_edges(g));
  Rng rng(8);
  const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.node_count()), 3, rng);
  for (int layers : {1, 2}) {
    ModelConfig cfg = small_config(layers, 3);
    std::size_t terms = 0;
    linearized_forward(init_params(cfg, 3, 1), x, ops, cfg, &terms);
    EXPECT_EQ(terms, layers == 1 ? 3u : 9u);
  }
  ModelConfig deep = small_config(kMaxLinearizedLayers + 1, 2);
  EXPECT_THROW(linearized_forward(init_params(deep, 3, 1), x, ops, deep), ConfigError);
}

TEST(LinearizedForward, MatchesForwardProperty) {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    ModelConfig cfg = small_config(1 + t % 2, 3);
    cfg.alpha = 0.5 + 0.5 * (t % 3);
    const SignedBipartiteGraph g = random_signed_graph(2 + rng.below(8), 3 + rng.below(8), 0.4, 0.6, rng.next_u64());
    const GraphOperators ops = build_operators(g, all_edges(g));
    ModelParams p = init_params(cfg, 3, rng.next_u64());
    set_slopes(p, 1.0);
    const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.node_count()), 3, rng);
    EXPECT_LE((forward(p, x, ops, cfg) - linearized_forward(p, x, ops, cfg)).norm(), 1e-6);
  }
}

TEST(Predictor, ZeroWeightsGiveHalf) {
  ModelConfig cfg = small_config(1, 3);
  ModelParams p = init_params(cfg, 3, 1);
  p.w1.setZero();
  p.b1.setZero();
  p.w2.setZero();
  p.b2.setZero();
  const Vector s = predict_scores(p, DenseMatrix::Zero(5, 3), 2, {{0, 0}, {1, 2}});
  EXPECT_EQ(s, Vector::Constant(2, 0.5));
}

TEST(Predictor, BiasMonotoneAndRange) {
  ModelConfig cfg = small_config(1, 4);
  ModelParams p = init_params(cfg, 4, 2);
  Rng rng(10);
  const DenseMatrix z = random_dense(200, 4, rng);
  std::vector<EdgePair> pairs;
  for (int i = 0; i < 10000; ++i) pairs.push_back({rng.below(100), rng.below(100)});
  const Vector s = predict_scores(p, z, 100, pairs);
  EXPECT_GT(s.minCoeff(), 0.0);
  EXPECT_LT(s.maxCoeff(), 1.0);
  p.b2(0, 0) += 0.1;
  const Vector s2 = predict_scores(p, z, 100, pairs);
  EXPECT_TRUE(((s2 - s).array() > 0.0).all());
}

TEST(Predictor, IndexOutOfRange) {
  ModelConfig cfg = small_config(1, 2);
  const ModelParams p = init_params(cfg, 2, 1);
  EXPECT_THROW(predict_scores(p, DenseMatrix::Zero(4, 2), 2, {{2, 0}}), ConfigError);
  EXPECT_THROW(predict_scores(p, DenseMatrix::Zero(4, 2), 2, {{0, 2}}), ConfigError);
}

TEST(BceLoss, Examples) {
  EXPECT_NEAR(bce_loss(Vector::Constant(1, 0.5), {1.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(Vector::Constant(1, 0.5), {0.0}), std::log(2.0), 1e-15);
  EXPECT_LT(bce_loss(Vector::Constant(1, 1.0 - 1e-12), {1.0}), 1e-6);
  Vector s(2);
  s << 0.9, 0.1;
  EXPECT_NEAR(bce_loss(s, {1.0, 0.0}), 0.105361, 1e-6);
  EXPECT_THROW(bce_loss(s, {1.0}), ConfigError);
}

TEST(BceLoss, LogitGradient) {
  Vector s(3);
  s << 0.9, 0.2, 1.0;
  const Vector g = bce_logit_gradient(s, {1.0, 1.0, 1.0});
  EXPECT_NEAR(g[0], (0.9 - 1.0) / 3.0, 1e-15);
  EXPECT_NEAR(g[1], (0.2 - 1.0) / 3.0, 1e-15);
  EXPECT_EQ(g[2], 0.0);  // clamped
}

struct Instance {
  SignedBipartiteGraph g;
  ModelConfig cfg;
  GraphOperators ops;
  DenseMatrix x;
  ModelParams params;
};

Instance make_setup() {
  Instance s;
  s.g = planted_signed_graph({10, 12, 50, 3, 0.3, 0.6, 4});
  s.cfg = small_config(2, 4);
  s.ops = build_operators(s.g, all_edges(s.g));
  Rng rng(11);
  s.x = random_dense(static_cast<Eigen::Index>(s.g.node_count()), 4, rng);
  s.params = init_params(s.cfg, 4, 12);
  return s;
}

TEST(Backward, ZeroLossGradientGivesZero) {
  Instance s = make_setup();
  ForwardCache cache;
  PredictorCache pc;
  const auto pairs = edge_pairs(s.g, all_edges(s.g));
  predict_scores(s.params, forward(s.params, s.x, s.ops, s.cfg, {}, &cache), s.g.u_count, pairs, &pc);
  const ModelParams grads =
      backward(s.params, cache, pc, Vector::Zero(static_cast<Eigen::Index>(pairs.size())), s.ops, s.cfg, 0.0);
  for (const auto& [name, t] : grads.tensors()) EXPECT_EQ(t->cwiseAbs().maxCoeff(), 0.0) << name;
  const ModelParams with_wd =
      backward(s.params, cache, pc, Vector::Zero(static_cast<Eigen::Index>(pairs.size())), s.ops, s.cfg, 0.5);
  EXPECT_EQ(with_wd.w0, 0.5 * s.params.w0);
}

TEST(Backward, DuplicatedBatchMeanInvariance) {
  Instance s = make_setup();
  const auto subset = all_edges(s.g);
  std::vector<std::size_t> doubled = subset;
  doubled.insert(doubled.end(), subset.begin(), subset.end());
  const auto grads_for = [&](const std::vector<std::size_t>& sub) {
    ForwardCache cache;
    PredictorCache pc;
    const Vector scores =
        predict_scores(s.params, forward(s.params, s.x, s.ops, s.cfg, {}, &cache), s.g.u_count, edge_pairs(s.g, sub), &pc);
    return backward(s.params, cache, pc, bce_logit_gradient(scores, edge_labels(s.g, sub)), s.ops, s.cfg, 0.0);
  };
  const ModelParams a = grads_for(subset);
  const ModelParams b = grads_for(doubled);
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i)
    EXPECT_LT((*ta[i].second - *tb[i].second).cwiseAbs().maxCoeff(), 1e-10) << ta[i].first;
}

TEST(Backward, FiniteDifferenceCheck) {
  const CheckResult r = check_gradients(50);
  EXPECT_TRUE(r.passed) << r.detail << " measured " << r.measured;
  EXPECT_LE(r.measured, 1e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ModelConfig cfg = small_config(1, 2);
  ModelParams p = init_params(cfg, 2, 1);
  const ModelParams before = p;
  ModelParams g = p.zeros_like();
  g.w0.setConstant(3.0);
  g.b2.setConstant(-0.01);
  Adam adam(p, 0.01);
  adam.step(p, g);
  EXPECT_LT((p.w0 - (before.w0.array() - 0.01).matrix()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(p.b2(0, 0), before.b2(0, 0) + 0.01, 1e-8);
  EXPECT_EQ(p.w1, before.w1);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, DecoupledWeightDecayBypassesMoments) {
  ModelConfig cfg = small_config(1, 2);
  ModelParams p = init_params(cfg, 2, 1);
  const ModelParams before = p;
  Adam adam(p, 0.01, 0.1);
  adam.step(p, p.zeros_like());
  EXPECT_LT((p.w0 - 0.999 * before.w0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((p.layers[0].w_cat - 0.999 * before.layers[0].w_cat).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ModelConfig, Validation) {
  ModelConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dropout = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.layers = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.alpha = -0.75;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.ratios = {0.5, 0.1, 0.1};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ModelConfig, ParseFormatRoundTrip) {
  const ModelConfig cfg = parse_config(
      "# comment\nlayers = 2\nalpha = 0.1\nfeatures = \"random\"\nfirst_order_coefficient = alpha_plus_one\n"
      "signed_laplacian = true\ntrain_ratio = 0.7\nvalidation_ratio = 0.2\ntest_ratio = 0.1\nseed = 12345678901\n");
  EXPECT_EQ(cfg.layers, 2);
  EXPECT_EQ(cfg.alpha, 0.1);
  EXPECT_EQ(cfg.features, FeatureSource::random);
  EXPECT_EQ(cfg.first_order_coefficient, FirstOrderCoefficient::alpha_plus_one);
  EXPECT_TRUE(cfg.signed_laplacian);
  EXPECT_EQ(cfg.seed, 12345678901u);
  const std::string text = format_config(cfg);
  EXPECT_EQ(format_config(parse_config(text)), text);
  EXPECT_EQ(config_hash(parse_config(text)), config_hash(cfg));
  EXPECT_NE(config_hash(cfg), config_hash(ModelConfig{}));
  EXPECT_EQ(config_hash(cfg).size(), 16u);
}

TEST(ModelConfig, ParseErrors) {
  EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("layers = 2\nlayers = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("layers\n"), ConfigError);
  EXPECT_THROW(parse_config("layers = two\n"), ConfigError);
  EXPECT_THROW(parse_config("dropout = 1.5\n"), ConfigError);
}

}  // namespace
}  // namespace gegennet
