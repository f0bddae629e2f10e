#include "gegennet/analysis.hpp"
#include "gegennet/error.hpp"
#include "gegennet/features.hpp"
#include "gegennet/filters.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/selftest.hpp"
#include "gegennet/serialization.hpp"
#include "gegennet/train.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gegennet;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct InputOptions {
  std::string input;
  std::string dataset;
  std::string data_dir;
  std::optional<double> rating_midpoint;

  void add_to(CLI::App* app) {
    auto* in = app->add_option("--input", input, "Edge list file (u v sign per line)");
    auto* ds = app->add_option("--dataset", dataset, "Dataset name resolved as <data-dir>/<name>.tsv");
    in->excludes(ds);
    app->add_option("--data-dir", data_dir, "Dataset directory (default $GEGENNET_DATA_DIR or ./data)");
    app->add_option("--rating-midpoint", rating_midpoint, "Treat the third column as a rating; > midpoint is positive");
  }

  std::string path() const {
    if (!input.empty()) return input;
    if (dataset.empty()) throw ConfigError("one of --input or --dataset is required");
    std::string dir = data_dir;
    if (dir.empty()) {
      const char* env = std::getenv("GEGENNET_DATA_DIR");
      dir = env ? env : "data";
    }
    for (const char* ext : {".tsv", ".txt", ".csv"}) {
      const fs::path p = fs::path(dir) / (dataset + ext);
      if (fs::exists(p)) return p.string();
    }
    throw DataError("dataset '" + dataset + "' not found in '" + dir + "'");
  }

  std::string name() const { return !dataset.empty() ? dataset : fs::path(input).stem().string(); }

  SignedBipartiteGraph load() const {
    EdgeListFormat fmt;
    fmt.rating_midpoint = rating_midpoint;
    return load_edge_list(path(), fmt);
  }
};

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> r{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) throw ConfigError("--ratios takes exactly three comma-separated values");
    try {
      std::size_t used = 0;
      r[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("--ratios: '" + part + "' is not a number");
    }
    ++i;
  }
  if (i != 3) throw ConfigError("--ratios takes exactly three comma-separated values");
  return r;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text << std::flush;
  else write_file(path, text);
}

ModelConfig resolve_config(const std::string& path, std::optional<std::uint64_t> seed) {
  ModelConfig cfg = path.empty() ? ModelConfig{} : load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

EdgeSplit resolve_split(const std::string& manifest, const SignedBipartiteGraph& g, const ModelConfig& cfg) {
  if (!manifest.empty()) return load_split(manifest, g.edges.size());
  return split_edges(g, cfg.ratios, cfg.seed);
}

DenseMatrix resolve_features(const std::string& cache, const SignedBipartiteGraph& g, const EdgeSplit& split,
                             const ModelConfig& cfg) {
  if (cache.empty()) return build_features(g, split, cfg);
  const SpectralFeatures f = load_feature_cache(cache, nullptr, FeatureCacheKey{graph_hash(g), split_hash(split)});
  if (f.d != static_cast<std::size_t>(cfg.d)) throw DataError("feature cache has d = " + std::to_string(f.d) + ", config wants " + std::to_string(cfg.d));
  if (f.x.rows() != static_cast<Eigen::Index>(g.node_count())) throw DataError("feature cache row count does not match the graph");
  // The cache stores Phi and Psi; the blend follows the config's mu.
  return combine_features(f.phi, f.psi, cfg.mu).x;
}

int run_selftest_command() {
  bool all = true;
  for (const auto& r : run_selftest()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " measured=" << r.measured << " tol=" << r.tolerance;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << '\n';
    all = all && r.passed;
  }
  return all ? kOk : kNumerical;
}

int sign_of(const std::string& s) {
  if (s == "pos" || s == "+") return 1;
  if (s == "neg" || s == "-") return -1;
  throw ConfigError("sign must be pos or neg, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GegenNet link sign prediction on signed bipartite graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gegennet 0.1.0");

  // prepare
  InputOptions prep_in;
  std::string prep_ratios = "0.8,0.1,0.1";
  std::uint64_t prep_seed = 7;
  std::string prep_out = "manifest.json";
  auto* prepare = app.add_subcommand("prepare", "Parse an edge list and write a split manifest");
  prep_in.add_to(prepare);
  prepare->add_option("--ratios", prep_ratios, "train,validation,test ratios")->capture_default_str();
  prepare->add_option("--seed", prep_seed, "Shuffle seed")->capture_default_str();
  prepare->add_option("--output,-o", prep_out, "Manifest path ('-' for stdout)")->capture_default_str();

  // init-features
  InputOptions feat_in;
  std::string feat_config, feat_manifest, feat_out = "features.bin";
  std::optional<std::uint64_t> feat_seed;
  auto* init_features = app.add_subcommand("init-features", "Compute and cache the spectral features");
  feat_in.add_to(init_features);
  init_features->add_option("--config", feat_config, "Config file");
  init_features->add_option("--manifest", feat_manifest, "Split manifest (default: split from the config seed)");
  init_features->add_option("--seed", feat_seed, "Override the config seed");
  init_features->add_option("--output,-o", feat_out, "Cache path")->capture_default_str();

  // train
  InputOptions train_in;
  std::string train_config, train_manifest, train_features, train_ckpt, train_history, train_out;
  std::optional<std::uint64_t> train_seed;
  bool omit_timing = false;
  bool quiet = false;
  auto* train_cmd = app.add_subcommand("train", "Train a model and report test metrics as JSON");
  train_in.add_to(train_cmd);
  train_cmd->add_option("--config", train_config, "Config file");
  train_cmd->add_option("--seed", train_seed, "Override the config seed");
  train_cmd->add_option("--manifest", train_manifest, "Split manifest (default: split from the seed)");
  train_cmd->add_option("--features", train_features, "Feature cache from init-features");
  train_cmd->add_option("--checkpoint", train_ckpt, "Write the best checkpoint here");
  train_cmd->add_option("--history", train_history, "Write per-epoch JSON lines here");
  train_cmd->add_option("--output,-o", train_out, "Metrics JSON path (default stdout)");
  train_cmd->add_flag("--omit-timing", omit_timing, "Write wall_seconds as null so runs compare byte for byte");
  train_cmd->add_flag("--quiet,-q", quiet, "No progress on stderr");

  // evaluate
  InputOptions eval_in;
  std::string eval_ckpt, eval_manifest, eval_features, eval_out, eval_split = "test";
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a split with a checkpoint");
  eval_in.add_to(eval_cmd);
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint from train")->required();
  eval_cmd->add_option("--manifest", eval_manifest, "Split manifest (default: split from the checkpoint seed)");
  eval_cmd->add_option("--features", eval_features, "Feature cache");
  eval_cmd->add_option("--split", eval_split, "test, validation or train")->capture_default_str();
  eval_cmd->add_option("--output,-o", eval_out, "Metrics JSON path (default stdout)");

  // analyze-spectrum
  InputOptions an_in;
  std::string an_manifest, an_source = "pos", an_target = "pos", an_split = "test", an_out, an_curves, an_report;
  std::string an_ratios = "0.8,0.1,0.1";
  std::uint64_t an_seed = 7;
  bool an_train_target = false;
  auto* analyze = app.add_subcommand("analyze-spectrum", "Project held-out edges onto the training eigenbasis");
  an_in.add_to(analyze);
  analyze->add_option("--manifest", an_manifest, "Split manifest (default: split from --seed and --ratios)");
  analyze->add_option("--seed", an_seed, "Split seed when no manifest is given")->capture_default_str();
  analyze->add_option("--ratios", an_ratios, "Split ratios when no manifest is given")->capture_default_str();
  analyze->add_option("--source", an_source, "Sign of the decomposed training matrix: pos or neg")->capture_default_str();
  analyze->add_option("--target", an_target, "Sign of the held-out target edges: pos or neg")->capture_default_str();
  analyze->add_option("--target-split", an_split, "Split supplying the target edges")->capture_default_str();
  analyze->add_flag("--target-is-source", an_train_target, "Use the normalized training matrix itself as the target");
  analyze->add_option("--output,-o", an_out, "CSV path (default stdout)");
  analyze->add_option("--curves-dir", an_curves, "Write one lambda,value CSV per reference filter here");
  analyze->add_option("--fit-report", an_report, "Write curve fit residuals as JSON here");

  auto* selftest = app.add_subcommand("selftest", "Run the numerical oracle checks on synthetic graphs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (prepare->parsed()) {
      const SignedBipartiteGraph g = prep_in.load();
      const EdgeSplit split = split_edges(g, parse_ratios(prep_ratios), prep_seed);
      emit(prep_out, split_to_json(split));
      std::cerr << "u=" << g.u_count << " v=" << g.v_count << " edges=" << g.edges.size() << " (+" << g.positive_count()
                << " / -" << g.negative_count() << ") split " << split.train.size() << "/" << split.validation.size()
                << "/" << split.test.size() << "\n";
      return kOk;
    }
    if (init_features->parsed()) {
      const ModelConfig cfg = resolve_config(feat_config, feat_seed);
      const SignedBipartiteGraph g = feat_in.load();
      const EdgeSplit split = resolve_split(feat_manifest, g, cfg);
      FeatureOptions fo;
      fo.d = static_cast<std::size_t>(cfg.d);
      fo.mu = cfg.mu;
      fo.signed_laplacian = cfg.signed_laplacian;
      fo.solver.tol = cfg.solver_tol;
      fo.solver.seed = solver_seed(cfg);
      const SpectralFeatures f = compute_spectral_features(g, split.train, fo);
      save_feature_cache(feat_out, f, {graph_hash(g), split_hash(split)});
      return kOk;
    }
    if (train_cmd->parsed()) {
      const ModelConfig cfg = resolve_config(train_config, train_seed);
      const SignedBipartiteGraph g = train_in.load();
      const EdgeSplit split = resolve_split(train_manifest, g, cfg);
      const auto start = std::chrono::steady_clock::now();
      const DenseMatrix x = resolve_features(train_features, g, split, cfg);
      std::ofstream history;
      if (!train_history.empty()) {
        history.open(train_history, std::ios::binary);
        if (!history) throw DataError("cannot open '" + train_history + "' for writing");
      }
      const TrainResult tr = train(g, split, x, cfg, [&](const EpochRecord& rec) {
        if (history.is_open()) history << history_line(rec);
        if (!quiet && (rec.epoch % 25 == 0 || rec.epoch == 1))
          std::cerr << "epoch " << rec.epoch << " loss " << rec.train_loss << " val_auc " << rec.val_auc << "\n";
      });
      const Metrics m = evaluate_edges(tr.params, g, split, split.test, x, cfg);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!train_ckpt.empty()) save_checkpoint(train_ckpt, {cfg, tr.params, graph_hash(g)});
      MetricsRecord rec{train_in.name(), cfg.seed, config_hash(cfg), m, tr.epochs_run, tr.best_epoch, std::nullopt};
      if (!omit_timing) rec.wall_seconds = wall;
      emit(train_out, metrics_to_json(rec));
      return kOk;
    }
    if (eval_cmd->parsed()) {
      const Checkpoint ckpt = load_checkpoint(eval_ckpt);
      const SignedBipartiteGraph g = eval_in.load();
      if (ckpt.dataset_hash != graph_hash(g)) throw DataError("checkpoint was trained on a different edge list");
      const EdgeSplit split = resolve_split(eval_manifest, g, ckpt.config);
      const DenseMatrix x = resolve_features(eval_features, g, split, ckpt.config);
      const std::vector<std::size_t>* subset = nullptr;
      if (eval_split == "test") subset = &split.test;
      else if (eval_split == "validation") subset = &split.validation;
      else if (eval_split == "train") subset = &split.train;
      else throw ConfigError("--split must be test, validation or train");
      const Metrics m = evaluate_edges(ckpt.params, g, split, *subset, x, ckpt.config);
      MetricsRecord rec{eval_in.name(), ckpt.config.seed, config_hash(ckpt.config), m, 0, 0, std::nullopt};
      emit(eval_out, metrics_to_json(rec));
      return kOk;
    }
    if (analyze->parsed()) {
      const SignedBipartiteGraph g = an_in.load();
      const EdgeSplit split =
          an_manifest.empty() ? split_edges(g, parse_ratios(an_ratios), an_seed) : load_split(an_manifest, g.edges.size());
      const int source = sign_of(an_source);
      const int target = sign_of(an_target);
      const std::vector<std::size_t>* subset = nullptr;
      if (an_split == "test") subset = &split.test;
      else if (an_split == "validation") subset = &split.validation;
      else if (an_split == "train") subset = &split.train;
      else throw ConfigError("--target-split must be test, validation or train");

      const SparseMatrix a = signed_operator(g, split.train, source);
      const SparseMatrix y = an_train_target ? a : heldout_indicator(g, *subset, target);
      SpectralSignal signal = spectral_signal(a, y);
      signal.source_sign = source;
      signal.target_sign = target;
      std::ostringstream csv;
      write_signal_csv(csv, signal);
      emit(an_out, csv.str());

      std::vector<FilterCurve> curves;
      const auto grid = uniform_grid();
      for (auto kind : {FilterKind::k_hop, FilterKind::ppr, FilterKind::hkpr, FilterKind::gnn_lf, FilterKind::gnn_hf,
                        FilterKind::gegenbauer})
        curves.push_back(classic_filter_curve(kind, grid, default_hyperparameters(kind)));
      if (!an_curves.empty()) {
        fs::create_directories(an_curves);
        for (const auto& c : curves) {
          std::ostringstream o;
          write_curve_csv(o, c);
          write_file((fs::path(an_curves) / (std::string(to_string(c.kind)) + ".csv")).string(), o.str());
        }
      }
      if (!an_report.empty()) {
        nlohmann::ordered_json j;
        j["source"] = an_source;
        j["target"] = an_train_target ? std::string("training operator") : an_target;
        j["target_split"] = an_split;
        j["target_matrix"] = an_train_target ? "normalized training adjacency"
                                             : "symmetrized unnormalized 0/1 indicator of held-out edges";
        j["eigenvalues"] = signal.points.size();
        nlohmann::ordered_json fits = nlohmann::ordered_json::array();
        for (const auto& f : fit_report(signal, curves))
          fits.push_back({{"filter", std::string(to_string(f.kind))}, {"gain", f.gain}, {"residual", f.residual}});
        j["fits"] = fits;
        write_file(an_report, j.dump(2) + "\n");
      }
      return kOk;
    }
    if (selftest->parsed()) return run_selftest_command();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
