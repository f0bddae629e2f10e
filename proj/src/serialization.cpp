#include "gegennet/serialization.hpp"

#include "gegennet/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gegennet {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t magic_word(const char (&tag)[9]) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(tag[i]);
  return v;
}

constexpr std::uint64_t kFeatureMagic = magic_word("GEGNFEAT");
constexpr std::uint64_t kCheckpointMagic = magic_word("GEGNCKPT");

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot open '" + path + "' for writing");
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void text(std::string_view s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void finish() {
    out_.flush();
    if (!out_) throw DataError("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open '" + path + "'");
  }
  std::uint64_t u64() {
    unsigned char b[8];
    if (!in_.read(reinterpret_cast<char*>(b), 8)) fail("truncated file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string text(std::size_t limit = 1 << 20) {
    const std::uint64_t n = u64();
    if (n > limit) fail("string field too long");
    std::string s(n, '\0');
    if (n > 0 && !in_.read(s.data(), static_cast<std::streamsize>(n))) fail("truncated file");
    return s;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& why) { throw DataError(path_ + ": " + why); }

 private:
  std::string path_;
  std::ifstream in_;
};

std::vector<std::size_t> index_list(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw DataError(std::string("manifest: missing array '") + key + "'");
  std::vector<std::size_t> out;
  out.reserve(j[key].size());
  for (const auto& v : j[key]) {
    if (!v.is_number_unsigned()) throw DataError(std::string("manifest: '") + key + "' holds a non-index value");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t graph_hash(const SignedBipartiteGraph& g) {
  std::ostringstream o;
  o << g.u_count << ' ' << g.v_count << '\n';
  for (const auto& e : g.edges) o << e.u << ' ' << e.v << ' ' << e.sign << '\n';
  return fnv1a64(o.str());
}

std::uint64_t split_hash(const EdgeSplit& split) { return fnv1a64(split_to_json(split)); }

std::string split_to_json(const EdgeSplit& split) {
  ordered_json j;
  j["seed"] = split.seed;
  j["ratios"] = split.ratios;
  j["train"] = split.train;
  j["validation"] = split.validation;
  j["test"] = split.test;
  return j.dump() + "\n";
}

EdgeSplit split_from_json(std::string_view text, std::optional<std::size_t> edge_count) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("manifest must be a JSON object");
  EdgeSplit s;
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) throw DataError("manifest: missing unsigned 'seed'");
  s.seed = j["seed"].get<std::uint64_t>();
  if (!j.contains("ratios") || !j["ratios"].is_array() || j["ratios"].size() != 3)
    throw DataError("manifest: 'ratios' must be an array of three numbers");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j["ratios"][i].is_number()) throw DataError("manifest: 'ratios' must be numeric");
    s.ratios[i] = j["ratios"][i].get<double>();
  }
  s.train = index_list(j, "train");
  s.validation = index_list(j, "validation");
  s.test = index_list(j, "test");

  const std::size_t total = s.train.size() + s.validation.size() + s.test.size();
  const std::size_t m = edge_count.value_or(total);
  if (total != m)
    throw DataError("manifest covers " + std::to_string(total) + " edges but the graph has " + std::to_string(m));
  std::vector<char> seen(m, 0);
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (std::size_t i : *part) {
      if (i >= m) throw DataError("manifest index " + std::to_string(i) + " is out of range");
      if (seen[i]) throw DataError("manifest index " + std::to_string(i) + " appears twice");
      seen[i] = 1;
    }
  }
  return s;
}

void save_split(const std::string& path, const EdgeSplit& split) { write_file(path, split_to_json(split)); }

EdgeSplit load_split(const std::string& path, std::optional<std::size_t> edge_count) {
  try {
    return split_from_json(read_file(path), edge_count);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_feature_cache(const std::string& path, const SpectralFeatures& f, const FeatureCacheKey& key) {
  if (f.phi.rows() != f.psi.rows() || f.phi.cols() != f.psi.cols()) throw ConfigError("feature cache: phi/psi shapes differ");
  Writer w(path);
  w.u64(kFeatureMagic);
  w.u64(kFeatureCacheVersion);
  w.u64(static_cast<std::uint64_t>(f.phi.rows()));
  w.u64(static_cast<std::uint64_t>(2 * f.phi.cols()));
  w.u64(static_cast<std::uint64_t>(f.phi.cols()));
  w.f64(f.mu);
  w.u64(key.dataset_hash);
  w.u64(key.split_hash);
  for (Eigen::Index r = 0; r < f.phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.phi.cols(); ++c) w.f64(f.phi(r, c));
    for (Eigen::Index c = 0; c < f.psi.cols(); ++c) w.f64(f.psi(r, c));
  }
  w.finish();
}

SpectralFeatures load_feature_cache(const std::string& path, FeatureCacheKey* key_out,
                                    const std::optional<FeatureCacheKey>& expected) {
  Reader r(path);
  if (r.u64() != kFeatureMagic) r.fail("not a feature cache");
  if (const auto v = r.u64(); v != kFeatureCacheVersion) r.fail("unsupported feature cache version " + std::to_string(v));
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  const std::uint64_t d = r.u64();
  const double mu = r.f64();
  FeatureCacheKey key{r.u64(), r.u64()};
  if (cols != 2 * d || rows > (1ULL << 32) || d > (1ULL << 16)) r.fail("inconsistent header");
  if (!(mu >= 0.0 && mu <= 1.0)) r.fail("mu outside [0, 1]");
  if (expected && (expected->dataset_hash != key.dataset_hash || expected->split_hash != key.split_hash))
    r.fail("cache was built for a different dataset or split");
  DenseMatrix phi(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  DenseMatrix psi(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index c = 0; c < phi.cols(); ++c) phi(i, c) = r.f64();
    for (Eigen::Index c = 0; c < psi.cols(); ++c) psi(i, c) = r.f64();
  }
  r.expect_end();
  if (!phi.allFinite() || !psi.allFinite()) r.fail("non-finite feature values");
  if (key_out) *key_out = key;
  return combine_features(std::move(phi), std::move(psi), mu);
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  Writer w(path);
  w.u64(kCheckpointMagic);
  w.u64(kCheckpointVersion);
  w.u64(ckpt.dataset_hash);
  w.text(format_config(ckpt.config));
  w.u64(static_cast<std::uint64_t>(ckpt.params.w0.rows()));
  const auto tensors = ckpt.params.tensors();
  w.u64(tensors.size());
  for (const auto& [name, t] : tensors) {
    w.text(name);
    w.u64(static_cast<std::uint64_t>(t->rows()));
    w.u64(static_cast<std::uint64_t>(t->cols()));
    for (Eigen::Index i = 0; i < t->size(); ++i) w.f64(t->data()[i]);
  }
  w.finish();
}

Checkpoint load_checkpoint(const std::string& path) {
  Reader r(path);
  if (r.u64() != kCheckpointMagic) r.fail("not a checkpoint");
  if (const auto v = r.u64(); v != kCheckpointVersion) r.fail("unsupported checkpoint version " + std::to_string(v));
  Checkpoint c;
  c.dataset_hash = r.u64();
  try {
    c.config = parse_config(r.text());
  } catch (const ConfigError& e) {
    r.fail(std::string("embedded config: ") + e.what());
  }
  const std::uint64_t input_dim = r.u64();
  if (input_dim == 0 || input_dim > (1ULL << 20)) r.fail("implausible input dimension");
  c.params = init_params(c.config, input_dim, 0);
  auto tensors = c.params.tensors();
  if (r.u64() != tensors.size()) r.fail("tensor count does not match the embedded config");
  for (auto& [name, t] : tensors) {
    if (r.text(256) != name) r.fail("unexpected tensor, wanted '" + name + "'");
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows != static_cast<std::uint64_t>(t->rows()) || cols != static_cast<std::uint64_t>(t->cols()))
      r.fail("tensor '" + name + "' has the wrong shape");
    for (Eigen::Index i = 0; i < t->size(); ++i) t->data()[i] = r.f64();
    if (!t->allFinite()) r.fail("tensor '" + name + "' holds non-finite values");
  }
  r.expect_end();
  return c;
}

std::string metrics_to_json(const MetricsRecord& rec) {
  ordered_json j;
  j["dataset"] = rec.dataset;
  j["seed"] = rec.seed;
  j["config_hash"] = rec.config_hash;
  j["auc"] = number_or_null(rec.metrics.auc);
  j["macro_f1"] = number_or_null(rec.metrics.macro_f1);
  j["f1_positive"] = number_or_null(rec.metrics.f1_positive);
  j["f1_negative"] = number_or_null(rec.metrics.f1_negative);
  j["epochs_run"] = rec.epochs_run;
  j["best_epoch"] = rec.best_epoch;
  j["wall_seconds"] = rec.wall_seconds ? ordered_json(*rec.wall_seconds) : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string history_line(const EpochRecord& rec) {
  ordered_json j;
  j["epoch"] = rec.epoch;
  j["train_loss"] = number_or_null(rec.train_loss);
  j["val_auc"] = number_or_null(rec.val_auc);
  j["val_macro_f1"] = number_or_null(rec.val_macro_f1);
  return j.dump() + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace gegennet
