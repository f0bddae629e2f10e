#include "gegennet/model.hpp"

#include "gegennet/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gegennet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("config key '" + key + "': '" + v + "' is not a finite number");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void ModelConfig::validate() const {
  const auto fail = [](const std::string& why) { throw ConfigError("invalid config: " + why); };
  if (layers < 1) fail("layers must be >= 1");
  if (embed_dim < 1) fail("embed_dim must be >= 1");
  if (d < 1) fail("d must be >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) fail("mu must lie in [0, 1]");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (patience < 1) fail("patience must be >= 1");
  if (!std::isfinite(delta)) fail("delta must be finite");
  if (!(solver_tol > 0.0)) fail("solver_tol must be positive");
  for (double r : ratios)
    if (!(r >= 0.0)) fail("split ratios must be non-negative");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) fail("split ratios must sum to 1");
  gegenbauer().validate(layers);
}

ModelConfig parse_config(std::string_view text) {
  ModelConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(body).substr(eq + 1)));
    if (!seen.insert(key).second) throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");

    if (key == "layers") c.layers = static_cast<int>(parse_int(key, value));
    else if (key == "embed_dim") c.embed_dim = static_cast<int>(parse_int(key, value));
    else if (key == "alpha") c.alpha = parse_double(key, value);
    else if (key == "delta") c.delta = parse_double(key, value);
    else if (key == "mu") c.mu = parse_double(key, value);
    else if (key == "d") c.d = static_cast<int>(parse_int(key, value));
    else if (key == "dropout") c.dropout = parse_double(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_double(key, value);
    else if (key == "weight_decay") c.weight_decay = parse_double(key, value);
    else if (key == "max_epochs") c.max_epochs = static_cast<int>(parse_int(key, value));
    else if (key == "patience") c.patience = static_cast<int>(parse_int(key, value));
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "first_order_coefficient") c.first_order_coefficient = parse_first_order_coefficient(value);
    else if (key == "features") {
      if (value == "spectral") c.features = FeatureSource::spectral;
      else if (value == "random") c.features = FeatureSource::random;
      else throw ConfigError("config key 'features': expected spectral or random, got '" + value + "'");
    } else if (key == "signed_laplacian") c.signed_laplacian = parse_bool(key, value);
    else if (key == "positive_branch") c.positive_branch = parse_bool(key, value);
    else if (key == "negative_branch") c.negative_branch = parse_bool(key, value);
    else if (key == "train_ratio") c.ratios[0] = parse_double(key, value);
    else if (key == "validation_ratio") c.ratios[1] = parse_double(key, value);
    else if (key == "test_ratio") c.ratios[2] = parse_double(key, value);
    else if (key == "solver_tol") c.solver_tol = parse_double(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_config(const ModelConfig& c) {
  std::ostringstream o;
  o << "layers = " << c.layers << '\n'
    << "embed_dim = " << c.embed_dim << '\n'
    << "alpha = " << fmt(c.alpha) << '\n'
    << "delta = " << fmt(c.delta) << '\n'
    << "mu = " << fmt(c.mu) << '\n'
    << "d = " << c.d << '\n'
    << "dropout = " << fmt(c.dropout) << '\n'
    << "learning_rate = " << fmt(c.learning_rate) << '\n'
    << "weight_decay = " << fmt(c.weight_decay) << '\n'
    << "max_epochs = " << c.max_epochs << '\n'
    << "patience = " << c.patience << '\n'
    << "seed = " << c.seed << '\n'
    << "first_order_coefficient = \"" << to_string(c.first_order_coefficient) << "\"\n"
    << "features = \"" << to_string(c.features) << "\"\n"
    << "signed_laplacian = " << (c.signed_laplacian ? "true" : "false") << '\n'
    << "positive_branch = " << (c.positive_branch ? "true" : "false") << '\n'
    << "negative_branch = " << (c.negative_branch ? "true" : "false") << '\n'
    << "train_ratio = " << fmt(c.ratios[0]) << '\n'
    << "validation_ratio = " << fmt(c.ratios[1]) << '\n'
    << "test_ratio = " << fmt(c.ratios[2]) << '\n'
    << "solver_tol = " << fmt(c.solver_tol) << '\n';
  return o.str();
}

std::string config_hash(const ModelConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : format_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gegennet
