#include "gegennet/graph.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gegennet {

namespace {

std::uint64_t pair_key(std::size_t u, std::size_t v) {
  return (static_cast<std::uint64_t>(u) << 32) ^ static_cast<std::uint64_t>(v);
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& why) {
  throw DataError("line " + std::to_string(line_no) + ": " + why);
}

int parse_sign(const std::string& token, const EdgeListFormat& format, std::size_t line_no) {
  if (format.rating_midpoint) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !std::isfinite(value))
      fail_line(line_no, "rating '" + token + "' is not a number");
    return value > *format.rating_midpoint ? 1 : -1;
  }
  if (token == "1" || token == "+1") return 1;
  if (token == "-1") return -1;
  fail_line(line_no, "sign token '" + token + "' is not one of 1, +1, -1");
}

std::size_t intern(std::unordered_map<std::string, std::size_t>& index, std::vector<std::string>& labels,
                   const std::string& id) {
  const auto [it, inserted] = index.emplace(id, labels.size());
  if (inserted) labels.push_back(id);
  return it->second;
}

}  // namespace

std::size_t SignedBipartiteGraph::positive_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.sign > 0 ? 1 : 0;
  return n;
}

std::size_t SignedBipartiteGraph::negative_count() const { return edges.size() - positive_count(); }

void SignedBipartiteGraph::validate() const {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.u >= u_count || e.v >= v_count)
      throw DataError("edge " + std::to_string(i) + " references a node outside the partitions");
    if (e.sign != 1 && e.sign != -1) throw DataError("edge " + std::to_string(i) + " has sign " + std::to_string(e.sign));
    if (!seen.insert(pair_key(e.u, e.v)).second)
      throw DataError("edge " + std::to_string(i) + " duplicates an earlier (u, v) pair");
  }
}

SignedBipartiteGraph parse_edge_list(std::istream& in, const EdgeListFormat& format) {
  SignedBipartiteGraph g;
  std::unordered_map<std::string, std::size_t> u_index;
  std::unordered_map<std::string, std::size_t> v_index;
  std::unordered_map<std::uint64_t, std::size_t> first_line;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find(format.comment); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(std::move(tok));
    if (tokens.empty()) continue;
    if (tokens.size() != 3)
      fail_line(line_no, "expected 'u v sign', found " + std::to_string(tokens.size()) + " fields");

    const int sign = parse_sign(tokens[2], format, line_no);
    const std::size_t u = intern(u_index, g.u_labels, tokens[0]);
    const std::size_t v = intern(v_index, g.v_labels, tokens[1]);
    const auto [it, inserted] = first_line.emplace(pair_key(u, v), line_no);
    if (!inserted)
      fail_line(line_no, "duplicate edge (" + tokens[0] + ", " + tokens[1] + "), first seen on line " +
                             std::to_string(it->second));
    g.edges.push_back({u, v, sign});
  }
  if (in.bad()) throw DataError("read error after line " + std::to_string(line_no));
  g.u_count = g.u_labels.size();
  g.v_count = g.v_labels.size();
  return g;
}

SignedBipartiteGraph parse_edge_list(std::string_view text, const EdgeListFormat& format) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, format);
}

SignedBipartiteGraph load_edge_list(const std::string& path, const EdgeListFormat& format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list '" + path + "'");
  try {
    return parse_edge_list(in, format);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

EdgeSplit split_edges(std::size_t m, const std::array<double, 3>& ratios, std::uint64_t seed) {
  for (double r : ratios)
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1 (got " + std::to_string(total) + ")");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // The epsilon keeps products like 0.7 * 10 from flooring to 6.
  const auto count = [m](double r) {
    return std::min(m, static_cast<std::size_t>(std::floor(r * static_cast<double>(m) + 1e-9)));
  };
  const std::size_t n_train = count(ratios[0]);
  const std::size_t n_val = std::min(m - n_train, count(ratios[1]));

  EdgeSplit split;
  split.seed = seed;
  split.ratios = ratios;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                          order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return split;
}

EdgeSplit split_edges(const SignedBipartiteGraph& g, const std::array<double, 3>& ratios, std::uint64_t seed) {
  return split_edges(g.edges.size(), ratios, seed);
}

SignMatrices build_sign_matrices(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset) {
  std::vector<Triplet> pos;
  std::vector<Triplet> neg;
  std::vector<Triplet> all;
  for (std::size_t idx : subset) {
    if (idx >= g.edges.size()) throw ConfigError("edge index " + std::to_string(idx) + " out of range");
    const auto& e = g.edges[idx];
    (e.sign > 0 ? pos : neg).push_back({e.u, e.v, 1.0});
    all.push_back({e.u, e.v, 1.0});
  }
  SignMatrices out{SparseMatrix::from_triplets(g.u_count, g.v_count, std::move(pos)),
                   SparseMatrix::from_triplets(g.u_count, g.v_count, std::move(neg)),
                   SparseMatrix::from_triplets(g.u_count, g.v_count, std::move(all))};
  // A repeated index would sum to 2 and break the 0/1 contract.
  for (double v : out.a_all.values())
    if (v != 1.0) throw ConfigError("edge subset contains a repeated index");
  return out;
}

SignMatrices build_sign_matrices(const SignedBipartiteGraph& g) {
  std::vector<std::size_t> all(g.edges.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_sign_matrices(g, all);
}

SparseMatrix symmetrize(const SparseMatrix& b) {
  const std::size_t p = b.rows();
  const std::size_t n = p + b.cols();
  std::vector<Triplet> t;
  t.reserve(2 * b.nnz());
  for (const auto& e : b.to_triplets()) {
    t.push_back({e.row, p + e.col, e.value});
    t.push_back({p + e.col, e.row, e.value});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix normalize_adjacency(const SparseMatrix& s) {
  if (s.rows() != s.cols()) throw ConfigError("normalize_adjacency needs a square matrix");
  const Vector degree = s.row_sums();
  Vector inv_sqrt(degree.size());
  for (Eigen::Index i = 0; i < degree.size(); ++i) inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
  return s.scaled(inv_sqrt, inv_sqrt);
}

SparseMatrix laplacian(const SparseMatrix& s) {
  if (s.rows() != s.cols()) throw ConfigError("laplacian needs a square matrix");
  const Vector degree = s.row_sums();
  std::vector<Triplet> t;
  t.reserve(s.nnz() + s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) t.push_back({i, i, degree[static_cast<Eigen::Index>(i)]});
  for (const auto& e : s.to_triplets()) t.push_back({e.row, e.col, -e.value});
  return SparseMatrix::from_triplets(s.rows(), s.cols(), std::move(t));
}

SparseMatrix signed_laplacian(const SparseMatrix& s) {
  if (s.rows() != s.cols()) throw ConfigError("signed_laplacian needs a square matrix");
  std::vector<Triplet> t;
  Vector degree = Vector::Zero(static_cast<Eigen::Index>(s.rows()));
  for (const auto& e : s.to_triplets()) {
    degree[static_cast<Eigen::Index>(e.row)] += std::abs(e.value);
    t.push_back({e.row, e.col, -e.value});
  }
  for (std::size_t i = 0; i < s.rows(); ++i) t.push_back({i, i, degree[static_cast<Eigen::Index>(i)]});
  return SparseMatrix::from_triplets(s.rows(), s.cols(), std::move(t));
}

CosineBlocks cosine_blocks(const SparseMatrix& a) {
  Vector row_norm = Vector::Zero(static_cast<Eigen::Index>(a.rows()));
  Vector col_norm = Vector::Zero(static_cast<Eigen::Index>(a.cols()));
  for (const auto& e : a.to_triplets()) {
    row_norm[static_cast<Eigen::Index>(e.row)] += e.value * e.value;
    col_norm[static_cast<Eigen::Index>(e.col)] += e.value * e.value;
  }
  const auto invert = [](Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = v[i] > 0.0 ? 1.0 / std::sqrt(v[i]) : 0.0;
  };
  invert(row_norm);
  invert(col_norm);

  CosineBlocks out;
  out.row_normalized = a.scaled(row_norm, Vector::Ones(static_cast<Eigen::Index>(a.cols())));
  out.column_normalized = a.scaled(Vector::Ones(static_cast<Eigen::Index>(a.rows())), col_norm);

  const std::size_t p = a.rows();
  const std::size_t n = p + a.cols();
  std::vector<Triplet> t;
  t.reserve(2 * a.nnz());
  for (const auto& e : out.row_normalized.to_triplets()) t.push_back({e.row, p + e.col, e.value});
  for (const auto& e : out.column_normalized.to_triplets()) t.push_back({p + e.col, e.row, e.value});
  out.block = SparseMatrix::from_triplets(n, n, std::move(t));
  return out;
}

SparseMatrix cosine_block_matrix(const SparseMatrix& a) { return cosine_blocks(a).block; }

}  // namespace gegennet
