#pragma once

#include "gegennet/sparse.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gegennet {

struct SignedEdge {
  std::size_t u;
  std::size_t v;
  int sign;  ///< +1 or -1
};

/**
 * Signed bipartite graph with partitions U and V.
 *
 * Node indices are dense and 0-based per partition. Each (u, v) pair appears
 * at most once, so the positive and negative edge sets are disjoint.
 */
struct SignedBipartiteGraph {
  std::size_t u_count = 0;
  std::size_t v_count = 0;
  std::vector<SignedEdge> edges;
  std::vector<std::string> u_labels;  ///< empty when the graph was not parsed from text
  std::vector<std::string> v_labels;

  std::size_t node_count() const { return u_count + v_count; }
  std::size_t positive_count() const;
  std::size_t negative_count() const;

  /// Throws DataError when an index is out of range, a sign is not +-1 or a pair repeats.
  void validate() const;
};

/// How sign tokens in the third column are interpreted.
struct EdgeListFormat {
  /// When set, the sign column is parsed as a number: value > midpoint maps to
  /// +1, value <= midpoint to -1. Otherwise only "1", "+1" and "-1" are accepted.
  std::optional<double> rating_midpoint;
  char comment = '#';
};

/// Parses whitespace-separated "u v sign" lines; identifiers are re-indexed per
/// partition in first-seen order. Errors carry the 1-based line number.
SignedBipartiteGraph parse_edge_list(std::istream& in, const EdgeListFormat& format = {});
SignedBipartiteGraph parse_edge_list(std::string_view text, const EdgeListFormat& format = {});
SignedBipartiteGraph load_edge_list(const std::string& path, const EdgeListFormat& format = {});

/// Train / validation / test partition of a graph's edge indices.
struct EdgeSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
};

/// Seeded Fisher-Yates permutation of the edge indices cut into
/// floor(r_train m), floor(r_val m) and the remainder.
EdgeSplit split_edges(const SignedBipartiteGraph& g, const std::array<double, 3>& ratios, std::uint64_t seed);
EdgeSplit split_edges(std::size_t edge_count, const std::array<double, 3>& ratios, std::uint64_t seed);

/// Bi-adjacency indicator matrices (u_count x v_count).
struct SignMatrices {
  SparseMatrix a_pos;
  SparseMatrix a_neg;
  SparseMatrix a_all;
};

SignMatrices build_sign_matrices(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset);
SignMatrices build_sign_matrices(const SignedBipartiteGraph& g);

/// [[0, b], [b^T, 0]] of shape (p+q) x (p+q).
SparseMatrix symmetrize(const SparseMatrix& b);

/// D^{-1/2} s D^{-1/2} with D the row sums of s; zero-degree rows and columns stay zero.
SparseMatrix normalize_adjacency(const SparseMatrix& s);

/// D - s with D the row sums of s.
SparseMatrix laplacian(const SparseMatrix& s);

/// Signed Laplacian D_abs - s for a signed symmetric s, D_abs the absolute row sums.
SparseMatrix signed_laplacian(const SparseMatrix& s);

/// Row- and column-L2-normalized copies of a bi-adjacency matrix.
struct CosineBlocks {
  SparseMatrix row_normalized;     ///< B^(r), p x q
  SparseMatrix column_normalized;  ///< B^(c), p x q
  SparseMatrix block;              ///< [[0, B^(r)], [B^(c)^T, 0]], (p+q) x (p+q)
};

CosineBlocks cosine_blocks(const SparseMatrix& a);
SparseMatrix cosine_block_matrix(const SparseMatrix& a);

}  // namespace gegennet
