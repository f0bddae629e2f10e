#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace gegennet {

/// Row-major dense matrix used for features, embeddings and weights.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/**
 * Compressed sparse row matrix.
 *
 * Column indices are strictly increasing within each row and explicit zeros
 * are never stored. Instances are immutable after construction.
 */
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  /// Duplicate coordinates are summed; entries that sum to exactly zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  /// Entries with |v| <= drop_tol are not stored.
  static SparseMatrix from_dense(const DenseMatrix& dense, double drop_tol = 0.0);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t r) const;
  std::span<const double> row_values(std::size_t r) const;

  /// Stored value at (r, c) or 0.
  double coeff(std::size_t r, std::size_t c) const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::vector<Triplet> to_triplets() const;

  Vector row_sums() const;
  Vector col_sums() const;
  /// Gershgorin-style bound: max over rows of the absolute row sum.
  double max_abs_row_sum() const;

  /// diag(left) * this * diag(right); zero products are dropped.
  SparseMatrix scaled(const Vector& left, const Vector& right) const;
  SparseMatrix scaled(double factor) const;

  /// Bit-exact symmetry check (mirrored entries compare equal).
  bool is_symmetric() const;
  bool operator==(const SparseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// a + b (shapes must match).
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double b_scale = 1.0);

/// Sparse-dense product m * x. Each output row accumulates its stored entries
/// in increasing column order, so results are reproducible bit for bit.
DenseMatrix spmm(const SparseMatrix& m, const DenseMatrix& x);
void spmm_into(const SparseMatrix& m, const DenseMatrix& x, DenseMatrix& out);

/// Column-major variant used by the iterative solvers.
Eigen::MatrixXd spmm(const SparseMatrix& m, const Eigen::MatrixXd& x);

Vector spmv(const SparseMatrix& m, const Vector& x);

}  // namespace gegennet
