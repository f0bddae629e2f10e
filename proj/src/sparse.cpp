#include "gegennet/sparse.hpp"

#include "gegennet/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gegennet {

namespace {

void require_shape(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("shape mismatch: ") + what);
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw ConfigError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                        ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      const std::size_t c = triplets[i].col;
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
        v += triplets[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense, double drop_tol) {
  SparseMatrix m(static_cast<std::size_t>(dense.rows()), static_cast<std::size_t>(dense.cols()));
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      const double v = dense(r, c);
      if (std::abs(v) > drop_tol && v != 0.0) {
        m.col_idx_.push_back(static_cast<std::size_t>(c));
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[static_cast<std::size_t>(r) + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.col_idx_.resize(n);
  m.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx_[i] = i;
    m.row_ptr_[i + 1] = i + 1;
  }
  return m;
}

std::span<const std::size_t> SparseMatrix::row_cols(std::size_t r) const {
  return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
  return std::span<const double>(values_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

double SparseMatrix::coeff(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<std::size_t> counts(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++counts[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) counts[c + 1] += counts[c];
  t.row_ptr_ = counts;
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::size_t> next(counts.begin(), counts.end() - 1);
  // Rows are visited in order, so each transposed row receives increasing columns.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = r;
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
  return d;
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
  return out;
}

Vector SparseMatrix::row_sums() const {
  Vector s = Vector::Zero(static_cast<Eigen::Index>(rows_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s[static_cast<Eigen::Index>(r)] += values_[k];
  return s;
}

Vector SparseMatrix::col_sums() const {
  Vector s = Vector::Zero(static_cast<Eigen::Index>(cols_));
  for (std::size_t k = 0; k < nnz(); ++k) s[static_cast<Eigen::Index>(col_idx_[k])] += values_[k];
  return s;
}

double SparseMatrix::max_abs_row_sum() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

SparseMatrix SparseMatrix::scaled(const Vector& left, const Vector& right) const {
  require_shape(static_cast<std::size_t>(left.size()) == rows_ &&
                    static_cast<std::size_t>(right.size()) == cols_,
                "scaling vectors");
  SparseMatrix m(rows_, cols_);
  m.col_idx_.reserve(nnz());
  m.values_.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      // Scale factor first: keeps diag(w) s diag(w) bit-exactly symmetric.
      const double v = (left[static_cast<Eigen::Index>(r)] * right[static_cast<Eigen::Index>(col_idx_[k])]) *
                       values_[k];
      if (v != 0.0) {
        m.col_idx_.push_back(col_idx_[k]);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  if (factor == 0.0) return SparseMatrix(rows_, cols_);
  SparseMatrix m = *this;
  for (double& v : m.values_) v *= factor;
  return m;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (coeff(col_idx_[k], r) != values_[k]) return false;
  return true;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double b_scale) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  std::vector<Triplet> t = a.to_triplets();
  for (const auto& e : b.to_triplets()) t.push_back({e.row, e.col, b_scale * e.value});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

void spmm_into(const SparseMatrix& m, const DenseMatrix& x, DenseMatrix& out) {
  require_shape(static_cast<std::size_t>(x.rows()) == m.cols(), "spmm");
  out.setZero(static_cast<Eigen::Index>(m.rows()), x.cols());
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto dst = out.row(static_cast<Eigen::Index>(r));
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) dst.noalias() += val[k] * x.row(static_cast<Eigen::Index>(idx[k]));
  }
}

DenseMatrix spmm(const SparseMatrix& m, const DenseMatrix& x) {
  DenseMatrix out;
  spmm_into(m, x, out);
  return out;
}

Eigen::MatrixXd spmm(const SparseMatrix& m, const Eigen::MatrixXd& x) {
  require_shape(static_cast<std::size_t>(x.rows()) == m.cols(), "spmm");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()), x.cols());
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double* src = x.col(c).data();
    double* dst = out.col(c).data();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) acc += val[k] * src[idx[k]];
      dst[r] = acc;
    }
  }
  return out;
}

Vector spmv(const SparseMatrix& m, const Vector& x) {
  require_shape(static_cast<std::size_t>(x.size()) == m.cols(), "spmv");
  Vector out(static_cast<Eigen::Index>(m.rows()));
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) acc += val[k] * x[static_cast<Eigen::Index>(idx[k])];
    out[static_cast<Eigen::Index>(r)] = acc;
  }
  return out;
}

}  // namespace gegennet
