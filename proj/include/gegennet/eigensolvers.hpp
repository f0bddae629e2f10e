#pragma once

#include "gegennet/sparse.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gegennet {

/// Eigenvalues with one unit-norm eigenvector per column of `vectors`.
struct EigenPairs {
  Vector values;
  DenseMatrix vectors;
  /// ||M v_i - lambda_i v_i|| for each returned pair.
  Vector residuals;
};

struct SingularTriplets {
  Vector values;         ///< descending
  DenseMatrix left;      ///< rows(b) x d, orthonormal columns
  DenseMatrix right;     ///< cols(b) x d, implicit right vectors b^T u / sigma (zero when sigma == 0)
  Vector residuals;      ///< ||b b^T u_i - sigma_i^2 u_i||
};

struct SolverOptions {
  double tol = 1e-8;
  /// Restart budget; 0 selects 50 * d.
  std::size_t max_restarts = 0;
  /// Krylov basis size before a thick restart; 0 selects an automatic size.
  std::size_t max_basis = 0;
  std::uint64_t seed = 0x5eedULL;
};

/// Applies a symmetric operator to a block of column vectors.
using BlockOperator = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/**
 * Algebraically largest `count` eigenpairs of a symmetric operator by
 * thick-restarted block Lanczos with full reorthogonalization.
 *
 * The block width equals `count`, so eigenvalues of multiplicity up to
 * `count` are resolved without relying on rounding noise. Values are returned
 * in descending order. Throws NumericalError when the restart budget runs out.
 */
EigenPairs largest_eigenpairs(const BlockOperator& op, std::size_t n, std::size_t count,
                              const SolverOptions& opts = {});

/// The d algebraically smallest eigenpairs of a symmetric sparse matrix,
/// ascending. Runs Lanczos on (sigma I - m) with sigma the Gershgorin bound.
EigenPairs smallest_eigenpairs(const SparseMatrix& m, std::size_t d, const SolverOptions& opts = {});

/// Top-d singular triplets of b from the largest eigenpairs of b b^T, applied
/// matrix-free as b (b^T x).
SingularTriplets top_left_singular_vectors(const SparseMatrix& b, std::size_t d,
                                           const SolverOptions& opts = {});

/// Largest row count accepted by dense_eig.
inline constexpr std::size_t kDenseEigCeiling = 2000;

/// Full symmetric eigendecomposition, ascending values. Test and analysis oracle.
EigenPairs dense_eig(const DenseMatrix& m, std::size_t ceiling = kDenseEigCeiling);

/// Scales each column so its largest-magnitude entry is positive (first one on ties).
void normalize_column_signs(DenseMatrix& vectors);
void normalize_column_signs(Eigen::MatrixXd& vectors);

/// Frobenius distance between the orthogonal projectors onto span(a) and span(b).
double projector_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace gegennet
