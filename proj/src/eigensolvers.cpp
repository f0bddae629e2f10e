#include "gegennet/eigensolvers.hpp"

#include "gegennet/error.hpp"
#include "gegennet/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace gegennet {

namespace {

Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

// Orthonormalizes the columns of `block` against `basis` and each other,
// replacing (numerically) dependent columns with random directions. Columns
// are dropped once the basis spans the whole space.
Eigen::MatrixXd orthonormalize_block(const Eigen::MatrixXd& block, const Eigen::MatrixXd& basis, Rng& rng) {
  const Eigen::Index n = block.rows();
  const Eigen::Index room = n - basis.cols();
  Eigen::MatrixXd out(n, std::min<Eigen::Index>(block.cols(), std::max<Eigen::Index>(room, 0)));
  // Project the whole block against the basis first so the bulk of the work
  // is matrix-matrix products.
  Eigen::MatrixXd work = block;
  if (basis.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) work.noalias() -= basis * (basis.transpose() * work);
  }
  Eigen::Index accepted = 0;
  for (Eigen::Index j = 0; j < work.cols() && accepted < out.cols(); ++j) {
    Eigen::VectorXd v = work.col(j);
    double original = block.col(j).norm();
    for (int attempt = 0; attempt < 4; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        if (attempt > 0 && basis.cols() > 0) v.noalias() -= basis * (basis.transpose() * v);
        if (accepted > 0) v.noalias() -= out.leftCols(accepted) * (out.leftCols(accepted).transpose() * v);
      }
      const double remaining = v.norm();
      if (original > 0.0 && remaining > 1e-10 * original) {
        out.col(accepted++) = v / remaining;
        break;
      }
      v = random_unit_vector(n, rng);
      original = v.norm();
    }
  }
  return out.leftCols(accepted);
}

std::size_t default_basis_size(std::size_t n, std::size_t count) {
  const std::size_t wanted = std::max<std::size_t>(6 * count, count + 368);
  return std::min(n, wanted);
}

template <typename Matrix>
void normalize_signs_impl(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors.rows() > 0 && vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

}  // namespace

void normalize_column_signs(DenseMatrix& vectors) { normalize_signs_impl(vectors); }
void normalize_column_signs(Eigen::MatrixXd& vectors) { normalize_signs_impl(vectors); }

namespace {

EigenPairs largest_impl(const BlockOperator& op, std::size_t n, std::size_t count, const SolverOptions& opts) {
  if (count > n) throw ConfigError("requested " + std::to_string(count) + " eigenpairs of an operator of size " + std::to_string(n));
  EigenPairs result;
  if (count == 0) {
    result.values.resize(0);
    result.vectors.resize(static_cast<Eigen::Index>(n), 0);
    result.residuals.resize(0);
    return result;
  }

  const auto k = static_cast<Eigen::Index>(count);
  const auto dim = static_cast<Eigen::Index>(n);
  const Eigen::Index block = k;
  auto max_basis = static_cast<Eigen::Index>(opts.max_basis ? std::min(opts.max_basis, n) : default_basis_size(n, count));
  max_basis = std::max(max_basis, std::min<Eigen::Index>(dim, 2 * k));
  const std::size_t restart_budget = opts.max_restarts ? opts.max_restarts : 50 * count;

  Rng rng(opts.seed);
  Eigen::MatrixXd basis(dim, 0);
  Eigen::MatrixXd image(dim, 0);
  Eigen::MatrixXd start(dim, block);
  for (Eigen::Index c = 0; c < block; ++c) start.col(c) = random_unit_vector(dim, rng);
  Eigen::MatrixXd pending = orthonormalize_block(start, basis, rng);

  Eigen::VectorXd theta;
  Eigen::MatrixXd ritz;
  Eigen::VectorXd residuals;
  for (std::size_t restarts = 0;; ++restarts) {
    // Grow the block Krylov basis until it is full.
    while (pending.cols() > 0) {
      const Eigen::Index p0 = basis.cols();
      const Eigen::Index q = pending.cols();
      basis.conservativeResize(Eigen::NoChange, p0 + q);
      basis.rightCols(q) = pending;
      const Eigen::MatrixXd applied = op(pending);
      image.conservativeResize(Eigen::NoChange, p0 + q);
      image.rightCols(q) = applied;
      // A partial block is only taken when it completes the whole space; a
      // truncated block elsewhere breaks the Krylov structure used on restart.
      const Eigen::Index room = max_basis - basis.cols();
      if (room <= 0 || (room < block && max_basis < dim)) {
        pending.resize(dim, 0);
        break;
      }
      pending = orthonormalize_block(applied, basis, rng);
      if (pending.cols() > room) pending = pending.leftCols(room).eval();
    }

    // Rayleigh-Ritz on the current basis.
    const Eigen::Index p = basis.cols();
    Eigen::MatrixXd projected = basis.transpose() * image;
    projected = 0.5 * (projected + projected.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(projected);
    const Eigen::Index take = std::min(k, p);
    // Ascending from Eigen; reverse into descending order.
    const Eigen::MatrixXd coeffs = small.eigenvectors().rightCols(take).rowwise().reverse();
    theta = small.eigenvalues().tail(take).reverse();
    ritz = basis * coeffs;
    const Eigen::MatrixXd resid = image * coeffs - ritz * theta.asDiagonal();
    residuals = resid.colwise().norm().transpose();

    if (take == k && (residuals.array() <= opts.tol).all()) break;
    if (p == dim && take == k) break;  // the basis spans the space: the Ritz pairs are exact up to rounding
    if (restarts >= restart_budget) {
      std::ostringstream msg;
      msg << "eigensolver did not converge after " << restart_budget << " restarts; max residual "
          << residuals.maxCoeff() << " (tol " << opts.tol << ")";
      throw NumericalError(msg.str());
    }

    // Thick restart: keep the leading Ritz vectors and continue from the
    // residuals of the wanted ones, which extend the Krylov space.
    const Eigen::Index keep = std::min({p, 2 * k, std::max(k, max_basis - k)});
    const Eigen::MatrixXd kept = small.eigenvectors().rightCols(keep);
    basis = (basis * kept).eval();
    image = (image * kept).eval();
    pending = orthonormalize_block(resid, basis, rng);
    if (pending.cols() > max_basis - keep) pending = pending.leftCols(std::max<Eigen::Index>(max_basis - keep, 1)).eval();
    if (pending.cols() == 0) {
      if (take == k) break;
      throw NumericalError("Krylov space exhausted before reaching the requested eigenpairs");
    }
  }

  normalize_signs_impl(ritz);
  result.values = theta;
  result.vectors = ritz;
  result.residuals = residuals;
  return result;
}

}  // namespace

EigenPairs largest_eigenpairs(const BlockOperator& op, std::size_t n, std::size_t count, const SolverOptions& opts) {
  return largest_impl(op, n, count, opts);
}

EigenPairs smallest_eigenpairs(const SparseMatrix& m, std::size_t d, const SolverOptions& opts) {
  if (m.rows() != m.cols()) throw ConfigError("smallest_eigenpairs needs a square matrix");
  if (d > m.rows()) throw ConfigError("d exceeds the matrix dimension");
  const double shift = m.max_abs_row_sum();
  BlockOperator op = [&m, shift](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd y = shift * x;
    y.noalias() -= spmm(m, x);
    return y;
  };
  EigenPairs shifted = largest_impl(op, m.rows(), d, opts);
  EigenPairs out;
  out.values = (shift - shifted.values.array()).matrix();
  out.vectors = shifted.vectors;
  out.residuals = shifted.residuals;
  return out;
}

SingularTriplets top_left_singular_vectors(const SparseMatrix& b, std::size_t d, const SolverOptions& opts) {
  if (d > std::min(b.rows(), b.cols()))
    throw ConfigError("d = " + std::to_string(d) + " exceeds min(rows, cols) of a " + std::to_string(b.rows()) +
                      "x" + std::to_string(b.cols()) + " matrix");
  const SparseMatrix bt = b.transpose();
  BlockOperator op = [&b, &bt](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return spmm(b, spmm(bt, x)); };
  EigenPairs gram = largest_eigenpairs(op, b.rows(), d, opts);

  SingularTriplets out;
  out.values = gram.values.array().max(0.0).sqrt().matrix();
  out.left = gram.vectors;
  out.residuals = gram.residuals;
  out.right = spmm(bt, out.left);
  for (Eigen::Index i = 0; i < out.right.cols(); ++i) {
    const double s = out.values[i];
    if (s > 0.0) out.right.col(i) /= s;
    else out.right.col(i).setZero();
  }
  return out;
}

EigenPairs dense_eig(const DenseMatrix& m, std::size_t ceiling) {
  if (m.rows() != m.cols()) throw ConfigError("dense_eig needs a square matrix");
  if (static_cast<std::size_t>(m.rows()) > ceiling)
    throw ConfigError("dense_eig: " + std::to_string(m.rows()) + " rows exceeds the ceiling of " + std::to_string(ceiling));
  if (!m.allFinite()) throw NumericalError("dense_eig: non-finite input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ConfigError("dense_eig: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("dense_eig: decomposition failed");
  EigenPairs out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  normalize_column_signs(out.vectors);
  out.residuals = (m * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
  return out;
}

double projector_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ConfigError("projector_distance: row mismatch");
  // For orthonormal a, b: ||P_a - P_b||_F^2 = ||(I - P_b) a||_F^2 + ||(I - P_a) b||_F^2,
  // which keeps its accuracy when the subspaces nearly coincide.
  const DenseMatrix ra = a - b * (b.transpose() * a);
  const DenseMatrix rb = b - a * (a.transpose() * b);
  return std::sqrt(ra.squaredNorm() + rb.squaredNorm());
}

}  // namespace gegennet
