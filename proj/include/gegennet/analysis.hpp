#pragma once

#include "gegennet/filters.hpp"
#include "gegennet/graph.hpp"

#include <ostream>
#include <vector>

namespace gegennet {

struct SignalPoint {
  double lambda;
  double rayleigh;  ///< u^T Y u for the unit eigenvector u of lambda
};

struct SpectralSignal {
  int source_sign = 1;
  int target_sign = 1;
  std::vector<SignalPoint> points;  ///< ascending lambda
};

/// Full eigendecomposition of `a_train_hat` and the quadratic form of each
/// eigenvector against `y_heldout`.
SpectralSignal spectral_signal(const SparseMatrix& a_train_hat, const SparseMatrix& y_heldout,
                               std::size_t ceiling = 2000);

/// Symmetrized, unnormalized 0/1 indicator of the `sign` edges in `subset`.
SparseMatrix heldout_indicator(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset, int sign);

/// Normalized symmetrized adjacency of the `sign` edges in `subset`.
SparseMatrix signed_operator(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset, int sign);

struct CurveFit {
  FilterKind kind;
  double gain = 0.0;      ///< least-squares amplitude applied to the curve
  double residual = 0.0;  ///< sum of squared residuals after scaling
};

/// Compares curves to the signal up to amplitude: each curve is read at the
/// nearest sample to every signal lambda, scaled by the least-squares gain and
/// scored by the sum of squared residuals. Throws ConfigError on an empty signal.
std::vector<CurveFit> fit_report(const SpectralSignal& signal, const std::vector<FilterCurve>& curves);

/// CSV with header "lambda,rayleigh" and 17 significant digits.
void write_signal_csv(std::ostream& out, const SpectralSignal& signal);

}  // namespace gegennet
