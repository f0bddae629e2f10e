#pragma once

#include "gegennet/gegenbauer.hpp"
#include "gegennet/sparse.hpp"

#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gegennet {

enum class FilterKind { k_hop, ppr, hkpr, gnn_lf, gnn_hf, gegenbauer };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view text);

using Hyperparameters = std::map<std::string, double>;

/// Settings used for the spectral curve comparison: K-hop K=3; PPR alpha=0.9,
/// K=7; HKPR alpha=2, K=7; GNN-LF alpha=0.1, beta=0.75; GNN-HF alpha=0.1,
/// beta=1.0; Gegenbauer alpha=1.5, k=3.
Hyperparameters default_hyperparameters(FilterKind kind);

struct CurveSample {
  double lambda;
  double value;
};

struct FilterCurve {
  FilterKind kind = FilterKind::k_hop;
  Hyperparameters hyperparameters;
  std::vector<CurveSample> samples;      ///< strictly increasing lambda, finite values
  std::vector<double> skipped_lambdas;   ///< grid points where a rational form was singular
};

/// `count` evenly spaced points on [-1, 1].
std::vector<double> uniform_grid(std::size_t count = 201);

/// Scalar response g(lambda); returns false when a rational denominator vanishes.
bool evaluate_filter(FilterKind kind, const Hyperparameters& hp, double lambda, double& value);

/// Samples g(lambda) on sorted, distinct `lambdas`.
FilterCurve classic_filter_curve(FilterKind kind, const std::vector<double>& lambdas, const Hyperparameters& hp);

/// CSV with header "lambda,value" and 17 significant digits.
void write_curve_csv(std::ostream& out, const FilterCurve& curve);

enum class ProximityKind { common_neighbors, k_hop, ppr, hkpr };

std::string_view to_string(ProximityKind kind);

struct ProximityForms {
  DenseMatrix series;    ///< truncated matrix power series
  DenseMatrix spectral;  ///< U f(Lambda) U^T with the same truncated coefficients
};

/// Series coefficients c_0..c_K: common neighbours {0,0,1}; K-hop e_K;
/// PPR (1-alpha) alpha^k; HKPR e^{-alpha} alpha^k / k!.
std::vector<double> proximity_coefficients(ProximityKind kind, const Hyperparameters& hp);

/// Both forms of a proximity matrix. `matrix` is the plain symmetric adjacency
/// for common neighbours and the normalized one otherwise.
ProximityForms proximity_forms(ProximityKind kind, const SparseMatrix& matrix, const Hyperparameters& hp,
                               std::size_t ceiling = 2000);

/// The truncated series form.
DenseMatrix proximity_matrix(ProximityKind kind, const SparseMatrix& matrix, const Hyperparameters& hp,
                             std::size_t ceiling = 2000);

}  // namespace gegennet
