#include "gegennet/filters.hpp"

#include "gegennet/eigensolvers.hpp"
#include "gegennet/error.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

namespace gegennet {

namespace {

double require(const Hyperparameters& hp, const char* key) {
  const auto it = hp.find(key);
  if (it == hp.end()) throw ConfigError(std::string("missing filter hyperparameter '") + key + "'");
  return it->second;
}

int require_order(const Hyperparameters& hp, const char* key) {
  const double v = require(hp, key);
  if (v < 0.0 || v != std::floor(v)) throw ConfigError(std::string("hyperparameter '") + key + "' must be a non-negative integer");
  return static_cast<int>(v);
}

constexpr double kSingularTol = 1e-12;

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::k_hop: return "k_hop";
    case FilterKind::ppr: return "ppr";
    case FilterKind::hkpr: return "hkpr";
    case FilterKind::gnn_lf: return "gnn_lf";
    case FilterKind::gnn_hf: return "gnn_hf";
    case FilterKind::gegenbauer: return "gegenbauer";
  }
  return "unknown";
}

FilterKind parse_filter_kind(std::string_view text) {
  for (auto k : {FilterKind::k_hop, FilterKind::ppr, FilterKind::hkpr, FilterKind::gnn_lf, FilterKind::gnn_hf,
                 FilterKind::gegenbauer})
    if (to_string(k) == text) return k;
  throw ConfigError("unknown filter '" + std::string(text) + "'");
}

Hyperparameters default_hyperparameters(FilterKind kind) {
  switch (kind) {
    case FilterKind::k_hop: return {{"K", 3}};
    case FilterKind::ppr: return {{"alpha", 0.9}, {"K", 7}};
    case FilterKind::hkpr: return {{"alpha", 2.0}, {"K", 7}};
    case FilterKind::gnn_lf: return {{"alpha", 0.1}, {"beta", 0.75}};
    case FilterKind::gnn_hf: return {{"alpha", 0.1}, {"beta", 1.0}};
    case FilterKind::gegenbauer: return {{"alpha", 1.5}, {"k", 3}};
  }
  return {};
}

std::vector<double> uniform_grid(std::size_t count) {
  if (count < 2) throw ConfigError("a curve grid needs at least two points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(count - 1);
  return grid;
}

bool evaluate_filter(FilterKind kind, const Hyperparameters& hp, double lambda, double& value) {
  switch (kind) {
    case FilterKind::k_hop:
      value = std::pow(lambda, require_order(hp, "K"));
      return true;
    case FilterKind::ppr: {
      const double a = require(hp, "alpha");
      const int K = require_order(hp, "K");
      double term = 1.0;
      value = 0.0;
      for (int k = 0; k <= K; ++k) {
        value += term;
        term *= a * lambda;
      }
      return true;
    }
    case FilterKind::hkpr: {
      const double a = require(hp, "alpha");
      const int K = require_order(hp, "K");
      double term = std::exp(-a);
      value = 0.0;
      for (int k = 0; k <= K; ++k) {
        value += term;
        term *= a * lambda / (k + 1);
      }
      return true;
    }
    case FilterKind::gnn_lf: {
      const double a = require(hp, "alpha");
      const double b = require(hp, "beta");
      const double x = 1.0 - lambda;
      const double den = 1.0 - (2.0 - b + 1.0 / a) * x;
      if (std::abs(den) < kSingularTol) return false;
      value = (1.0 - (1.0 - b) * x) / den;
      return std::isfinite(value);
    }
    case FilterKind::gnn_hf: {
      const double a = require(hp, "alpha");
      const double b = require(hp, "beta");
      const double x = 1.0 - lambda;
      const double den = 1.0 - (1.0 - b - 1.0 / a) * x;
      if (std::abs(den) < kSingularTol) return false;
      value = (1.0 + b * x) / den;
      return std::isfinite(value);
    }
    case FilterKind::gegenbauer: {
      GegenbauerParams params;
      params.alpha = require(hp, "alpha");
      if (const auto it = hp.find("first_order_plus_one"); it != hp.end() && it->second != 0.0)
        params.first_order = FirstOrderCoefficient::alpha_plus_one;
      value = gegenbauer_scalar(lambda, require_order(hp, "k"), params);
      return true;
    }
  }
  return false;
}

FilterCurve classic_filter_curve(FilterKind kind, const std::vector<double>& lambdas, const Hyperparameters& hp) {
  FilterCurve curve;
  curve.kind = kind;
  curve.hyperparameters = hp;
  curve.samples.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ConfigError("curve lambdas must be strictly increasing");
    double value = 0.0;
    if (evaluate_filter(kind, hp, lambdas[i], value)) curve.samples.push_back({lambdas[i], value});
    else curve.skipped_lambdas.push_back(lambdas[i]);
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const FilterCurve& curve) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "lambda,value\n";
  for (const auto& s : curve.samples) out << s.lambda << ',' << s.value << '\n';
  out.precision(old);
}

std::string_view to_string(ProximityKind kind) {
  switch (kind) {
    case ProximityKind::common_neighbors: return "common_neighbors";
    case ProximityKind::k_hop: return "k_hop";
    case ProximityKind::ppr: return "ppr";
    case ProximityKind::hkpr: return "hkpr";
  }
  return "unknown";
}

std::vector<double> proximity_coefficients(ProximityKind kind, const Hyperparameters& hp) {
  switch (kind) {
    case ProximityKind::common_neighbors: return {0.0, 0.0, 1.0};
    case ProximityKind::k_hop: {
      std::vector<double> c(static_cast<std::size_t>(require_order(hp, "K")) + 1, 0.0);
      c.back() = 1.0;
      return c;
    }
    case ProximityKind::ppr: {
      const double a = require(hp, "alpha");
      std::vector<double> c(static_cast<std::size_t>(require_order(hp, "K")) + 1);
      double p = 1.0;
      for (double& ck : c) {
        ck = (1.0 - a) * p;
        p *= a;
      }
      return c;
    }
    case ProximityKind::hkpr: {
      const double a = require(hp, "alpha");
      std::vector<double> c(static_cast<std::size_t>(require_order(hp, "K")) + 1);
      double term = std::exp(-a);
      for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] = term;
        term *= a / static_cast<double>(k + 1);
      }
      return c;
    }
  }
  return {};
}

ProximityForms proximity_forms(ProximityKind kind, const SparseMatrix& matrix, const Hyperparameters& hp,
                               std::size_t ceiling) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("proximity matrices need a square input");
  if (matrix.rows() > ceiling) throw ConfigError("proximity_matrix: graph exceeds the dense ceiling");
  const auto coeffs = proximity_coefficients(kind, hp);
  const auto n = static_cast<Eigen::Index>(matrix.rows());

  ProximityForms out;
  out.series = DenseMatrix::Zero(n, n);
  DenseMatrix power = DenseMatrix::Identity(n, n);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k > 0) power = spmm(matrix, power);
    if (coeffs[k] != 0.0) out.series += coeffs[k] * power;
  }

  const EigenPairs eig = dense_eig(matrix.to_dense(), ceiling);
  Vector response(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = 0.0;
    double p = 1.0;
    for (double c : coeffs) {
      f += c * p;
      p *= eig.values[i];
    }
    response[i] = f;
  }
  out.spectral = eig.vectors * response.asDiagonal() * eig.vectors.transpose();
  return out;
}

DenseMatrix proximity_matrix(ProximityKind kind, const SparseMatrix& matrix, const Hyperparameters& hp,
                             std::size_t ceiling) {
  return proximity_forms(kind, matrix, hp, ceiling).series;
}

}  // namespace gegennet
