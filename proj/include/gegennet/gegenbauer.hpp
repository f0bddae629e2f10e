#pragma once

#include "gegennet/sparse.hpp"

#include <string>
#include <string_view>

namespace gegennet {

/// Coefficient c in J_1(x) = c * x.
enum class FirstOrderCoefficient {
  alpha_plus_half,  ///< (alpha + 1/2): reduces to Legendre at alpha = 1/2
  alpha_plus_one,   ///< (alpha + 1): the matrix-form variant
};

std::string_view to_string(FirstOrderCoefficient c);
FirstOrderCoefficient parse_first_order_coefficient(std::string_view text);

struct GegenbauerParams {
  double alpha = 1.5;
  FirstOrderCoefficient first_order = FirstOrderCoefficient::alpha_plus_half;

  double first_order_value() const;
  /// Throws ConfigError when alpha < -1/2 or a recursion denominator up to
  /// `max_order` vanishes.
  void validate(int max_order) const;
};

struct RecursionWeights {
  double omega;
  double omega_prime;
};

/// omega_k = (2k+2a-1)(k+a-1) / (k(k+2a-1)),
/// omega'_k = (k+a-1/2)(k+a-3/2) / (k(k+2a-1)), for k >= 2.
RecursionWeights gegenbauer_weights(int k, double alpha);

/// J_k(lambda) by the three-term recursion.
double gegenbauer_scalar(double lambda, int k, const GegenbauerParams& params);

/// Standard Gegenbauer polynomial from its explicit Pochhammer sum; alpha != 0.
double gegenbauer_closed_form(double lambda, int k, double alpha);

/// (x)_n = x (x+1) ... (x+n-1).
double pochhammer(double x, int n);

/// J_k(a_hat) h by k sparse products, never forming J_k(a_hat).
DenseMatrix gegenbauer_apply(const SparseMatrix& a_hat, const DenseMatrix& h, int k, const GegenbauerParams& params);

}  // namespace gegennet
