#include "gegennet/gegenbauer.hpp"

#include "gegennet/error.hpp"

#include <cmath>
#include <string>

namespace gegennet {

std::string_view to_string(FirstOrderCoefficient c) {
  return c == FirstOrderCoefficient::alpha_plus_half ? "alpha_plus_half" : "alpha_plus_one";
}

FirstOrderCoefficient parse_first_order_coefficient(std::string_view text) {
  if (text == "alpha_plus_half") return FirstOrderCoefficient::alpha_plus_half;
  if (text == "alpha_plus_one") return FirstOrderCoefficient::alpha_plus_one;
  throw ConfigError("unknown first-order coefficient '" + std::string(text) + "'");
}

double GegenbauerParams::first_order_value() const {
  return first_order == FirstOrderCoefficient::alpha_plus_half ? alpha + 0.5 : alpha + 1.0;
}

void GegenbauerParams::validate(int max_order) const {
  if (!(alpha >= -0.5)) throw ConfigError("Gegenbauer alpha must be >= -0.5");
  for (int k = 2; k <= max_order; ++k) {
    if (k * (k + 2.0 * alpha - 1.0) == 0.0)
      throw ConfigError("Gegenbauer recursion denominator vanishes at k = " + std::to_string(k) +
                        " for alpha = " + std::to_string(alpha));
  }
}

RecursionWeights gegenbauer_weights(int k, double alpha) {
  if (k < 2) throw ConfigError("recursion weights are defined for k >= 2");
  const double kd = k;
  const double denom = kd * (kd + 2.0 * alpha - 1.0);
  if (denom == 0.0) throw ConfigError("Gegenbauer recursion denominator vanishes at k = " + std::to_string(k));
  return {(2.0 * kd + 2.0 * alpha - 1.0) * (kd + alpha - 1.0) / denom,
          (kd + alpha - 0.5) * (kd + alpha - 1.5) / denom};
}

double gegenbauer_scalar(double lambda, int k, const GegenbauerParams& params) {
  if (k < 0) throw ConfigError("polynomial order must be non-negative");
  params.validate(k);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = params.first_order_value() * lambda;
  for (int j = 2; j <= k; ++j) {
    const auto w = gegenbauer_weights(j, params.alpha);
    const double next = w.omega * lambda * cur - w.omega_prime * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double pochhammer(double x, int n) {
  double p = 1.0;
  for (int j = 0; j < n; ++j) p *= x + j;
  return p;
}

double gegenbauer_closed_form(double lambda, int k, double alpha) {
  if (alpha == 0.0) throw ConfigError("the explicit Gegenbauer sum is undefined for alpha = 0");
  if (k < 0) throw ConfigError("polynomial order must be non-negative");
  double sum = 0.0;
  for (int i = 0; i <= k / 2; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const double coeff = pochhammer(alpha, k - i) / (pochhammer(1.0, i) * pochhammer(1.0, k - 2 * i));
    sum += sign * coeff * std::pow(2.0 * lambda, k - 2 * i);
  }
  return sum;
}

DenseMatrix gegenbauer_apply(const SparseMatrix& a_hat, const DenseMatrix& h, int k, const GegenbauerParams& params) {
  if (a_hat.rows() != a_hat.cols() || a_hat.cols() != static_cast<std::size_t>(h.rows()))
    throw ConfigError("gegenbauer_apply: shape mismatch");
  if (k < 0) throw ConfigError("polynomial order must be non-negative");
  params.validate(k);
  if (k == 0) return h;

  DenseMatrix prev = h;
  DenseMatrix cur = spmm(a_hat, h);
  cur *= params.first_order_value();
  DenseMatrix next;
  for (int j = 2; j <= k; ++j) {
    const auto w = gegenbauer_weights(j, params.alpha);
    spmm_into(a_hat, cur, next);
    next *= w.omega;
    next.noalias() -= w.omega_prime * prev;
    prev.swap(cur);
    cur.swap(next);
  }
  return cur;
}

}  // namespace gegennet
