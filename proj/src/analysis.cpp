#include "gegennet/analysis.hpp"

#include "gegennet/eigensolvers.hpp"
#include "gegennet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gegennet {

SpectralSignal spectral_signal(const SparseMatrix& a_train_hat, const SparseMatrix& y_heldout, std::size_t ceiling) {
  if (a_train_hat.rows() != y_heldout.rows() || a_train_hat.cols() != y_heldout.cols())
    throw ConfigError("spectral_signal: matrices differ in shape");
  if (!y_heldout.is_symmetric()) throw ConfigError("spectral_signal: the target matrix is not symmetric");
  const EigenPairs eig = dense_eig(a_train_hat.to_dense(), ceiling);
  const Eigen::MatrixXd u = eig.vectors;
  const Eigen::MatrixXd yu = spmm(y_heldout, u);
  SpectralSignal s;
  s.points.reserve(static_cast<std::size_t>(u.cols()));
  for (Eigen::Index i = 0; i < u.cols(); ++i) s.points.push_back({eig.values[i], u.col(i).dot(yu.col(i))});
  return s;
}

SparseMatrix heldout_indicator(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset, int sign) {
  const SignMatrices m = build_sign_matrices(g, subset);
  return symmetrize(sign > 0 ? m.a_pos : m.a_neg);
}

SparseMatrix signed_operator(const SignedBipartiteGraph& g, const std::vector<std::size_t>& subset, int sign) {
  return normalize_adjacency(heldout_indicator(g, subset, sign));
}

std::vector<CurveFit> fit_report(const SpectralSignal& signal, const std::vector<FilterCurve>& curves) {
  if (signal.points.empty()) throw ConfigError("fit_report: empty signal");
  std::vector<CurveFit> out;
  for (const auto& curve : curves) {
    if (curve.samples.empty()) throw ConfigError("fit_report: curve without samples");
    std::vector<double> g;
    g.reserve(signal.points.size());
    for (const auto& p : signal.points) {
      const auto it = std::lower_bound(curve.samples.begin(), curve.samples.end(), p.lambda,
                                       [](const CurveSample& s, double l) { return s.lambda < l; });
      auto best = it == curve.samples.end() ? std::prev(it) : it;
      if (it != curve.samples.begin() && it != curve.samples.end() &&
          std::abs(std::prev(it)->lambda - p.lambda) <= std::abs(it->lambda - p.lambda))
        best = std::prev(it);
      g.push_back(best->value);
    }
    double gy = 0.0;
    double gg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      gy += g[i] * signal.points[i].rayleigh;
      gg += g[i] * g[i];
    }
    CurveFit fit{curve.kind, gg > 0.0 ? gy / gg : 0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = fit.gain * g[i] - signal.points[i].rayleigh;
      fit.residual += r * r;
    }
    out.push_back(fit);
  }
  return out;
}

void write_signal_csv(std::ostream& out, const SpectralSignal& signal) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "lambda,rayleigh\n";
  for (const auto& p : signal.points) out << p.lambda << ',' << p.rayleigh << '\n';
  out.precision(old);
}

}  // namespace gegennet
