#include "gegennet/analysis.hpp"
#include "gegennet/error.hpp"
#include "gegennet/synthetic.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace gegennet {
namespace {

SparseMatrix train_operator() {
  const SignedBipartiteGraph g = random_signed_graph(15, 20, 0.2, 0.6, 3);
  return signed_operator(g, testing::all_edges(g), 1);
}

TEST(SpectralSignal, TargetEqualsSourceGivesLambdas) {
  const SparseMatrix a = train_operator();
  const SpectralSignal s = spectral_signal(a, a);
  ASSERT_EQ(s.points.size(), a.rows());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_NEAR(s.points[i].rayleigh, s.points[i].lambda, 1e-10);
    if (i > 0) EXPECT_LE(s.points[i - 1].lambda, s.points[i].lambda);
    EXPECT_LE(std::abs(s.points[i].lambda), 1.0 + 1e-9);
  }
}

TEST(SpectralSignal, ZeroAndIdentityTargets) {
  const SparseMatrix a = train_operator();
  for (const auto& p : spectral_signal(a, SparseMatrix(a.rows(), a.cols())).points) EXPECT_EQ(p.rayleigh, 0.0);
  for (const auto& p : spectral_signal(a, SparseMatrix::identity(a.rows())).points) EXPECT_NEAR(p.rayleigh, 1.0, 1e-12);
}

TEST(SpectralSignal, Errors) {
  const SparseMatrix a = train_operator();
  const SparseMatrix asym = SparseMatrix::from_triplets(a.rows(), a.cols(), {{0, 1, 1.0}});
  EXPECT_THROW(spectral_signal(a, asym), ConfigError);
  EXPECT_THROW(spectral_signal(a, a, 10), ConfigError);
}

TEST(HeldoutIndicator, Unnormalized) {
  const SignedBipartiteGraph g = testing::toy_graph();
  const SparseMatrix y = heldout_indicator(g, {1, 2, 3}, 1);
  EXPECT_EQ(y.nnz(), 4u);
  EXPECT_EQ(y.coeff(1, 3), 1.0);
  EXPECT_EQ(y.coeff(3, 1), 1.0);
  EXPECT_EQ(heldout_indicator(g, {1, 2, 3}, -1).coeff(0, 3), 1.0);
}

TEST(FitReport, IdenticalAndZeroCurves) {
  SpectralSignal s;
  const std::vector<double> grid = uniform_grid(5);
  for (double l : grid) s.points.push_back({l, 2.0 * l * l * l});
  FilterCurve same;
  same.kind = FilterKind::k_hop;
  for (double l : grid) same.samples.push_back({l, l * l * l});
  FilterCurve zero;
  zero.kind = FilterKind::ppr;
  for (double l : grid) zero.samples.push_back({l, 0.0});
  const auto fits = fit_report(s, {same, zero});
  EXPECT_NEAR(fits[0].residual, 0.0, 1e-24);
  EXPECT_NEAR(fits[0].gain, 2.0, 1e-12);
  double sumsq = 0.0;
  for (const auto& p : s.points) sumsq += p.rayleigh * p.rayleigh;
  EXPECT_NEAR(fits[1].residual, sumsq, 1e-12);
  EXPECT_THROW(fit_report(SpectralSignal{}, {same}), ConfigError);
}

TEST(SignalCsv, Header) {
  SpectralSignal s;
  s.points = {{-0.5, 0.25}};
  std::ostringstream out;
  write_signal_csv(out, s);
  EXPECT_EQ(out.str(), "lambda,rayleigh\n-0.5,0.25\n");
}

}  // namespace
}  // namespace gegennet
