#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gegennet {

/// Outcome of one oracle check: `measured` is compared against `tolerance`
/// in the direction given by `lower_is_better`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// max |J_k(A) h - U diag(J_k(lambda)) U^T h| over k <= max_order, alpha in
/// {0.5, 1, 1.5} and `graphs` random graphs of at most `max_nodes` nodes.
CheckResult check_gegenbauer_equivalence(int graphs = 20, int max_nodes = 100, int max_order = 8,
                                         std::uint64_t seed = 11);

/// alpha = 0.5 recursion against the Legendre recurrence on a 101-point grid, k <= 10.
CheckResult check_legendre(int max_order = 10, int grid = 101);

/// Series and spectral forms of common-neighbour, PPR and HKPR proximity (K = 20).
CheckResult check_proximity_forms(int graphs = 10, int nodes = 30, std::uint64_t seed = 21);

/// Projector distance between top-d left singular vectors of B and the top-d
/// eigenvectors of dense B B^T.
CheckResult check_singular_subspace(int graphs = 10, int d = 4, std::uint64_t seed = 31);

/// Phi against random orthonormal bases on Tr(Q^T L Q) and Psi on Tr(Q^T B B^T Q).
/// `measured` is the number of losing trials.
CheckResult check_trace_optimality(int graphs = 5, int trials = 100, int d = 8, std::uint64_t seed = 41);

/// Slope-1, dropout-0 forward against the 3^L-term expansion for L in {1, 2}.
CheckResult check_linearization(int instances = 10, std::uint64_t seed = 51);

/// Largest relative error of backward() against central differences with
/// step 1e-4 over at least `samples` coordinates per parameter group.
CheckResult check_gradients(int samples = 50, std::uint64_t seed = 61);

/// Macro-F1 of an all-positive constant predictor at a given positive ratio.
double constant_predictor_macro_f1(double positive_ratio, std::size_t edges = 100000);

/// All checks above plus the constant-predictor metric checks.
std::vector<CheckResult> run_selftest();

}  // namespace gegennet
