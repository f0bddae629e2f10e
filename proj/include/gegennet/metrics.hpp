#pragma once

#include "gegennet/sparse.hpp"

#include <cstddef>
#include <vector>

namespace gegennet {

struct Metrics {
  double auc = 0.0;
  double macro_f1 = 0.0;
  double f1_positive = 0.0;
  double f1_negative = 0.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;
};

inline constexpr double kDecisionThreshold = 0.5;

/// ROC AUC as the Mann-Whitney statistic with average ranks for ties.
/// `signs` holds +1 / -1; throws ConfigError unless both classes are present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& signs);

/// Scores >= 0.5 are predicted positive. A class without true predictions has F1 0.
Metrics classification_metrics(const std::vector<double>& scores, const std::vector<int>& signs);

/// AUC plus threshold metrics.
Metrics evaluate(const std::vector<double>& scores, const std::vector<int>& signs);
Metrics evaluate(const Vector& scores, const std::vector<int>& signs);

}  // namespace gegennet
