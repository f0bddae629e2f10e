#include "gegennet/metrics.hpp"

#include "gegennet/error.hpp"

#include <algorithm>
#include <numeric>

namespace gegennet {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& signs) {
  if (scores.size() != signs.size()) throw ConfigError("metrics: scores and signs differ in length");
  for (int s : signs)
    if (s != 1 && s != -1) throw ConfigError("metrics: signs must be +1 or -1");
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<int>& signs) {
  check_inputs(scores, signs);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (signs[order[k]] > 0) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw ConfigError("AUC is undefined without both positive and negative edges");
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

Metrics classification_metrics(const std::vector<double>& scores, const std::vector<int>& signs) {
  check_inputs(scores, signs);
  Metrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= kDecisionThreshold;
    const bool actual = signs[i] > 0;
    if (predicted && actual) ++m.true_positive;
    else if (predicted) ++m.false_positive;
    else if (actual) ++m.false_negative;
    else ++m.true_negative;
  }
  m.f1_positive = f1(m.true_positive, m.false_positive, m.false_negative);
  m.f1_negative = f1(m.true_negative, m.false_negative, m.false_positive);
  m.macro_f1 = 0.5 * (m.f1_positive + m.f1_negative);
  return m;
}

Metrics evaluate(const std::vector<double>& scores, const std::vector<int>& signs) {
  Metrics m = classification_metrics(scores, signs);
  m.auc = roc_auc(scores, signs);
  return m;
}

Metrics evaluate(const Vector& scores, const std::vector<int>& signs) {
  return evaluate(std::vector<double>(scores.data(), scores.data() + scores.size()), signs);
}

}  // namespace gegennet
