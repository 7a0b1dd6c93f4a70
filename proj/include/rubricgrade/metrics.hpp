#pragma once

// Binary classification metrics over TRUE/FALSE verdicts, multiclass
// metrics for the score baseline, and multi-seed aggregation. The four
// binary metrics are exact rationals derived from integer confusion
// counts; doubles only appear at aggregation and rendering time.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rubricgrade/rational.hpp"

namespace rubricgrade {

using LabelVec = std::vector<std::uint8_t>;  // 1 = TRUE, 0 = FALSE

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricsReport {
  ConfusionCounts counts;
  Rational accuracy;
  Rational precision;  // 0 when tp + fp == 0
  Rational recall;     // 0 when tp + fn == 0
  Rational f1;         // 0 when precision + recall == 0

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Positive class is TRUE. Inputs are aligned by pair identity; empty or
// mismatched inputs raise DataError.
MetricsReport compute_metrics(const LabelVec& gold, const LabelVec& predicted);
MetricsReport metrics_from_counts(const ConfusionCounts& counts);

struct MetricSummary {
  double mean = 0.0;
  double stdev = 0.0;  // sample std, n-1 denominator; 0 when n == 1

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct RunSummary {
  std::size_t n_runs = 0;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

// Mean and sample standard deviation per metric across seeded runs.
// Summation happens over sorted values, so permuting the reports cannot
// change the result bit for bit.
RunSummary aggregate_seeds(const std::vector<MetricsReport>& reports);

// Score-baseline metrics: exact-match accuracy plus macro-averaged
// precision/recall/F1 over the union of observed gold and predicted score
// classes.
struct MulticlassReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

MulticlassReport multiclass_metrics(const std::vector<Rational>& gold,
                                    const std::vector<Rational>& predicted);

RunSummary aggregate_multiclass(const std::vector<MulticlassReport>& reports);

}  // namespace rubricgrade
