#include "rubricgrade/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/kernels.hpp"

namespace rubricgrade {

namespace {

std::int64_t i64(std::size_t v) { return static_cast<std::int64_t>(v); }

// Sorted summation: identical multisets always hit the same roundings.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

MetricSummary mean_std(const std::vector<double>& values) {
  MetricSummary s;
  const std::size_t n = values.size();
  // A constant sample means that value exactly and deviates by zero; the
  // general path below can turn 1-ulp mean rounding into a bogus stdev.
  if (std::all_of(values.begin(), values.end(),
                  [&](double v) { return v == values.front(); })) {
    s.mean = values.front();
    return s;
  }
  s.mean = sorted_sum(values) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq;
    sq.reserve(n);
    for (double v : values) sq.push_back((v - s.mean) * (v - s.mean));
    s.stdev = std::sqrt(sorted_sum(std::move(sq)) / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace

MetricsReport metrics_from_counts(const ConfusionCounts& counts) {
  if (counts.total() == 0) throw DataError("metrics over an empty label set");
  MetricsReport r;
  r.counts = counts;
  r.accuracy = Rational(i64(counts.tp + counts.tn), i64(counts.total()));
  r.precision = counts.tp + counts.fp == 0
                    ? Rational(0)
                    : Rational(i64(counts.tp), i64(counts.tp + counts.fp));
  r.recall = counts.tp + counts.fn == 0
                 ? Rational(0)
                 : Rational(i64(counts.tp), i64(counts.tp + counts.fn));
  const Rational pr_sum = r.precision + r.recall;
  r.f1 = pr_sum == Rational(0) ? Rational(0)
                               : Rational(2) * r.precision * r.recall / pr_sum;
  return r;
}

MetricsReport compute_metrics(const LabelVec& gold, const LabelVec& predicted) {
  if (gold.size() != predicted.size())
    throw DataError("gold and predicted label vectors differ in length");
  if (gold.empty()) throw DataError("metrics over an empty label set");
  return metrics_from_counts(kernels::count_confusion(gold, predicted));
}

RunSummary aggregate_seeds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw DataError("no metric reports to aggregate");
  std::vector<double> acc, prec, rec, f1;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy.to_double());
    prec.push_back(r.precision.to_double());
    rec.push_back(r.recall.to_double());
    f1.push_back(r.f1.to_double());
  }
  RunSummary s;
  s.n_runs = reports.size();
  s.accuracy = mean_std(acc);
  s.precision = mean_std(prec);
  s.recall = mean_std(rec);
  s.f1 = mean_std(f1);
  return s;
}

MulticlassReport multiclass_metrics(const std::vector<Rational>& gold,
                                    const std::vector<Rational>& predicted) {
  if (gold.size() != predicted.size())
    throw DataError("gold and predicted score vectors differ in length");
  if (gold.empty()) throw DataError("metrics over an empty score set");

  MulticlassReport r;
  r.n = gold.size();

  std::size_t exact = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) exact += gold[i] == predicted[i];
  r.accuracy = static_cast<double>(exact) / static_cast<double>(gold.size());

  // One-vs-rest per observed class; std::map keeps class order stable.
  std::map<Rational, std::array<std::size_t, 3>> per_class;  // tp, fp, fn
  for (std::size_t i = 0; i < gold.size(); ++i) {
    per_class.try_emplace(gold[i]);
    per_class.try_emplace(predicted[i]);
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) {
      per_class[gold[i]][0]++;
    } else {
      per_class[predicted[i]][1]++;
      per_class[gold[i]][2]++;
    }
  }

  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  for (const auto& [cls, counts] : per_class) {
    const auto [tp, fp, fn] = counts;
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double rc = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    const double f = p + rc == 0.0 ? 0.0 : 2.0 * p * rc / (p + rc);
    p_sum += p;
    r_sum += rc;
    f_sum += f;
  }
  const double k = static_cast<double>(per_class.size());
  r.macro_precision = p_sum / k;
  r.macro_recall = r_sum / k;
  r.macro_f1 = f_sum / k;
  return r;
}

RunSummary aggregate_multiclass(const std::vector<MulticlassReport>& reports) {
  if (reports.empty()) throw DataError("no metric reports to aggregate");
  std::vector<double> acc, prec, rec, f1;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    prec.push_back(r.macro_precision);
    rec.push_back(r.macro_recall);
    f1.push_back(r.macro_f1);
  }
  RunSummary s;
  s.n_runs = reports.size();
  s.accuracy = mean_std(acc);
  s.precision = mean_std(prec);
  s.recall = mean_std(rec);
  s.f1 = mean_std(f1);
  return s;
}

}  // namespace rubricgrade
