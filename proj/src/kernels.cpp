#include "rubricgrade/kernels.hpp"

#include <cstdint>

#include "rubricgrade/errors.hpp"

namespace rubricgrade::kernels {

ConfusionCounts count_confusion_serial(const LabelVec& gold,
                                       const LabelVec& predicted) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && predicted[i]) ++c.tp;
    else if (!gold[i] && predicted[i]) ++c.fp;
    else if (gold[i] && !predicted[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionCounts count_confusion(const LabelVec& gold, const LabelVec& predicted) {
  const std::int64_t n = static_cast<std::int64_t>(gold.size());
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
#pragma omp parallel for reduction(+ : tp, fp, fn, tn) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const bool g = gold[static_cast<std::size_t>(i)] != 0;
    const bool p = predicted[static_cast<std::size_t>(i)] != 0;
    tp += g && p;
    fp += !g && p;
    fn += g && !p;
    tn += !g && !p;
  }
  return ConfusionCounts{static_cast<std::size_t>(tp), static_cast<std::size_t>(fp),
                         static_cast<std::size_t>(fn), static_cast<std::size_t>(tn)};
}

namespace {

OverlapResult overlap_one(const OverlapTask& task) {
  OverlapResult r;
  r.hypothesis_size = static_cast<std::uint32_t>(task.hypothesis_tokens->size());
  for (const auto& tok : *task.hypothesis_tokens)
    r.hits += task.premise_tokens->count(tok) != 0;
  return r;
}

}  // namespace

std::vector<OverlapResult> overlap_counts_serial(
    const std::vector<OverlapTask>& tasks) {
  std::vector<OverlapResult> out(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = overlap_one(tasks[i]);
  return out;
}

std::vector<OverlapResult> overlap_counts(const std::vector<OverlapTask>& tasks) {
  std::vector<OverlapResult> out(tasks.size());
  const std::int64_t n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = overlap_one(tasks[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace rubricgrade::kernels
