#pragma once

// Data-parallel inner loops, each with a serial reference twin. The OpenMP
// variants are the production path; the serial ones stay as the oracle the
// tests (and the kernel benchmark) compare against.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "rubricgrade/metrics.hpp"

namespace rubricgrade::kernels {

ConfusionCounts count_confusion(const LabelVec& gold, const LabelVec& predicted);
ConfusionCounts count_confusion_serial(const LabelVec& gold,
                                       const LabelVec& predicted);

// One lexical-overlap work item: how many of the hypothesis' content
// tokens appear in the premise token set.
struct OverlapTask {
  const std::vector<std::string>* hypothesis_tokens = nullptr;
  const std::unordered_set<std::string>* premise_tokens = nullptr;
};

struct OverlapResult {
  std::uint32_t hits = 0;
  std::uint32_t hypothesis_size = 0;
};

std::vector<OverlapResult> overlap_counts(const std::vector<OverlapTask>& tasks);
std::vector<OverlapResult> overlap_counts_serial(const std::vector<OverlapTask>& tasks);

}  // namespace rubricgrade::kernels
