#pragma once

// (response, rubric item) pairing: the unit of inference. The premise is
// the response text; the hypothesis is the rubric item text.

#include <optional>
#include <string>
#include <vector>

#include "rubricgrade/corpus.hpp"
#include "rubricgrade/split.hpp"

namespace rubricgrade {

struct EntailmentPair {
  std::string response_id;
  std::string rubric_item_id;
  std::string premise;
  std::string hypothesis;
  std::optional<bool> gold;

  friend bool operator==(const EntailmentPair&, const EntailmentPair&) = default;
};

struct PairOptions {
  // Off by default: the premise is the response text alone. Turning this
  // on prefixes the question prompt, for experimentation only.
  bool prepend_question = false;
};

// One pair per (response, rubric item of the response's question), in
// corpus document order, gold labels attached from the corpus judgments.
std::vector<EntailmentPair> build_pairs(const Corpus& corpus,
                                        const PairOptions& options = {});

// Same, restricted to responses the split assigns to `partition`.
std::vector<EntailmentPair> build_pairs(const Corpus& corpus,
                                        const SplitAssignment& split,
                                        Partition partition,
                                        const PairOptions& options = {});

}  // namespace rubricgrade
