#pragma once

// Desk-scale synthetic corpora with planted gold labels. Every rubric item
// gets its own disjoint set of coined keywords; a response entails an item
// exactly when it contains all of the item's keywords, so a full-match
// lexical check recovers the gold labels by construction.

#include <cstdint>

#include "rubricgrade/corpus.hpp"

namespace rubricgrade {

struct SyntheticSpec {
  std::size_t n_questions = 4;
  std::size_t items_per_question = 7;
  std::size_t responses_per_question = 50;
  std::size_t keyword_pool_size = 120;
  // Chance that a FALSE pair still mentions a strict subset of the item's
  // keywords. Raising this plants near-miss responses that fool low
  // overlap thresholds.
  double distractor_rate = 0.3;
  std::int64_t points_min = 1;
  std::int64_t points_max = 3;
};

Corpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace rubricgrade
