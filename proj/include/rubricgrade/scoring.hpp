#pragma once

// Turns per-item entailment verdicts into response scores and
// rubric-aligned feedback. All point arithmetic is exact rationals.

#include <filesystem>
#include <string>
#include <vector>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/corpus.hpp"
#include "rubricgrade/rational.hpp"

namespace rubricgrade {

struct ItemOutcome {
  std::string rubric_item_id;
  bool label = false;
  Rational points;   // credit carried by the item
  double score = 0;  // backend confidence for the verdict

  friend bool operator==(const ItemOutcome&, const ItemOutcome&) = default;
};

struct ScoredResponse {
  std::string response_id;
  Rational earned_points;  // sum over items judged TRUE
  Rational max_points;     // sum over all items of the question
  std::vector<ItemOutcome> outcomes;  // rubric document order

  friend bool operator==(const ScoredResponse&,
                         const ScoredResponse&) = default;
};

struct FeedbackReport {
  std::string response_id;
  std::vector<std::string> met;    // texts of items judged TRUE
  std::vector<std::string> unmet;  // texts of items judged FALSE
  Rational earned_points;
  Rational max_points;

  friend bool operator==(const FeedbackReport&,
                         const FeedbackReport&) = default;
};

// Predictions must cover exactly the given items, one each, and agree on
// the response id; anything else is a DataError.
ScoredResponse score_response(const std::vector<RubricItem>& items,
                              const std::vector<Prediction>& predictions);

// Batch form: scores every response in corpus document order. Predictions
// for unknown responses or items, and responses with incomplete coverage,
// are DataErrors naming the offender.
std::vector<ScoredResponse> score_corpus(
    const Corpus& corpus, const std::vector<Prediction>& predictions);

FeedbackReport feedback_report(const StudentResponse& response,
                               const std::vector<RubricItem>& items,
                               const std::vector<Prediction>& predictions);

// Reference grade implied by the gold judgments.
Rational gold_earned(const CorpusIndex& index, const std::string& response_id);

enum class FeedbackFormat { plain, markdown };

std::string render_feedback(const FeedbackReport& report,
                            FeedbackFormat format);

// One record per response: {response_id, earned, max, items:[...]}.
std::string scored_to_jsonl(const std::vector<ScoredResponse>& scored);
void save_scored(const std::vector<ScoredResponse>& scored,
                 const std::filesystem::path& path);

}  // namespace rubricgrade
