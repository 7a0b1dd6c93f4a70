#include "rubricgrade/score_baseline.hpp"

#include <algorithm>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/scoring.hpp"
#include "rubricgrade/text.hpp"

namespace rubricgrade {

Rational PerfectScorePredictor::predict(const CorpusIndex& index,
                                        const StudentResponse& response) const {
  return gold_earned(index, response.id);
}

Rational ConstantScorePredictor::predict(
    const CorpusIndex& index, const StudentResponse& response) const {
  // Clamp into the question's valid range rather than erroring: a constant
  // above the maximum is a configuration artifact, not data corruption.
  const Rational max = index.max_points(response.question_id);
  if (value_ < Rational(0)) return Rational(0);
  if (value_ > max) return max;
  return value_;
}

void NearestNeighborScorePredictor::fit(
    const CorpusIndex& index,
    const std::vector<const StudentResponse*>& train) {
  by_question_.clear();
  for (const StudentResponse* response : train) {
    auto tokens = content_tokens(response->text);
    std::sort(tokens.begin(), tokens.end());
    Example example{response->id, std::move(tokens),
                    gold_earned(index, response->id)};

    auto slot = std::find_if(
        by_question_.begin(), by_question_.end(),
        [&](const auto& entry) { return entry.first == response->question_id; });
    if (slot == by_question_.end()) {
      by_question_.push_back({response->question_id, {}});
      slot = std::prev(by_question_.end());
    }
    slot->second.push_back(std::move(example));
  }
  for (auto& [question_id, examples] : by_question_) {
    std::sort(examples.begin(), examples.end(),
              [](const Example& a, const Example& b) {
                return a.response_id < b.response_id;
              });
  }
}

namespace {

// Jaccard similarity as an exact rational; both inputs sorted unique.
Rational jaccard(const std::vector<std::string>& a,
                 const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return Rational(1);
  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t unions = a.size() + b.size() - common;
  return Rational(static_cast<std::int64_t>(common),
                  static_cast<std::int64_t>(unions));
}

}  // namespace

Rational NearestNeighborScorePredictor::predict(
    const CorpusIndex& index, const StudentResponse& response) const {
  auto slot = std::find_if(
      by_question_.begin(), by_question_.end(),
      [&](const auto& entry) { return entry.first == response.question_id; });
  if (slot == by_question_.end() || slot->second.empty()) return Rational(0);

  auto tokens = content_tokens(response.text);
  std::sort(tokens.begin(), tokens.end());

  const Example* best = nullptr;
  Rational best_similarity(-1);
  for (const Example& example : slot->second) {
    const Rational similarity = jaccard(tokens, example.tokens);
    // Examples are ordered by response id, so > keeps the smallest id on ties.
    if (similarity > best_similarity) {
      best_similarity = similarity;
      best = &example;
    }
  }
  return best->score;
}

std::unique_ptr<ScorePredictor> make_score_predictor(const std::string& name) {
  if (name.empty() || name == "nearest-neighbor") {
    return std::make_unique<NearestNeighborScorePredictor>();
  }
  if (name == "perfect") return std::make_unique<PerfectScorePredictor>();
  if (name == "constant-0") {
    return std::make_unique<ConstantScorePredictor>(Rational(0));
  }
  throw ConfigError("unknown score predictor: " + name);
}

}  // namespace rubricgrade
