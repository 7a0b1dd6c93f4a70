#pragma once

// Grading data model: questions, point-valued rubric items, student
// responses and gold TRUE/FALSE judgments, plus loading, validation and
// summary statistics.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rubricgrade/rational.hpp"

namespace rubricgrade {

struct Question {
  std::string id;
  std::string text;

  friend bool operator==(const Question&, const Question&) = default;
};

struct RubricItem {
  std::string id;
  std::string question_id;
  std::string text;  // criterion statement, the hypothesis side
  Rational points;   // non-negative grade units

  friend bool operator==(const RubricItem&, const RubricItem&) = default;
};

struct StudentResponse {
  std::string id;
  std::string question_id;
  std::string text;  // free text, the premise side

  friend bool operator==(const StudentResponse&, const StudentResponse&) = default;
};

struct RubricJudgment {
  std::string response_id;
  std::string rubric_item_id;
  bool label = false;  // TRUE = rubric item addressed by the response

  friend bool operator==(const RubricJudgment&, const RubricJudgment&) = default;
};

// Collections keep document order; serialization round-trips preserve it.
struct Corpus {
  std::vector<Question> questions;
  std::vector<RubricItem> rubric_items;
  std::vector<StudentResponse> responses;
  std::vector<RubricJudgment> judgments;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Lookup tables over one corpus. Built once, used by every operation that
// has to resolve references; invalid references surface as DataError.
class CorpusIndex {
public:
  explicit CorpusIndex(const Corpus& corpus);

  const Corpus& corpus() const { return *corpus_; }

  const Question& question(const std::string& id) const;
  const RubricItem& item(const std::string& id) const;
  const StudentResponse& response(const std::string& id) const;

  bool has_question(const std::string& id) const {
    return question_by_id_.count(id) != 0;
  }

  // Items / responses of one question, in document order.
  const std::vector<const RubricItem*>& items_of(const std::string& question_id) const;
  const std::vector<const StudentResponse*>& responses_of(const std::string& question_id) const;

  // Gold label for a (response, item) pair, if judged.
  std::optional<bool> gold(const std::string& response_id,
                           const std::string& item_id) const;

  // Sum of item points per question.
  Rational max_points(const std::string& question_id) const;

private:
  const Corpus* corpus_;
  std::unordered_map<std::string, const Question*> question_by_id_;
  std::unordered_map<std::string, const RubricItem*> item_by_id_;
  std::unordered_map<std::string, const StudentResponse*> response_by_id_;
  std::unordered_map<std::string, std::vector<const RubricItem*>> items_by_question_;
  std::unordered_map<std::string, std::vector<const StudentResponse*>> responses_by_question_;
  std::unordered_map<std::string, bool> judgment_by_pair_;  // key: resp \x1f item
};

// All invariant violations, one human-readable line each, empty when the
// corpus is valid. Checked: unique ids, resolvable references, non-empty
// texts, non-negative points, judgments staying inside one question,
// exactly one judgment per in-question (response, item) pair, and every
// question carrying at least one rubric item.
std::vector<std::string> validate_corpus(const Corpus& corpus);

// Throws CorpusInvalid with the full listing when validation fails.
void require_valid(const Corpus& corpus);

// Document form: one JSON object with arrays questions / rubric_items /
// responses / judgments. Points accept integers, "n/d" strings and exact
// binary floats. load_corpus validates; parse failures and invariant
// violations both raise DataError.
Corpus load_corpus(const std::filesystem::path& path);
Corpus corpus_from_json_text(const std::string& text);
std::string corpus_to_json_text(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Stable content hash used in report provenance headers.
std::string corpus_hash(const Corpus& corpus);

struct StatsReport {
  std::size_t n_questions = 0;
  std::size_t n_items = 0;
  std::size_t n_responses = 0;
  std::size_t n_judgments = 0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  double mean_response_words = 0.0;

  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

StatsReport corpus_stats(const Corpus& corpus);
std::string stats_to_json_text(const StatsReport& stats);

}  // namespace rubricgrade
