#include "rubricgrade/scoring.hpp"

#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rubricgrade/errors.hpp"

namespace rubricgrade {

namespace {

// Maps item id -> prediction after checking exact one-to-one coverage.
std::unordered_map<std::string, const Prediction*> align(
    const std::vector<RubricItem>& items,
    const std::vector<Prediction>& predictions) {
  if (items.empty()) throw DataError("no rubric items to score against");
  std::unordered_set<std::string> item_ids;
  for (const auto& item : items) item_ids.insert(item.id);

  std::unordered_map<std::string, const Prediction*> by_item;
  const std::string& response_id =
      predictions.empty() ? std::string{} : predictions.front().response_id;
  for (const auto& prediction : predictions) {
    if (prediction.response_id != response_id) {
      throw DataError("predictions span multiple responses: " + response_id +
                      " and " + prediction.response_id);
    }
    if (!item_ids.count(prediction.rubric_item_id)) {
      throw DataError("prediction for foreign rubric item " +
                      prediction.rubric_item_id);
    }
    if (!by_item.emplace(prediction.rubric_item_id, &prediction).second) {
      throw DataError("duplicate prediction for rubric item " +
                      prediction.rubric_item_id);
    }
  }
  for (const auto& item : items) {
    if (!by_item.count(item.id)) {
      throw DataError("missing prediction for rubric item " + item.id);
    }
  }
  return by_item;
}

}  // namespace

ScoredResponse score_response(const std::vector<RubricItem>& items,
                              const std::vector<Prediction>& predictions) {
  auto by_item = align(items, predictions);
  ScoredResponse scored;
  scored.response_id = predictions.front().response_id;
  for (const auto& item : items) {
    const Prediction& prediction = *by_item.at(item.id);
    scored.outcomes.push_back(
        {item.id, prediction.label, item.points, prediction.score});
    scored.max_points = scored.max_points + item.points;
    if (prediction.label) {
      scored.earned_points = scored.earned_points + item.points;
    }
  }
  return scored;
}

std::vector<ScoredResponse> score_corpus(
    const Corpus& corpus, const std::vector<Prediction>& predictions) {
  CorpusIndex index(corpus);
  std::unordered_map<std::string, std::vector<Prediction>> by_response;
  for (const auto& prediction : predictions) {
    index.response(prediction.response_id);  // DataError when dangling
    by_response[prediction.response_id].push_back(prediction);
  }

  std::vector<ScoredResponse> out;
  out.reserve(corpus.responses.size());
  for (const auto& response : corpus.responses) {
    const auto& item_ptrs = index.items_of(response.question_id);
    std::vector<RubricItem> items;
    items.reserve(item_ptrs.size());
    for (const RubricItem* item : item_ptrs) items.push_back(*item);
    try {
      out.push_back(score_response(items, by_response[response.id]));
    } catch (const DataError& e) {
      throw DataError("response " + response.id + ": " + e.what());
    }
  }
  return out;
}

FeedbackReport feedback_report(const StudentResponse& response,
                               const std::vector<RubricItem>& items,
                               const std::vector<Prediction>& predictions) {
  auto by_item = align(items, predictions);
  FeedbackReport report;
  report.response_id = response.id;
  for (const auto& item : items) {
    if (item.question_id != response.question_id) {
      throw DataError("rubric item " + item.id + " belongs to question " +
                      item.question_id + ", not " + response.question_id);
    }
    const Prediction& prediction = *by_item.at(item.id);
    (prediction.label ? report.met : report.unmet).push_back(item.text);
    report.max_points = report.max_points + item.points;
    if (prediction.label) {
      report.earned_points = report.earned_points + item.points;
    }
  }
  return report;
}

Rational gold_earned(const CorpusIndex& index,
                     const std::string& response_id) {
  const StudentResponse& response = index.response(response_id);
  Rational earned;
  for (const RubricItem* item : index.items_of(response.question_id)) {
    auto label = index.gold(response_id, item->id);
    if (!label.has_value()) {
      throw DataError("no gold judgment for (" + response_id + ", " +
                      item->id + ")");
    }
    if (*label) earned = earned + item->points;
  }
  return earned;
}

std::string render_feedback(const FeedbackReport& report,
                            FeedbackFormat format) {
  std::string out;
  const bool md = format == FeedbackFormat::markdown;
  if (md) {
    out += "## Feedback for " + report.response_id + "\n\n";
  } else {
    out += "Feedback for " + report.response_id + "\n";
  }
  out += "Score: " + report.earned_points.str() + " / " +
         report.max_points.str() + "\n";
  out += md ? "\n### Criteria met\n" : "\nCriteria met:\n";
  if (report.met.empty()) out += md ? "*none*\n" : "  (none)\n";
  for (const auto& text : report.met) {
    out += (md ? "- " : "  + ") + text + "\n";
  }
  out += md ? "\n### Criteria not met\n" : "\nCriteria not met:\n";
  if (report.unmet.empty()) out += md ? "*none*\n" : "  (none)\n";
  for (const auto& text : report.unmet) {
    out += (md ? "- " : "  - ") + text + "\n";
  }
  return out;
}

namespace {

nlohmann::ordered_json rational_to_json(const Rational& value) {
  if (value.den() == 1) return value.num();
  return value.str();
}

}  // namespace

std::string scored_to_jsonl(const std::vector<ScoredResponse>& scored) {
  std::string out;
  for (const auto& response : scored) {
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& outcome : response.outcomes) {
      items.push_back({{"id", outcome.rubric_item_id},
                       {"label", outcome.label},
                       {"points", rational_to_json(outcome.points)}});
    }
    nlohmann::ordered_json record{
        {"response_id", response.response_id},
        {"earned", rational_to_json(response.earned_points)},
        {"max", rational_to_json(response.max_points)},
        {"items", std::move(items)},
    };
    out += record.dump();
    out += '\n';
  }
  return out;
}

void save_scored(const std::vector<ScoredResponse>& scored,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << scored_to_jsonl(scored);
  if (!out) throw DataError("failed while writing " + path.string());
}

}  // namespace rubricgrade
