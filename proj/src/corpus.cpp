#include "rubricgrade/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/rng.hpp"

namespace rubricgrade {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string pair_key(const std::string& response_id, const std::string& item_id) {
  return response_id + '\x1f' + item_id;
}

Rational points_from_json(const ordered_json& v, const std::string& item_id) {
  try {
    if (v.is_number_unsigned() || v.is_number_integer())
      return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_float()) return Rational::from_double_exact(v.get<double>());
  } catch (const std::exception& e) {
    throw DataError("rubric item '" + item_id + "': bad points value: " + e.what());
  }
  throw DataError("rubric item '" + item_id +
                  "': points must be an integer, an 'n/d' string, or an exact decimal");
}

ordered_json points_to_json(const Rational& p) {
  if (p.is_integer()) return p.num();
  return p.str();
}

const ordered_json& field(const ordered_json& obj, const char* name,
                          const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end())
    throw DataError(where + ": missing field '" + name + "'");
  return *it;
}

std::string str_field(const ordered_json& obj, const char* name,
                      const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_string()) throw DataError(where + ": field '" + name + "' must be a string");
  return v.get<std::string>();
}

std::size_t word_count(const std::string& text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

}  // namespace

CorpusIndex::CorpusIndex(const Corpus& corpus) : corpus_(&corpus) {
  for (const auto& q : corpus.questions) {
    question_by_id_.emplace(q.id, &q);
    items_by_question_.try_emplace(q.id);
    responses_by_question_.try_emplace(q.id);
  }
  for (const auto& it : corpus.rubric_items) {
    item_by_id_.emplace(it.id, &it);
    auto slot = items_by_question_.find(it.question_id);
    if (slot != items_by_question_.end()) slot->second.push_back(&it);
  }
  for (const auto& r : corpus.responses) {
    response_by_id_.emplace(r.id, &r);
    auto slot = responses_by_question_.find(r.question_id);
    if (slot != responses_by_question_.end()) slot->second.push_back(&r);
  }
  for (const auto& j : corpus.judgments)
    judgment_by_pair_.emplace(pair_key(j.response_id, j.rubric_item_id), j.label);
}

const Question& CorpusIndex::question(const std::string& id) const {
  auto it = question_by_id_.find(id);
  if (it == question_by_id_.end()) throw DataError("unknown question '" + id + "'");
  return *it->second;
}

const RubricItem& CorpusIndex::item(const std::string& id) const {
  auto it = item_by_id_.find(id);
  if (it == item_by_id_.end()) throw DataError("unknown rubric item '" + id + "'");
  return *it->second;
}

const StudentResponse& CorpusIndex::response(const std::string& id) const {
  auto it = response_by_id_.find(id);
  if (it == response_by_id_.end()) throw DataError("unknown response '" + id + "'");
  return *it->second;
}

const std::vector<const RubricItem*>& CorpusIndex::items_of(
    const std::string& question_id) const {
  auto it = items_by_question_.find(question_id);
  if (it == items_by_question_.end())
    throw DataError("unknown question '" + question_id + "'");
  return it->second;
}

const std::vector<const StudentResponse*>& CorpusIndex::responses_of(
    const std::string& question_id) const {
  auto it = responses_by_question_.find(question_id);
  if (it == responses_by_question_.end())
    throw DataError("unknown question '" + question_id + "'");
  return it->second;
}

std::optional<bool> CorpusIndex::gold(const std::string& response_id,
                                      const std::string& item_id) const {
  auto it = judgment_by_pair_.find(pair_key(response_id, item_id));
  if (it == judgment_by_pair_.end()) return std::nullopt;
  return it->second;
}

Rational CorpusIndex::max_points(const std::string& question_id) const {
  Rational total;
  for (const auto* item : items_of(question_id)) total += item->points;
  return total;
}

std::vector<std::string> validate_corpus(const Corpus& corpus) {
  std::vector<std::string> out;

  std::unordered_set<std::string> question_ids, item_ids, response_ids;
  for (const auto& q : corpus.questions) {
    if (q.id.empty()) out.push_back("question with empty id");
    if (!question_ids.insert(q.id).second)
      out.push_back("duplicate question id '" + q.id + "'");
  }
  for (const auto& it : corpus.rubric_items) {
    if (it.id.empty()) out.push_back("rubric item with empty id");
    if (!item_ids.insert(it.id).second)
      out.push_back("duplicate rubric item id '" + it.id + "'");
    if (!question_ids.count(it.question_id))
      out.push_back("rubric item '" + it.id + "' references unknown question '" +
                    it.question_id + "'");
    if (it.text.empty()) out.push_back("rubric item '" + it.id + "' has empty text");
    if (it.points.is_negative())
      out.push_back("rubric item '" + it.id + "' has negative points");
  }
  for (const auto& r : corpus.responses) {
    if (r.id.empty()) out.push_back("response with empty id");
    if (!response_ids.insert(r.id).second)
      out.push_back("duplicate response id '" + r.id + "'");
    if (!question_ids.count(r.question_id))
      out.push_back("response '" + r.id + "' references unknown question '" +
                    r.question_id + "'");
    if (r.text.empty()) out.push_back("response '" + r.id + "' has empty text");
  }

  // Question-level: every question must carry at least one rubric item.
  std::unordered_map<std::string, std::size_t> items_per_question;
  for (const auto& it : corpus.rubric_items)
    if (question_ids.count(it.question_id)) ++items_per_question[it.question_id];
  for (const auto& q : corpus.questions)
    if (items_per_question[q.id] == 0)
      out.push_back("question '" + q.id + "' has no rubric items");

  // Judgment wiring. Only meaningful for ids that resolved above.
  std::unordered_map<std::string, std::string> item_question, response_question;
  for (const auto& it : corpus.rubric_items) item_question[it.id] = it.question_id;
  for (const auto& r : corpus.responses) response_question[r.id] = r.question_id;

  std::unordered_set<std::string> judged;
  for (const auto& j : corpus.judgments) {
    const bool resp_ok = response_ids.count(j.response_id) != 0;
    const bool item_ok = item_ids.count(j.rubric_item_id) != 0;
    if (!resp_ok)
      out.push_back("judgment references unknown response '" + j.response_id + "'");
    if (!item_ok)
      out.push_back("judgment references unknown rubric item '" + j.rubric_item_id + "'");
    if (resp_ok && item_ok &&
        item_question[j.rubric_item_id] != response_question[j.response_id])
      out.push_back("judgment pairs response '" + j.response_id +
                    "' with rubric item '" + j.rubric_item_id +
                    "' from a different question");
    if (!judged.insert(pair_key(j.response_id, j.rubric_item_id)).second)
      out.push_back("duplicate judgment for response '" + j.response_id +
                    "' and rubric item '" + j.rubric_item_id + "'");
  }

  // Exactly one judgment per in-question (response, item) pair.
  for (const auto& r : corpus.responses) {
    if (!question_ids.count(r.question_id)) continue;
    for (const auto& it : corpus.rubric_items) {
      if (it.question_id != r.question_id) continue;
      if (!judged.count(pair_key(r.id, it.id)))
        out.push_back("missing judgment for response '" + r.id +
                      "' and rubric item '" + it.id + "'");
    }
  }

  return out;
}

void require_valid(const Corpus& corpus) {
  auto violations = validate_corpus(corpus);
  if (!violations.empty()) throw CorpusInvalid(std::move(violations));
}

Corpus corpus_from_json_text(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corpus parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("corpus document must be a JSON object");

  Corpus corpus;
  for (const auto& q : field(doc, "questions", "corpus")) {
    Question question;
    question.id = str_field(q, "id", "question");
    question.text = str_field(q, "text", "question '" + question.id + "'");
    corpus.questions.push_back(std::move(question));
  }
  for (const auto& i : field(doc, "rubric_items", "corpus")) {
    RubricItem item;
    item.id = str_field(i, "id", "rubric item");
    item.question_id = str_field(i, "question_id", "rubric item '" + item.id + "'");
    item.text = str_field(i, "text", "rubric item '" + item.id + "'");
    item.points = points_from_json(field(i, "points", "rubric item '" + item.id + "'"),
                                   item.id);
    corpus.rubric_items.push_back(std::move(item));
  }
  for (const auto& r : field(doc, "responses", "corpus")) {
    StudentResponse response;
    response.id = str_field(r, "id", "response");
    response.question_id = str_field(r, "question_id", "response '" + response.id + "'");
    response.text = str_field(r, "text", "response '" + response.id + "'");
    corpus.responses.push_back(std::move(response));
  }
  for (const auto& j : field(doc, "judgments", "corpus")) {
    RubricJudgment judgment;
    judgment.response_id = str_field(j, "response_id", "judgment");
    judgment.rubric_item_id = str_field(j, "rubric_item_id", "judgment");
    const auto& label = field(j, "label", "judgment");
    if (!label.is_boolean()) throw DataError("judgment labels must be booleans");
    judgment.label = label.get<bool>();
    corpus.judgments.push_back(std::move(judgment));
  }
  require_valid(corpus);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read corpus file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return corpus_from_json_text(buf.str());
}

std::string corpus_to_json_text(const Corpus& corpus) {
  ordered_json doc;
  auto& questions = doc["questions"] = ordered_json::array();
  for (const auto& q : corpus.questions)
    questions.push_back({{"id", q.id}, {"text", q.text}});
  auto& items = doc["rubric_items"] = ordered_json::array();
  for (const auto& i : corpus.rubric_items)
    items.push_back({{"id", i.id},
                     {"question_id", i.question_id},
                     {"text", i.text},
                     {"points", points_to_json(i.points)}});
  auto& responses = doc["responses"] = ordered_json::array();
  for (const auto& r : corpus.responses)
    responses.push_back(
        {{"id", r.id}, {"question_id", r.question_id}, {"text", r.text}});
  auto& judgments = doc["judgments"] = ordered_json::array();
  for (const auto& j : corpus.judgments)
    judgments.push_back({{"response_id", j.response_id},
                         {"rubric_item_id", j.rubric_item_id},
                         {"label", j.label}});
  return doc.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write corpus file '" + path.string() + "'");
  out << corpus_to_json_text(corpus);
}

std::string corpus_hash(const Corpus& corpus) {
  const std::uint64_t h = fnv1a64(corpus_to_json_text(corpus));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StatsReport corpus_stats(const Corpus& corpus) {
  StatsReport stats;
  stats.n_questions = corpus.questions.size();
  stats.n_items = corpus.rubric_items.size();
  stats.n_responses = corpus.responses.size();
  stats.n_judgments = corpus.judgments.size();
  for (const auto& j : corpus.judgments) (j.label ? stats.n_true : stats.n_false)++;
  std::size_t words = 0;
  for (const auto& r : corpus.responses) words += word_count(r.text);
  stats.mean_response_words =
      corpus.responses.empty()
          ? 0.0
          : static_cast<double>(words) / static_cast<double>(corpus.responses.size());
  return stats;
}

std::string stats_to_json_text(const StatsReport& stats) {
  ordered_json doc{{"n_questions", stats.n_questions},
                   {"n_items", stats.n_items},
                   {"n_responses", stats.n_responses},
                   {"n_judgments", stats.n_judgments},
                   {"n_true", stats.n_true},
                   {"n_false", stats.n_false},
                   {"mean_response_words", stats.mean_response_words}};
  return doc.dump(2) + "\n";
}

}  // namespace rubricgrade
