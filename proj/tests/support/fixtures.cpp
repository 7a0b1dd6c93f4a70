#include "support/fixtures.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rubricgrade/errors.hpp"

namespace rubricgrade::testing {

Corpus reference_shaped_corpus() {
  // Response counts per question; the fourth question carries 6 rubric
  // items and the rest 7, so judgments total 7*(270+269+269) + 6*456.
  static constexpr std::array<std::size_t, 4> kResponses{270, 269, 269, 456};
  static constexpr std::array<std::size_t, 4> kItems{7, 7, 7, 6};
  static constexpr std::size_t kTrueTotal = 4880;
  static constexpr std::size_t kPairTotal = 8392;

  Corpus corpus;
  for (std::size_t q = 0; q < 4; ++q) {
    const std::string qid = "q" + std::to_string(q + 1);
    corpus.questions.push_back(
        {qid, "Explain concept " + std::to_string(q + 1) +
                  " and justify each step of your reasoning."});
    for (std::size_t i = 0; i < kItems[q]; ++i) {
      corpus.rubric_items.push_back(
          {qid + "_i" + std::to_string(i + 1), qid,
           "States fact " + std::to_string(i + 1) + " of concept " +
               std::to_string(q + 1) + " correctly.",
           Rational(static_cast<std::int64_t>(i % 3 + 1))});
    }
  }

  // Labels spread evenly over the global pair sequence so exactly
  // kTrueTotal of the kPairTotal judgments are TRUE.
  std::size_t pair_index = 0;
  auto next_label = [&] {
    const std::size_t before = pair_index * kTrueTotal / kPairTotal;
    const std::size_t after = (pair_index + 1) * kTrueTotal / kPairTotal;
    ++pair_index;
    return after > before;
  };

  for (std::size_t q = 0; q < 4; ++q) {
    const std::string qid = "q" + std::to_string(q + 1);
    for (std::size_t r = 0; r < kResponses[q]; ++r) {
      const std::string rid = qid + "_r" + std::to_string(r + 1);
      corpus.responses.push_back(
          {rid, qid,
           "Student discussion " + std::to_string(r + 1) +
               " of concept " + std::to_string(q + 1) +
               ", working through the question in several sentences of "
               "free-form prose."});
      for (std::size_t i = 0; i < kItems[q]; ++i) {
        corpus.judgments.push_back(
            {rid, qid + "_i" + std::to_string(i + 1), next_label()});
      }
    }
  }
  return corpus;
}

ScriptedModel::ScriptedModel(std::vector<std::vector<std::uint8_t>> script)
    : script_(std::move(script)) {
  if (script_.empty()) throw std::invalid_argument("empty script");
}

std::vector<Prediction> ScriptedModel::predict(
    std::span<const EntailmentPair> pairs) const {
  const std::size_t row_index =
      std::min(static_cast<std::size_t>(epoch_), script_.size() - 1);
  const auto& row = script_[row_index];
  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool label = !row.empty() && row[i % row.size()] != 0;
    out.push_back({pairs[i].response_id, pairs[i].rubric_item_id, label,
                   label ? 1.0 : -1.0});
  }
  return out;
}

std::unique_ptr<TrainableModel> ScriptedModel::clone() const {
  auto copy = std::make_unique<ScriptedModel>(script_);
  copy->epoch_ = epoch_;
  return copy;
}

nlohmann::ordered_json ScriptedModel::save_state() const {
  return {{"runtime", "scripted"}, {"epoch", epoch_}};
}

RecordingModel::RecordingModel() : log_(std::make_shared<Log>()) {}

void RecordingModel::train_batch(std::span<const EntailmentPair> batch) {
  Batch record;
  record.epoch = epoch_;
  for (const auto& pair : batch) {
    record.pair_keys.push_back(pair.response_id + '\x1f' +
                               pair.rubric_item_id);
  }
  log_->push_back(std::move(record));
}

std::vector<Prediction> RecordingModel::predict(
    std::span<const EntailmentPair> pairs) const {
  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    out.push_back({pair.response_id, pair.rubric_item_id, false, -1.0});
  }
  return out;
}

std::unique_ptr<TrainableModel> RecordingModel::clone() const {
  auto copy = std::make_unique<RecordingModel>();
  copy->log_ = log_;  // clones keep feeding the same log
  copy->epoch_ = epoch_;
  return copy;
}

nlohmann::ordered_json RecordingModel::save_state() const {
  return {{"runtime", "recording"}};
}

ConfusionCounts brute_confusion(const LabelVec& gold,
                                const LabelVec& predicted) {
  ConfusionCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && predicted[i]) ++counts.tp;
    if (!gold[i] && predicted[i]) ++counts.fp;
    if (gold[i] && !predicted[i]) ++counts.fn;
    if (!gold[i] && !predicted[i]) ++counts.tn;
  }
  return counts;
}

std::array<std::size_t, 3> lr_allocate(std::size_t n,
                                       const SplitFractions& fractions) {
  const std::array<Rational, 3> shares{fractions.train, fractions.val,
                                       fractions.test};
  std::array<std::size_t, 3> seats{};
  std::array<Rational, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Rational quota =
        shares[i] * Rational(static_cast<std::int64_t>(n));
    const std::int64_t base = quota.floor();
    seats[i] = static_cast<std::size_t>(base);
    remainders[i] = quota - Rational(base);
    assigned += seats[i];
  }
  // Hand leftovers to the largest remainder; ties prefer val, then test,
  // then train, matching the production tie policy.
  static constexpr std::array<std::size_t, 3> kPriority{1, 2, 0};
  while (assigned < n) {
    std::size_t winner = 3;
    for (std::size_t p : kPriority) {
      if (winner == 3 || remainders[p] > remainders[winner]) winner = p;
    }
    ++seats[winner];
    remainders[winner] = remainders[winner] - Rational(1);
    ++assigned;
  }
  return seats;
}

Rational enumerate_earned(const Corpus& corpus,
                          const std::string& response_id) {
  Rational earned;
  for (const auto& judgment : corpus.judgments) {
    if (judgment.response_id != response_id || !judgment.label) continue;
    for (const auto& item : corpus.rubric_items) {
      if (item.id == judgment.rubric_item_id) {
        earned = earned + item.points;
        break;
      }
    }
  }
  return earned;
}

std::string check_golden(const std::string& name,
                         const std::string& content) {
  const char* dir = std::getenv("RUBRICGRADE_GOLDEN_DIR");
  if (!dir) return "RUBRICGRADE_GOLDEN_DIR is not set";
  const std::filesystem::path path = std::filesystem::path(dir) / name;

  if (std::getenv("RUBRICGRADE_REGEN_GOLDEN")) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    return out ? "" : "failed to write " + path.string();
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return "missing golden file " + path.string() +
           " (run with RUBRICGRADE_REGEN_GOLDEN=1 to create)";
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (buffer.str() != content) {
    return "content differs from golden file " + path.string();
  }
  return "";
}

}  // namespace rubricgrade::testing
