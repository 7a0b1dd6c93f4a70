#pragma once

// Shared test fixtures: a corpus shaped like the reference dataset the
// protocols were designed around, scripted/recording model runtimes for
// exercising the fit engine, independent oracles the production code is
// checked against, and golden-file plumbing.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/corpus.hpp"
#include "rubricgrade/metrics.hpp"
#include "rubricgrade/split.hpp"

namespace rubricgrade::testing {

// 4 questions, rubric sizes 7/7/7/6, 1264 responses, 8392 judgments of
// which exactly 4880 are TRUE. Deterministic: no RNG involved.
Corpus reference_shaped_corpus();

// A trainable runtime whose predictions follow a fixed per-epoch script:
// row e gives the cyclic label pattern used during epoch e (0-based,
// clamped to the last row). Clones freeze the epoch they were taken in,
// which is how tests observe which epoch backend_fit selected.
class ScriptedModel : public TrainableModel {
public:
  explicit ScriptedModel(std::vector<std::vector<std::uint8_t>> script);

  std::string name() const override { return "scripted"; }
  void begin_epoch(int epoch) override { epoch_ = epoch; }
  void train_batch(std::span<const EntailmentPair>) override {}
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override;
  std::unique_ptr<TrainableModel> clone() const override;
  nlohmann::ordered_json save_state() const override;

  int epoch() const { return epoch_; }

private:
  std::vector<std::vector<std::uint8_t>> script_;
  int epoch_ = 0;
};

// Records every batch the fit engine feeds it, into a log shared across
// clones so the engine's internal working copy writes where the test can
// see it.
class RecordingModel : public TrainableModel {
public:
  struct Batch {
    int epoch = 0;
    std::vector<std::string> pair_keys;  // response_id \x1f item_id
  };
  using Log = std::vector<Batch>;

  RecordingModel();

  std::string name() const override { return "recording"; }
  void begin_epoch(int epoch) override { epoch_ = epoch; }
  void train_batch(std::span<const EntailmentPair> batch) override;
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override;
  std::unique_ptr<TrainableModel> clone() const override;
  nlohmann::ordered_json save_state() const override;

  const Log& log() const { return *log_; }

private:
  std::shared_ptr<Log> log_;
  int epoch_ = 0;
};

// Independent oracles, deliberately written from the definitions rather
// than by calling the production code.
ConfusionCounts brute_confusion(const LabelVec& gold, const LabelVec& predicted);

// Largest-remainder seat allocation for (train, val, test) with ties
// going to val, then test, then train.
std::array<std::size_t, 3> lr_allocate(std::size_t n,
                                       const SplitFractions& fractions);

// Earned points straight off the corpus judgment list.
Rational enumerate_earned(const Corpus& corpus, const std::string& response_id);

// Golden files: compares `content` against golden/<name>; returns an
// empty string on match. Set RUBRICGRADE_REGEN_GOLDEN=1 to (re)write.
std::string check_golden(const std::string& name, const std::string& content);

}  // namespace rubricgrade::testing
