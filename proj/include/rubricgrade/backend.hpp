#pragma once

// Entailment backends: anything that maps (premise, hypothesis) pairs to
// TRUE/FALSE verdicts with a signed confidence score. Four kinds exist:
// a trainable classifier boundary, a generative log-prob adapter, the
// lexical-overlap heuristic, and the gold-reading oracle.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rubricgrade/pairs.hpp"
#include "rubricgrade/rational.hpp"

namespace rubricgrade {

struct Prediction {
  std::string response_id;
  std::string rubric_item_id;
  bool label = false;
  // Signed confidence; positive favors TRUE. The label is always
  // score > 0, so a score of exactly 0 decides FALSE.
  double score = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class BackendKind { trainable, generative, lexical, oracle };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& s);

struct BackendConfig {
  BackendKind kind = BackendKind::lexical;
  // Names the starting checkpoint for trainable backends, e.g. an
  // NLI-fine-tuned variant. Empty selects the built-in reference runtime.
  std::string initialization;

  double learning_rate = 2e-5;
  int batch_size = 16;
  int max_epochs = 10;
  std::pair<double, double> optimizer_betas{0.9, 0.999};
  std::uint64_t seed = 0;

  // Generative sampling parameters.
  double temperature = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;

  Rational lexical_theta{3, 5};
  bool prepend_question = false;

  // Generative adapter wiring; the credential is read from the named
  // environment variable and never written anywhere.
  std::string endpoint;
  std::string credential_env = "RUBRICGRADE_API_KEY";
  std::string prompt_template;  // empty selects the built-in template

  // Model selection is by validation F1, not configurable.
  static constexpr std::string_view selection_metric = "validation_f1";

  void validate() const;  // throws ConfigError
  std::string display_name() const;
};

nlohmann::ordered_json backend_config_to_json(const BackendConfig& config);
BackendConfig backend_config_from_json(const nlohmann::ordered_json& doc);

struct TrainingLog {
  struct EpochRecord {
    int epoch = 0;
    double val_f1 = 0.0;
    double val_accuracy = 0.0;
  };
  std::vector<EpochRecord> epochs;
  int selected_epoch = 0;  // earliest epoch with maximal validation F1
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Whether predict may be called concurrently on disjoint batches.
  virtual bool concurrency_capable() const { return false; }
  // One prediction per pair, order-aligned with the input.
  virtual std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const = 0;
};

// Boundary between the fit engine and a model runtime. The engine owns
// pairing, seeded batch order, epoch accounting and selection; the runtime
// owns whatever "forward/backward" means for it.
class TrainableModel {
public:
  virtual ~TrainableModel() = default;
  virtual std::string name() const = 0;
  virtual void begin_epoch(int epoch) = 0;
  virtual void train_batch(std::span<const EntailmentPair> batch) = 0;
  virtual std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const = 0;
  virtual std::unique_ptr<TrainableModel> clone() const = 0;
  virtual nlohmann::ordered_json save_state() const = 0;
};

struct FitResult {
  std::unique_ptr<TrainableModel> model;  // snapshot of the selected epoch
  TrainingLog log;
};

// Runs at most max_epochs passes over train in batches of batch_size with
// a per-epoch seeded shuffle, records validation F1 and accuracy after
// each epoch, and returns the epoch snapshot with the highest validation
// F1 (earliest on ties). Every train/val pair must carry a gold label.
FitResult backend_fit(const TrainableModel& initial,
                      std::span<const EntailmentPair> train,
                      std::span<const EntailmentPair> val,
                      const BackendConfig& config);

// Wraps a fitted runtime as a plain prediction backend.
class FittedBackend : public Backend {
public:
  explicit FittedBackend(std::unique_ptr<TrainableModel> model)
      : model_(std::move(model)) {}
  std::string name() const override { return model_->name(); }
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override {
    return model_->predict(pairs);
  }

private:
  std::unique_ptr<TrainableModel> model_;
};

// Resolves an initialization id to a model runtime. Only the built-in
// deterministic reference runtime ships with this build; ids naming real
// pretrained checkpoints raise BackendError here.
std::unique_ptr<TrainableModel> make_trainable_runtime(
    const std::string& initialization);

std::unique_ptr<TrainableModel> load_trainable_runtime(
    const std::filesystem::path& state_path);

// Builds a ready-to-predict backend for the non-trainable kinds; trainable
// configs must go through make_trainable_runtime + backend_fit.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Predictions file: one JSON record per line.
std::string predictions_to_jsonl(const std::vector<Prediction>& predictions);
std::vector<Prediction> predictions_from_jsonl(const std::string& text);
void save_predictions(const std::vector<Prediction>& predictions,
                      const std::filesystem::path& path);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

std::string training_log_to_json_text(const TrainingLog& log);

}  // namespace rubricgrade
