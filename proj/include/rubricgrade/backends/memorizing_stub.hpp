#pragma once

// Deterministic reference runtime for the trainable boundary. It memorizes
// every training pair and answers the stored gold label for premises it
// has seen. For an unseen premise it falls back to the training-majority
// vote of the hypothesis, and to FALSE when even the hypothesis is new —
// so it generalizes a little within questions it trained on and not at
// all to unseen rubric items.

#include <map>
#include <span>
#include <string>

#include "rubricgrade/backend.hpp"

namespace rubricgrade {

class MemorizingStub : public TrainableModel {
public:
  std::string name() const override { return "memorizing-stub"; }

  void begin_epoch(int epoch) override;
  void train_batch(std::span<const EntailmentPair> batch) override;
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override;
  std::unique_ptr<TrainableModel> clone() const override;

  nlohmann::ordered_json save_state() const override;
  static std::unique_ptr<MemorizingStub> from_state(
      const nlohmann::ordered_json& state);

private:
  struct Votes {
    std::int64_t true_count = 0;
    std::int64_t total = 0;
  };
  // Ordered maps so saved state and cloned behavior never depend on hash
  // iteration order.
  std::map<std::string, bool> memory_;       // premise \x1f hypothesis -> gold
  std::map<std::string, Votes> hypothesis_votes_;
};

}  // namespace rubricgrade
