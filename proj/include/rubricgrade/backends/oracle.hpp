#pragma once

// Gold-reading oracle: echoes the gold label attached to each pair.
// Useful as the all-correct end of every evaluation pipeline.

#include <span>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/errors.hpp"

namespace rubricgrade {

class OracleBackend : public Backend {
public:
  std::string name() const override { return "oracle"; }
  bool concurrency_capable() const override { return true; }

  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override {
    std::vector<Prediction> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
      if (!pair.gold)
        throw DataError("oracle backend needs gold labels; pair (" +
                        pair.response_id + ", " + pair.rubric_item_id +
                        ") has none");
      Prediction p;
      p.response_id = pair.response_id;
      p.rubric_item_id = pair.rubric_item_id;
      p.label = *pair.gold;
      p.score = p.label ? 1.0 : -1.0;
      out.push_back(std::move(p));
    }
    return out;
  }
};

}  // namespace rubricgrade
