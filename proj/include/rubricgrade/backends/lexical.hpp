#pragma once

// Deterministic lexical-overlap backend: the fraction of the hypothesis'
// content tokens that appear in the premise, thresholded at theta.

#include <span>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/rational.hpp"

namespace rubricgrade {

// score = overlap - theta with the overlap fraction in [0, 1]; the label
// follows the global tie rule (score > 0, exact 0 decides FALSE). One
// carve-out: when the premise contains every content token of the
// hypothesis, the verdict is TRUE even at theta == 1, where the plain
// difference would sit on the tie and be vetoed. Partial overlaps landing
// exactly on theta still decide FALSE.
Prediction lexical_predict(const EntailmentPair& pair, const Rational& theta);

class LexicalBackend : public Backend {
public:
  explicit LexicalBackend(Rational theta);

  std::string name() const override;
  bool concurrency_capable() const override { return true; }
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override;

  // Serial reference path, kept for tests and the kernel benchmark.
  std::vector<Prediction> predict_serial(
      std::span<const EntailmentPair> pairs) const;

private:
  std::vector<Prediction> predict_impl(std::span<const EntailmentPair> pairs,
                                       bool parallel) const;
  Rational theta_;
};

}  // namespace rubricgrade
