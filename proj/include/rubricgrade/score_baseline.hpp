#pragma once

// Whole-score baseline: predict a response's total score directly from its
// text instead of judging rubric items. Exists as the comparison target
// for the rubric formulation, so the predictors here are deliberately
// simple and deterministic.

#include <memory>
#include <string>
#include <vector>

#include "rubricgrade/corpus.hpp"
#include "rubricgrade/rational.hpp"

namespace rubricgrade {

class ScorePredictor {
public:
  virtual ~ScorePredictor() = default;
  virtual std::string name() const = 0;
  // Replaces any previous training state.
  virtual void fit(const CorpusIndex& index,
                   const std::vector<const StudentResponse*>& train) = 0;
  // Must return a value in [0, max_points of the response's question].
  virtual Rational predict(const CorpusIndex& index,
                           const StudentResponse& response) const = 0;
};

// Echoes the gold total; the ceiling any baseline can reach.
class PerfectScorePredictor : public ScorePredictor {
public:
  std::string name() const override { return "score/perfect"; }
  void fit(const CorpusIndex&,
           const std::vector<const StudentResponse*>&) override {}
  Rational predict(const CorpusIndex& index,
                   const StudentResponse& response) const override;
};

class ConstantScorePredictor : public ScorePredictor {
public:
  explicit ConstantScorePredictor(Rational value = Rational(0))
      : value_(value) {}
  std::string name() const override {
    return "score/constant-" + value_.str();
  }
  void fit(const CorpusIndex&,
           const std::vector<const StudentResponse*>&) override {}
  Rational predict(const CorpusIndex& index,
                   const StudentResponse& response) const override;

private:
  Rational value_;
};

// Copies the gold score of the most lexically similar training response
// from the same question (Jaccard over content tokens). Similarity ties
// break to the smaller response id; a question with no training responses
// predicts 0.
class NearestNeighborScorePredictor : public ScorePredictor {
public:
  std::string name() const override { return "score/nearest-neighbor"; }
  void fit(const CorpusIndex& index,
           const std::vector<const StudentResponse*>& train) override;
  Rational predict(const CorpusIndex& index,
                   const StudentResponse& response) const override;

private:
  struct Example {
    std::string response_id;
    std::vector<std::string> tokens;  // sorted unique content tokens
    Rational score;
  };
  // question id -> its training examples, ordered by response id
  std::vector<std::pair<std::string, std::vector<Example>>> by_question_;
};

std::unique_ptr<ScorePredictor> make_score_predictor(const std::string& name);

}  // namespace rubricgrade
