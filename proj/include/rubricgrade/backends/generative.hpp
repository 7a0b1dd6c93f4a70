#pragma once

// Zero-shot generative backend: renders a True/False prompt per pair,
// asks an external completion service for the log-probabilities of the
// two candidate answer tokens, and decides by their difference.

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rubricgrade/backend.hpp"

namespace rubricgrade {

// label = lp_true - lp_false > 0; an exact tie decides FALSE. The score is
// the difference itself, so shifting both inputs by a common constant
// changes nothing. Non-finite inputs are rejected.
std::pair<bool, double> decide_from_logprobs(double lp_true, double lp_false);

inline constexpr std::string_view kDefaultPromptTemplate =
    "You are grading one criterion of a student answer.\n"
    "Student response: {premise}\n"
    "Rubric item: {hypothesis}\n"
    "Does the student response satisfy the rubric item? "
    "Answer with exactly one word, True or False.\n"
    "Answer:";

// Substitutes {premise} and {hypothesis} verbatim; the template must
// contain both placeholders.
std::string render_prompt(const EntailmentPair& pair, std::string_view tmpl);

// Adapter boundary to the external model service.
class LogProbAdapter {
public:
  struct Request {
    std::string prompt;
    double temperature = 1.0;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    // Exactly one surface form per candidate answer; variants in casing or
    // whitespace are the adapter's concern.
    std::vector<std::string> candidates{"True", "False"};
  };

  virtual ~LogProbAdapter() = default;
  virtual std::string name() const = 0;
  // Log-probabilities aligned with request.candidates. Failures should
  // throw; the backend converts them into BackendError with pair context.
  virtual std::vector<double> complete(const Request& request) = 0;
};

// POSTs {prompt, sampling params, candidates} as JSON to `endpoint` and
// expects {"logprobs": {"<candidate>": <number>, ...}} back. A bearer
// token is taken from the environment variable named by credential_env
// when present; it is never logged or persisted.
std::unique_ptr<LogProbAdapter> make_http_logprob_adapter(
    const std::string& endpoint, const std::string& credential_env);

class GenerativeBackend : public Backend {
public:
  GenerativeBackend(std::shared_ptr<LogProbAdapter> adapter,
                    const BackendConfig& config);

  std::string name() const override;
  std::vector<Prediction> predict(
      std::span<const EntailmentPair> pairs) const override;

private:
  std::shared_ptr<LogProbAdapter> adapter_;
  std::string template_;
  double temperature_;
  double frequency_penalty_;
  double presence_penalty_;
};

}  // namespace rubricgrade
