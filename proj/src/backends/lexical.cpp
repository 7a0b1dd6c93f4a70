#include "rubricgrade/backends/lexical.hpp"

#include <unordered_map>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/kernels.hpp"
#include "rubricgrade/text.hpp"

namespace rubricgrade {

namespace {

void check_theta(const Rational& theta) {
  if (theta.is_negative() || theta > Rational(1))
    throw ConfigError("lexical threshold must lie in [0, 1]");
}

Prediction from_overlap(const EntailmentPair& pair,
                        const kernels::OverlapResult& overlap,
                        const Rational& theta) {
  if (overlap.hypothesis_size == 0)
    throw DataError("rubric item '" + pair.rubric_item_id +
                    "' has no content tokens to match");
  const Rational fraction(overlap.hits, overlap.hypothesis_size);
  const Rational score = fraction - theta;

  Prediction p;
  p.response_id = pair.response_id;
  p.rubric_item_id = pair.rubric_item_id;
  const bool full_match = overlap.hits == overlap.hypothesis_size;
  if (full_match && score == Rational(0)) {
    // theta == 1 with a complete hit; a full match must not lose to the
    // tie rule, so report the smallest positive confidence.
    p.label = true;
    p.score = 1e-9;
  } else {
    p.label = score > Rational(0);
    p.score = score.to_double();
  }
  return p;
}

}  // namespace

Prediction lexical_predict(const EntailmentPair& pair, const Rational& theta) {
  check_theta(theta);
  const auto hyp = content_tokens(pair.hypothesis);
  const auto prem = token_set(pair.premise);
  kernels::OverlapResult r;
  r.hypothesis_size = static_cast<std::uint32_t>(hyp.size());
  for (const auto& tok : hyp) r.hits += prem.count(tok) != 0;
  return from_overlap(pair, r, theta);
}

LexicalBackend::LexicalBackend(Rational theta) : theta_(std::move(theta)) {
  check_theta(theta_);
}

std::string LexicalBackend::name() const { return "lexical(theta=" + theta_.str() + ")"; }

std::vector<Prediction> LexicalBackend::predict_impl(
    std::span<const EntailmentPair> pairs, bool parallel) const {
  // Hypotheses repeat per rubric item and premises per response; tokenize
  // each distinct text once, then run the flat overlap kernel.
  std::unordered_map<std::string, std::vector<std::string>> hyp_tokens;
  std::unordered_map<std::string, std::unordered_set<std::string>> prem_tokens;
  for (const auto& pair : pairs) {
    hyp_tokens.try_emplace(pair.hypothesis, content_tokens(pair.hypothesis));
    prem_tokens.try_emplace(pair.premise, token_set(pair.premise));
  }

  std::vector<kernels::OverlapTask> tasks;
  tasks.reserve(pairs.size());
  for (const auto& pair : pairs)
    tasks.push_back({&hyp_tokens.at(pair.hypothesis), &prem_tokens.at(pair.premise)});

  const auto overlaps = parallel ? kernels::overlap_counts(tasks)
                                 : kernels::overlap_counts_serial(tasks);

  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out.push_back(from_overlap(pairs[i], overlaps[i], theta_));
  return out;
}

std::vector<Prediction> LexicalBackend::predict(
    std::span<const EntailmentPair> pairs) const {
  return predict_impl(pairs, true);
}

std::vector<Prediction> LexicalBackend::predict_serial(
    std::span<const EntailmentPair> pairs) const {
  return predict_impl(pairs, false);
}

}  // namespace rubricgrade
