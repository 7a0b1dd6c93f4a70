#pragma once

// The four experiment protocols: multi-seed benchmark, whole-score
// baseline with formulation comparison, unseen-question cold start, and
// the training-fraction sweep. Each returns a ProtocolResult carrying
// provenance (corpus hash, seeds, config echo) plus keyed summary rows,
// so re-running a protocol on the same inputs reproduces the same bytes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/corpus.hpp"
#include "rubricgrade/metrics.hpp"
#include "rubricgrade/score_baseline.hpp"
#include "rubricgrade/split.hpp"

namespace rubricgrade {

struct ProtocolRow {
  std::string key;  // backend display name, question id, or fraction
  RunSummary summary;

  friend bool operator==(const ProtocolRow&, const ProtocolRow&) = default;
};

struct CurvePoint {
  Rational fraction;
  std::string metric;  // "accuracy" or "f1"
  double mean = 0.0;
  double stdev = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct ProtocolResult {
  std::string protocol;
  std::string corpus_hash;
  std::vector<std::uint64_t> seeds;
  nlohmann::ordered_json config_echo;
  std::vector<ProtocolRow> rows;
  std::vector<CurvePoint> curve;  // fraction sweep only
};

// Splits per seed, fits trainable configs on train/val, evaluates every
// config on the seed's test pairs, and aggregates per config across
// seeds. Any failing (config, seed) cell aborts the whole run with that
// cell named in the error.
ProtocolResult run_benchmark(const Corpus& corpus,
                             const std::vector<BackendConfig>& configs,
                             const std::vector<std::uint64_t>& seeds,
                             const SplitFractions& fractions = {});

// Same splits, but samples are whole responses: predicted total score
// against the gold total, scored as multiclass accuracy and macro-F1.
ProtocolResult run_score_baseline(const Corpus& corpus,
                                  ScorePredictor& predictor,
                                  const std::vector<std::uint64_t>& seeds,
                                  const SplitFractions& fractions = {});

struct ComparisonRow {
  std::string rubric_key;
  std::string score_key;
  RunSummary rubric;
  RunSummary score;
  // rubric minus score, in raw [0,1] metric units
  double accuracy_delta = 0.0;
  double f1_delta = 0.0;
};

struct ComparisonResult {
  std::string corpus_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<ComparisonRow> rows;
};

// Joins a rubric-formulation result against a score-formulation result
// row by row (a single score row compares against every rubric row).
// Results must agree on corpus hash and seeds.
ComparisonResult compare_formulations(const ProtocolResult& rubric,
                                      const ProtocolResult& score);

// One row per held-out question: train on the others, test on all pairs
// of the held-out one. Uses config.seed; val_fraction is carved from the
// training questions for model selection.
ProtocolResult run_coldstart(const Corpus& corpus, const BackendConfig& config,
                             const Rational& val_fraction = Rational(1, 10));

std::vector<Rational> default_sweep_fractions();  // 5% to 80%

// Training-data scaling: per (fraction, seed), the seed's split is
// subsampled to the fraction before fitting; test/val stay fixed. Rows
// are keyed by fraction; curve points carry accuracy and F1 trajectories.
ProtocolResult run_fraction_sweep(const Corpus& corpus,
                                  const BackendConfig& config,
                                  const std::vector<Rational>& fractions,
                                  const std::vector<std::uint64_t>& seeds);

nlohmann::ordered_json protocol_result_to_json(const ProtocolResult& result);
ProtocolResult protocol_result_from_json(const nlohmann::ordered_json& doc);
void save_protocol_result(const ProtocolResult& result,
                          const std::filesystem::path& path);
ProtocolResult load_protocol_result(const std::filesystem::path& path);

}  // namespace rubricgrade
