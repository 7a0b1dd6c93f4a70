#include "rubricgrade/protocols.hpp"

#include <exception>
#include <fstream>
#include <functional>
#include <set>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/pairs.hpp"
#include "rubricgrade/rng.hpp"
#include "rubricgrade/scoring.hpp"

namespace rubricgrade {

namespace {

// Runs n independent cells, possibly in parallel, and rethrows the
// lowest-indexed failure so one bad cell deterministically aborts the
// protocol instead of leaving silent gaps.
void run_cells(std::size_t n, const std::function<void(std::size_t)>& cell) {
  std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      cell(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

// Prefixes cell context onto the error while keeping its type, so CLI
// exit codes still reflect the original failure class.
template <typename Fn>
void with_context(const std::string& context, Fn&& fn) {
  try {
    fn();
  } catch (const CorpusInvalid&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const BackendError& e) {
    throw BackendError(context + ": " + e.what());
  }
}

LabelVec gold_of(const std::vector<EntailmentPair>& pairs) {
  LabelVec gold;
  gold.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (!pair.gold.has_value()) {
      throw DataError("test pair (" + pair.response_id + ", " +
                      pair.rubric_item_id + ") has no gold label");
    }
    gold.push_back(*pair.gold ? 1 : 0);
  }
  return gold;
}

LabelVec labels_of(const std::vector<Prediction>& predictions) {
  LabelVec labels;
  labels.reserve(predictions.size());
  for (const auto& p : predictions) labels.push_back(p.label ? 1 : 0);
  return labels;
}

// One protocol cell: fit if trainable, then score the test partition.
MetricsReport evaluate_cell(const Corpus& corpus, const BackendConfig& config,
                            const SplitAssignment& split,
                            std::uint64_t seed) {
  PairOptions options{config.prepend_question};
  const auto test = build_pairs(corpus, split, Partition::test, options);
  if (test.empty()) throw DataError("empty test partition");

  std::vector<Prediction> predictions;
  if (config.kind == BackendKind::trainable) {
    const auto train = build_pairs(corpus, split, Partition::train, options);
    const auto val = build_pairs(corpus, split, Partition::val, options);
    BackendConfig fit_config = config;
    fit_config.seed = seed;
    auto runtime = make_trainable_runtime(config.initialization);
    FitResult fitted = backend_fit(*runtime, train, val, fit_config);
    predictions = fitted.model->predict(test);
  } else {
    predictions = make_backend(config)->predict(test);
  }
  return compute_metrics(gold_of(test), labels_of(predictions));
}

nlohmann::ordered_json echo_config(const BackendConfig& config) {
  return backend_config_to_json(config);
}

}  // namespace

ProtocolResult run_benchmark(const Corpus& corpus,
                             const std::vector<BackendConfig>& configs,
                             const std::vector<std::uint64_t>& seeds,
                             const SplitFractions& fractions) {
  if (configs.empty()) throw ConfigError("benchmark needs at least one config");
  if (seeds.empty()) throw ConfigError("benchmark needs at least one seed");
  require_valid(corpus);
  for (const auto& config : configs) config.validate();

  std::set<std::string> names;
  for (const auto& config : configs) {
    if (!names.insert(config.display_name()).second) {
      throw ConfigError("duplicate backend display name: " +
                        config.display_name());
    }
  }

  // Splits depend only on the seed, not the backend; share them per seed.
  std::vector<SplitAssignment> splits;
  splits.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    splits.push_back(make_split(corpus, fractions, seed));
  }

  std::vector<MetricsReport> cells(configs.size() * seeds.size());
  run_cells(cells.size(), [&](std::size_t i) {
    const std::size_t c = i / seeds.size();
    const std::size_t s = i % seeds.size();
    with_context(configs[c].display_name() + ", seed " +
                     std::to_string(seeds[s]),
                 [&] {
                   cells[i] = evaluate_cell(corpus, configs[c], splits[s],
                                            seeds[s]);
                 });
  });

  ProtocolResult result;
  result.protocol = "benchmark";
  result.corpus_hash = corpus_hash(corpus);
  result.seeds = seeds;
  result.config_echo = nlohmann::ordered_json::array();
  for (const auto& config : configs) {
    result.config_echo.push_back(echo_config(config));
  }
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<MetricsReport> per_seed(
        cells.begin() + static_cast<long>(c * seeds.size()),
        cells.begin() + static_cast<long>((c + 1) * seeds.size()));
    result.rows.push_back(
        {configs[c].display_name(), aggregate_seeds(per_seed)});
  }
  return result;
}

ProtocolResult run_score_baseline(const Corpus& corpus,
                                  ScorePredictor& predictor,
                                  const std::vector<std::uint64_t>& seeds,
                                  const SplitFractions& fractions) {
  if (seeds.empty()) {
    throw ConfigError("score baseline needs at least one seed");
  }
  require_valid(corpus);
  CorpusIndex index(corpus);

  std::vector<MulticlassReport> per_seed;
  per_seed.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    with_context(predictor.name() + ", seed " + std::to_string(seed), [&] {
      const SplitAssignment split = make_split(corpus, fractions, seed);

      std::vector<const StudentResponse*> train;
      for (const auto& id : split.responses_in(Partition::train)) {
        train.push_back(&index.response(id));
      }
      predictor.fit(index, train);

      std::vector<Rational> gold, predicted;
      for (const auto& id : split.responses_in(Partition::test)) {
        const StudentResponse& response = index.response(id);
        const Rational value = predictor.predict(index, response);
        const Rational max = index.max_points(response.question_id);
        if (value < Rational(0) || value > max) {
          throw DataError("predicted score " + value.str() +
                          " for response " + id + " is outside [0, " +
                          max.str() + "]");
        }
        predicted.push_back(value);
        gold.push_back(gold_earned(index, id));
      }
      per_seed.push_back(multiclass_metrics(gold, predicted));
    });
  }

  ProtocolResult result;
  result.protocol = "score-baseline";
  result.corpus_hash = corpus_hash(corpus);
  result.seeds = seeds;
  result.config_echo = nlohmann::ordered_json{{"predictor", predictor.name()}};
  result.rows.push_back({predictor.name(), aggregate_multiclass(per_seed)});
  return result;
}

ComparisonResult compare_formulations(const ProtocolResult& rubric,
                                      const ProtocolResult& score) {
  if (rubric.corpus_hash != score.corpus_hash) {
    throw DataError("formulation results come from different corpora (" +
                    rubric.corpus_hash + " vs " + score.corpus_hash + ")");
  }
  if (rubric.seeds != score.seeds) {
    throw DataError("formulation results were run over different seeds");
  }
  if (rubric.rows.empty() || score.rows.empty()) {
    throw DataError("formulation comparison needs rows on both sides");
  }
  if (score.rows.size() != 1 && score.rows.size() != rubric.rows.size()) {
    throw DataError("cannot pair " + std::to_string(rubric.rows.size()) +
                    " rubric rows with " + std::to_string(score.rows.size()) +
                    " score rows");
  }

  ComparisonResult result;
  result.corpus_hash = rubric.corpus_hash;
  result.seeds = rubric.seeds;
  for (std::size_t i = 0; i < rubric.rows.size(); ++i) {
    const ProtocolRow& r = rubric.rows[i];
    const ProtocolRow& s = score.rows[score.rows.size() == 1 ? 0 : i];
    result.rows.push_back({r.key, s.key, r.summary, s.summary,
                           r.summary.accuracy.mean - s.summary.accuracy.mean,
                           r.summary.f1.mean - s.summary.f1.mean});
  }
  return result;
}

ProtocolResult run_coldstart(const Corpus& corpus, const BackendConfig& config,
                             const Rational& val_fraction) {
  require_valid(corpus);
  config.validate();
  if (corpus.questions.size() < 2) {
    throw DataError("cold start needs at least two questions");
  }

  std::vector<MetricsReport> cells(corpus.questions.size());
  run_cells(cells.size(), [&](std::size_t i) {
    const std::string& question_id = corpus.questions[i].id;
    with_context("held-out question " + question_id, [&] {
      const std::uint64_t seed =
          derive_seed(config.seed, "coldstart/" + question_id);
      const SplitAssignment split =
          holdout_question_split(corpus, question_id, val_fraction, seed);
      cells[i] = evaluate_cell(corpus, config, split, seed);
    });
  });

  ProtocolResult result;
  result.protocol = "coldstart";
  result.corpus_hash = corpus_hash(corpus);
  result.seeds = {config.seed};
  result.config_echo = echo_config(config);
  result.config_echo["val_fraction"] = val_fraction.str();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.rows.push_back(
        {corpus.questions[i].id, aggregate_seeds({cells[i]})});
  }
  return result;
}

std::vector<Rational> default_sweep_fractions() {
  return {Rational(1, 20), Rational(1, 10), Rational(1, 5), Rational(2, 5),
          Rational(4, 5)};
}

ProtocolResult run_fraction_sweep(const Corpus& corpus,
                                  const BackendConfig& config,
                                  const std::vector<Rational>& fractions,
                                  const std::vector<std::uint64_t>& seeds) {
  require_valid(corpus);
  config.validate();
  if (fractions.empty()) throw ConfigError("sweep needs at least one fraction");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  for (const auto& fraction : fractions) {
    if (fraction <= Rational(0) || fraction > Rational(1)) {
      throw ConfigError("sweep fraction " + fraction.str() +
                        " is outside (0, 1]");
    }
  }

  std::vector<SplitAssignment> splits;
  splits.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    splits.push_back(make_split(corpus, SplitFractions{}, seed));
  }

  std::vector<MetricsReport> cells(fractions.size() * seeds.size());
  run_cells(cells.size(), [&](std::size_t i) {
    const std::size_t f = i / seeds.size();
    const std::size_t s = i % seeds.size();
    with_context("fraction " + fractions[f].str() + ", seed " +
                     std::to_string(seeds[s]),
                 [&] {
                   const SplitAssignment sub = subsample_train(
                       splits[s], corpus, fractions[f], seeds[s]);
                   cells[i] = evaluate_cell(corpus, config, sub, seeds[s]);
                 });
  });

  ProtocolResult result;
  result.protocol = "fraction-sweep";
  result.corpus_hash = corpus_hash(corpus);
  result.seeds = seeds;
  result.config_echo = echo_config(config);
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::vector<MetricsReport> per_seed(
        cells.begin() + static_cast<long>(f * seeds.size()),
        cells.begin() + static_cast<long>((f + 1) * seeds.size()));
    const RunSummary summary = aggregate_seeds(per_seed);
    result.rows.push_back({fractions[f].str(), summary});
    result.curve.push_back({fractions[f], "accuracy", summary.accuracy.mean,
                            summary.accuracy.stdev});
    result.curve.push_back(
        {fractions[f], "f1", summary.f1.mean, summary.f1.stdev});
  }
  return result;
}

namespace {

nlohmann::ordered_json summary_to_json(const RunSummary& summary) {
  auto metric = [](const MetricSummary& m) {
    return nlohmann::ordered_json{{"mean", m.mean}, {"std", m.stdev}};
  };
  return nlohmann::ordered_json{
      {"n_runs", summary.n_runs},
      {"accuracy", metric(summary.accuracy)},
      {"precision", metric(summary.precision)},
      {"recall", metric(summary.recall)},
      {"f1", metric(summary.f1)},
  };
}

RunSummary summary_from_json(const nlohmann::ordered_json& doc) {
  auto metric = [&](const char* key) {
    const auto& m = doc.at(key);
    return MetricSummary{m.at("mean").get<double>(),
                         m.at("std").get<double>()};
  };
  RunSummary summary;
  summary.n_runs = doc.at("n_runs").get<std::size_t>();
  summary.accuracy = metric("accuracy");
  summary.precision = metric("precision");
  summary.recall = metric("recall");
  summary.f1 = metric("f1");
  return summary;
}

}  // namespace

nlohmann::ordered_json protocol_result_to_json(const ProtocolResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json entry{{"key", row.key}};
    entry.update(summary_to_json(row.summary));
    rows.push_back(std::move(entry));
  }
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto& point : result.curve) {
    curve.push_back({{"fraction", point.fraction.str()},
                     {"metric", point.metric},
                     {"mean", point.mean},
                     {"std", point.stdev}});
  }
  return nlohmann::ordered_json{
      {"protocol", result.protocol}, {"corpus_hash", result.corpus_hash},
      {"seeds", result.seeds},       {"config", result.config_echo},
      {"rows", std::move(rows)},     {"curve", std::move(curve)},
  };
}

ProtocolResult protocol_result_from_json(const nlohmann::ordered_json& doc) {
  try {
    ProtocolResult result;
    result.protocol = doc.at("protocol").get<std::string>();
    result.corpus_hash = doc.at("corpus_hash").get<std::string>();
    result.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    result.config_echo = doc.at("config");
    for (const auto& row : doc.at("rows")) {
      result.rows.push_back(
          {row.at("key").get<std::string>(), summary_from_json(row)});
    }
    if (doc.contains("curve")) {
      for (const auto& point : doc.at("curve")) {
        result.curve.push_back(
            {Rational::parse(point.at("fraction").get<std::string>()),
             point.at("metric").get<std::string>(),
             point.at("mean").get<double>(), point.at("std").get<double>()});
      }
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed protocol result: ") + e.what());
  }
}

void save_protocol_result(const ProtocolResult& result,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << protocol_result_to_json(result).dump(2) << "\n";
  if (!out) throw DataError("failed while writing " + path.string());
}

ProtocolResult load_protocol_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unparsable protocol result " + path.string() + ": " +
                    e.what());
  }
  return protocol_result_from_json(doc);
}

}  // namespace rubricgrade
