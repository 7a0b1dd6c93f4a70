// Command-line front end. Every verb delegates to one library operation;
// all randomness comes in through explicit --seed flags or config fields
// and is echoed into output provenance. Exit codes: 0 success, 1 data
// problems, 2 configuration problems, 3 backend failures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rubricgrade/backend.hpp"
#include "rubricgrade/corpus.hpp"
#include "rubricgrade/errors.hpp"
#include "rubricgrade/pairs.hpp"
#include "rubricgrade/protocols.hpp"
#include "rubricgrade/report.hpp"
#include "rubricgrade/scoring.hpp"
#include "rubricgrade/split.hpp"
#include "rubricgrade/synthetic.hpp"

namespace fs = std::filesystem;
using namespace rubricgrade;

namespace {

// Declarative run description; command-line flags override these fields.
struct RunConfig {
  std::string corpus;
  std::string out;
  BackendConfig backend;
  std::string protocol_name;
  std::vector<std::uint64_t> seeds;
  std::vector<Rational> sweep_fractions;
  std::optional<Rational> val_fraction;
  std::string predictor;
  std::optional<SplitFractions> split_fractions;
  std::vector<ReportFormat> formats;
};

Rational rational_value(const nlohmann::ordered_json& value,
                        const std::string& key) {
  try {
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number()) return Rational::parse(value.dump());
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
  throw ConfigError(key + " must be a number or a rational string");
}

RunConfig parse_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unparsable config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "corpus") {
        config.corpus = value.get<std::string>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else if (key == "backend") {
        config.backend = backend_config_from_json(value);
      } else if (key == "protocol") {
        if (!value.is_object()) {
          throw ConfigError("protocol section must be an object");
        }
        for (const auto& [pkey, pvalue] : value.items()) {
          if (pkey == "name") {
            config.protocol_name = pvalue.get<std::string>();
          } else if (pkey == "seeds") {
            config.seeds = pvalue.get<std::vector<std::uint64_t>>();
          } else if (pkey == "fractions") {
            for (const auto& f : pvalue) {
              config.sweep_fractions.push_back(
                  rational_value(f, "protocol.fractions"));
            }
          } else if (pkey == "val_fraction") {
            config.val_fraction =
                rational_value(pvalue, "protocol.val_fraction");
          } else if (pkey == "predictor") {
            config.predictor = pvalue.get<std::string>();
          } else if (pkey == "split") {
            SplitFractions fractions;
            for (const auto& [skey, svalue] : pvalue.items()) {
              if (skey == "train") {
                fractions.train = rational_value(svalue, "protocol.split.train");
              } else if (skey == "val") {
                fractions.val = rational_value(svalue, "protocol.split.val");
              } else if (skey == "test") {
                fractions.test = rational_value(svalue, "protocol.split.test");
              } else {
                throw ConfigError("unknown config key: protocol.split." + skey);
              }
            }
            config.split_fractions = fractions;
          } else {
            throw ConfigError("unknown config key: protocol." + pkey);
          }
        }
      } else if (key == "formats") {
        for (const auto& f : value) {
          config.formats.push_back(
              report_format_from_string(f.get<std::string>()));
        }
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return config;
}

// Shared flag state; whatever the user passed wins over the config file.
struct Flags {
  std::string config_path;
  std::string corpus;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::string backend_kind;
  std::string format;
  std::string model_path;
  std::string predictor;
  std::string partition;
  std::string val_fraction;
  std::vector<std::string> fractions;
  std::string rubric_result;
  std::string score_result;
  SyntheticSpec synth_spec;
  std::string split_train, split_val, split_test;
};

RunConfig resolve(const Flags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = parse_run_config(flags.config_path);
  }
  if (!flags.corpus.empty()) config.corpus = flags.corpus;
  if (!flags.out.empty()) config.out = flags.out;
  if (!flags.seeds.empty()) config.seeds = flags.seeds;
  if (!flags.backend_kind.empty()) {
    config.backend.kind = backend_kind_from_string(flags.backend_kind);
  }
  if (!flags.format.empty()) {
    config.formats = {report_format_from_string(flags.format)};
  }
  if (!flags.predictor.empty()) config.predictor = flags.predictor;
  if (!flags.val_fraction.empty()) {
    config.val_fraction = Rational::parse(flags.val_fraction);
  }
  if (!flags.fractions.empty()) {
    config.sweep_fractions.clear();
    for (const auto& f : flags.fractions) {
      config.sweep_fractions.push_back(Rational::parse(f));
    }
  }
  if (!flags.split_train.empty() || !flags.split_val.empty() ||
      !flags.split_test.empty()) {
    SplitFractions fractions = config.split_fractions.value_or(SplitFractions{});
    if (!flags.split_train.empty())
      fractions.train = Rational::parse(flags.split_train);
    if (!flags.split_val.empty())
      fractions.val = Rational::parse(flags.split_val);
    if (!flags.split_test.empty())
      fractions.test = Rational::parse(flags.split_test);
    config.split_fractions = fractions;
  }
  if (config.formats.empty()) {
    config.formats = {ReportFormat::markdown};
  }
  return config;
}

void require_protocol_name(const RunConfig& config, const std::string& expected) {
  if (!config.protocol_name.empty() && config.protocol_name != expected) {
    throw ConfigError("config names protocol '" + config.protocol_name +
                      "' but the invoked command runs '" + expected + "'");
  }
}

Corpus load_named_corpus(const RunConfig& config) {
  if (config.corpus.empty()) throw ConfigError("no corpus given");
  return load_corpus(config.corpus);
}

std::vector<std::uint64_t> seeds_or_default(const RunConfig& config) {
  if (!config.seeds.empty()) return config.seeds;
  return {1, 2, 3, 4, 5};
}

std::uint64_t single_seed(const RunConfig& config) {
  if (config.seeds.empty()) return config.backend.seed;
  if (config.seeds.size() != 1) {
    throw ConfigError("this command takes exactly one seed");
  }
  return config.seeds.front();
}

void write_text_file(const std::string& text, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed while writing " + path.string());
}

const char* format_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::markdown: return ".md";
    case ReportFormat::structured: return ".txt";
    case ReportFormat::delimited: return ".csv";
  }
  return ".txt";
}

fs::path ensure_out_dir(const RunConfig& config) {
  if (config.out.empty()) throw ConfigError("this command needs --out");
  fs::create_directories(config.out);
  return config.out;
}

// Writes result.json plus one report per requested format; falls back to
// stdout when no output directory was configured.
void deliver_result(const ProtocolResult& result, const RunConfig& config) {
  if (config.out.empty()) {
    std::cout << render_report(result, config.formats.front());
    return;
  }
  const fs::path dir = ensure_out_dir(config);
  save_protocol_result(result, dir / "result.json");
  for (ReportFormat format : config.formats) {
    emit_report(result, format,
                dir / (std::string("report") + format_extension(format)));
  }
  if (!result.curve.empty()) {
    write_text_file(render_curve(result), dir / "curve.csv");
  }
}

std::unique_ptr<Backend> prediction_backend(const RunConfig& config,
                                            const std::string& model_path) {
  if (!model_path.empty()) {
    return std::make_unique<FittedBackend>(load_trainable_runtime(model_path));
  }
  return make_backend(config.backend);
}

int cmd_validate(const std::string& corpus_path) {
  try {
    load_corpus(corpus_path);
  } catch (const CorpusInvalid& e) {
    for (const auto& violation : e.violations()) {
      std::cout << violation << "\n";
    }
    return 1;
  }
  return 0;
}

void cmd_stats(const RunConfig& config) {
  const Corpus corpus = load_named_corpus(config);
  const std::string text = stats_to_json_text(corpus_stats(corpus));
  if (config.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(text, config.out);
  }
}

void cmd_split(const RunConfig& config) {
  const Corpus corpus = load_named_corpus(config);
  const SplitAssignment split =
      make_split(corpus, config.split_fractions.value_or(SplitFractions{}),
                 single_seed(config));
  const std::string text = split_to_json_text(split);
  if (config.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(text, config.out);
  }
}

void cmd_synth(const RunConfig& config, const SyntheticSpec& spec) {
  const Corpus corpus = generate_synthetic_corpus(spec, single_seed(config));
  const std::string text = corpus_to_json_text(corpus);
  if (config.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(text, config.out);
  }
}

void cmd_train(const RunConfig& config) {
  const Corpus corpus = load_named_corpus(config);
  BackendConfig backend = config.backend;
  backend.kind = BackendKind::trainable;
  if (!config.seeds.empty()) backend.seed = single_seed(config);

  const SplitAssignment split = make_split(
      corpus, config.split_fractions.value_or(SplitFractions{}), backend.seed);
  PairOptions options{backend.prepend_question};
  const auto train = build_pairs(corpus, split, Partition::train, options);
  const auto val = build_pairs(corpus, split, Partition::val, options);

  auto runtime = make_trainable_runtime(backend.initialization);
  FitResult fitted = backend_fit(*runtime, train, val, backend);

  const fs::path dir = ensure_out_dir(config);
  write_text_file(fitted.model->save_state().dump(2) + "\n",
                  dir / "model.json");
  write_text_file(training_log_to_json_text(fitted.log),
                  dir / "training_log.json");
  write_text_file(split_to_json_text(split), dir / "split.json");
}

void cmd_predict(const RunConfig& config, const std::string& model_path,
                 const std::string& partition) {
  const Corpus corpus = load_named_corpus(config);
  PairOptions options{config.backend.prepend_question};

  std::vector<EntailmentPair> pairs;
  if (partition.empty()) {
    pairs = build_pairs(corpus, options);
  } else {
    const SplitAssignment split = make_split(
        corpus, config.split_fractions.value_or(SplitFractions{}),
        single_seed(config));
    pairs = build_pairs(corpus, split, partition_from_string(partition),
                        options);
  }

  const auto backend = prediction_backend(config, model_path);
  const auto predictions = backend->predict(pairs);
  if (config.out.empty()) {
    std::cout << predictions_to_jsonl(predictions);
  } else {
    save_predictions(predictions, config.out);
  }
}

void cmd_grade(const RunConfig& config, const std::string& model_path) {
  const Corpus corpus = load_named_corpus(config);
  CorpusIndex index(corpus);
  PairOptions options{config.backend.prepend_question};
  const auto pairs = build_pairs(corpus, options);

  const auto backend = prediction_backend(config, model_path);
  const auto predictions = backend->predict(pairs);
  const auto scored = score_corpus(corpus, predictions);

  // Rebuild the per-response slices once for the feedback reports.
  std::unordered_map<std::string, std::vector<Prediction>> by_response;
  for (const auto& prediction : predictions) {
    by_response[prediction.response_id].push_back(prediction);
  }
  const bool markdown =
      config.formats.empty() || config.formats.front() != ReportFormat::structured;
  std::string feedback;
  for (const auto& response : corpus.responses) {
    std::vector<RubricItem> items;
    for (const RubricItem* item : index.items_of(response.question_id)) {
      items.push_back(*item);
    }
    feedback += render_feedback(
        feedback_report(response, items, by_response[response.id]),
        markdown ? FeedbackFormat::markdown : FeedbackFormat::plain);
    feedback += "\n";
  }

  const fs::path dir = ensure_out_dir(config);
  write_text_file(scored_to_jsonl(scored), dir / "scored.jsonl");
  write_text_file(feedback, dir / (markdown ? "feedback.md" : "feedback.txt"));
}

void cmd_eval(const RunConfig& config) {
  require_protocol_name(config, "benchmark");
  const Corpus corpus = load_named_corpus(config);
  const ProtocolResult result = run_benchmark(
      corpus, {config.backend}, seeds_or_default(config),
      config.split_fractions.value_or(SplitFractions{}));
  deliver_result(result, config);
}

void cmd_coldstart(const RunConfig& config) {
  require_protocol_name(config, "coldstart");
  const Corpus corpus = load_named_corpus(config);
  BackendConfig backend = config.backend;
  if (!config.seeds.empty()) backend.seed = single_seed(config);
  const ProtocolResult result = run_coldstart(
      corpus, backend, config.val_fraction.value_or(Rational(1, 10)));
  deliver_result(result, config);
}

void cmd_sweep(const RunConfig& config) {
  require_protocol_name(config, "fraction-sweep");
  const Corpus corpus = load_named_corpus(config);
  const auto fractions = config.sweep_fractions.empty()
                             ? default_sweep_fractions()
                             : config.sweep_fractions;
  const ProtocolResult result = run_fraction_sweep(
      corpus, config.backend, fractions, seeds_or_default(config));
  deliver_result(result, config);
}

void cmd_compare(const RunConfig& config, const std::string& rubric_path,
                 const std::string& score_path) {
  ProtocolResult rubric, score;
  if (!rubric_path.empty() && !score_path.empty()) {
    rubric = load_protocol_result(rubric_path);
    score = load_protocol_result(score_path);
  } else if (rubric_path.empty() && score_path.empty()) {
    // Run both formulations here, on the same corpus and seeds.
    const Corpus corpus = load_named_corpus(config);
    const auto seeds = seeds_or_default(config);
    const auto fractions = config.split_fractions.value_or(SplitFractions{});
    rubric = run_benchmark(corpus, {config.backend}, seeds, fractions);
    auto predictor = make_score_predictor(config.predictor);
    score = run_score_baseline(corpus, *predictor, seeds, fractions);
  } else {
    throw ConfigError("--rubric and --score must be given together");
  }

  const ComparisonResult comparison = compare_formulations(rubric, score);
  if (config.out.empty()) {
    std::cout << render_comparison(comparison, config.formats.front());
    return;
  }
  const fs::path dir = ensure_out_dir(config);
  save_protocol_result(rubric, dir / "rubric_result.json");
  save_protocol_result(score, dir / "score_result.json");
  for (ReportFormat format : config.formats) {
    emit_comparison(comparison, format,
                    dir / (std::string("comparison") + format_extension(format)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rubric-entailment grading engine"};
  app.require_subcommand(1);

  Flags flags;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "run config JSON file");
    cmd->add_option("--corpus", flags.corpus, "corpus JSON file");
    cmd->add_option("--out", flags.out, "output file or directory");
    cmd->add_option("--seed", flags.seeds, "seed (repeat for multi-seed runs)");
    cmd->add_option("--backend", flags.backend_kind,
                    "backend kind: trainable | generative | lexical | oracle");
    cmd->add_option("--format", flags.format,
                    "report format: delimited | structured | markdown");
  };

  std::string validate_path;
  auto* validate =
      app.add_subcommand("validate", "check a corpus file's invariants");
  validate->add_option("corpus", validate_path, "corpus JSON file")
      ->required();

  auto* stats = app.add_subcommand("stats", "corpus summary statistics");
  add_common(stats);

  auto* split = app.add_subcommand("split", "materialize a train/val/test split");
  add_common(split);
  split->add_option("--train", flags.split_train, "train fraction");
  split->add_option("--val", flags.split_val, "val fraction");
  split->add_option("--test", flags.split_test, "test fraction");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth);
  synth->add_option("--questions", flags.synth_spec.n_questions);
  synth->add_option("--items", flags.synth_spec.items_per_question);
  synth->add_option("--responses", flags.synth_spec.responses_per_question);
  synth->add_option("--distractor-rate", flags.synth_spec.distractor_rate);

  auto* train = app.add_subcommand("train", "fit a trainable backend");
  add_common(train);

  auto* predict = app.add_subcommand("predict", "emit per-pair verdicts");
  add_common(predict);
  predict->add_option("--model", flags.model_path, "fitted model state file");
  predict->add_option("--partition", flags.partition,
                      "train | val | test (default: all pairs)");

  auto* grade = app.add_subcommand("grade", "score responses and write feedback");
  add_common(grade);
  grade->add_option("--model", flags.model_path, "fitted model state file");

  auto* eval = app.add_subcommand("eval", "multi-seed benchmark");
  add_common(eval);

  auto* coldstart =
      app.add_subcommand("coldstart", "hold out each question in turn");
  add_common(coldstart);
  coldstart->add_option("--val-fraction", flags.val_fraction,
                        "validation slice carved from training questions");

  auto* sweep = app.add_subcommand("sweep", "training-fraction sweep");
  add_common(sweep);
  sweep->add_option("--fraction", flags.fractions,
                    "training fraction (repeatable)");

  auto* compare =
      app.add_subcommand("compare", "rubric vs whole-score formulation");
  add_common(compare);
  compare->add_option("--predictor", flags.predictor,
                      "score predictor: nearest-neighbor | perfect | constant-0");
  compare->add_option("--rubric", flags.rubric_result,
                      "existing rubric-side result.json");
  compare->add_option("--score", flags.score_result,
                      "existing score-side result.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_path);
    const RunConfig config = resolve(flags);
    if (stats->parsed()) cmd_stats(config);
    if (split->parsed()) cmd_split(config);
    if (synth->parsed()) cmd_synth(config, flags.synth_spec);
    if (train->parsed()) cmd_train(config);
    if (predict->parsed()) cmd_predict(config, flags.model_path, flags.partition);
    if (grade->parsed()) cmd_grade(config, flags.model_path);
    if (eval->parsed()) cmd_eval(config);
    if (coldstart->parsed()) cmd_coldstart(config);
    if (sweep->parsed()) cmd_sweep(config);
    if (compare->parsed())
      cmd_compare(config, flags.rubric_result, flags.score_result);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    // Anything else escaping here is a malformed flag/config value.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
