#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/protocols.hpp"
#include "rubricgrade/scoring.hpp"
#include "rubricgrade/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace rubricgrade;

namespace {

Corpus bench_corpus() {
  SyntheticSpec spec;
  spec.n_questions = 3;
  spec.items_per_question = 4;
  spec.responses_per_question = 20;
  return generate_synthetic_corpus(spec, 7);
}

BackendConfig oracle_config() {
  BackendConfig config;
  config.kind = BackendKind::oracle;
  return config;
}

BackendConfig stub_config() {
  BackendConfig config;
  config.kind = BackendKind::trainable;
  config.max_epochs = 2;
  return config;
}

}  // namespace

TEST_CASE("benchmark with the oracle scores exactly 1.0 everywhere") {
  const auto corpus = bench_corpus();
  const auto result =
      run_benchmark(corpus, {oracle_config()}, {1, 2, 3});

  CHECK(result.protocol == "benchmark");
  CHECK(result.corpus_hash == corpus_hash(corpus));
  CHECK(result.seeds == std::vector<std::uint64_t>{1, 2, 3});
  REQUIRE(result.rows.size() == 1);
  const auto& row = result.rows[0];
  CHECK(row.key == "oracle");
  CHECK(row.summary.n_runs == 3);
  CHECK(row.summary.accuracy.mean == 1.0);
  CHECK(row.summary.precision.mean == 1.0);
  CHECK(row.summary.recall.mean == 1.0);
  CHECK(row.summary.f1.mean == 1.0);
  CHECK(row.summary.accuracy.stdev == 0.0);
  CHECK(row.summary.f1.stdev == 0.0);
  CHECK(result.curve.empty());
}

TEST_CASE("benchmark rows follow config order and rerun byte-identically") {
  const auto corpus = bench_corpus();
  BackendConfig lexical;
  lexical.kind = BackendKind::lexical;
  lexical.lexical_theta = Rational(3, 5);
  const std::vector<BackendConfig> configs{lexical, oracle_config(),
                                           stub_config()};

  const auto result = run_benchmark(corpus, configs, {1, 2});
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].key == "lexical[theta=3/5]");
  CHECK(result.rows[1].key == "oracle");
  CHECK(result.rows[2].key == "trainable/memorizing-stub");
  CHECK(result.config_echo.size() == 3);

  const auto again = run_benchmark(corpus, configs, {1, 2});
  CHECK(protocol_result_to_json(result).dump(2) ==
        protocol_result_to_json(again).dump(2));
}

TEST_CASE("benchmark input validation and cell error context") {
  const auto corpus = bench_corpus();
  CHECK_THROWS_AS(run_benchmark(corpus, {}, {1}), ConfigError);
  CHECK_THROWS_AS(run_benchmark(corpus, {oracle_config()}, {}), ConfigError);
  CHECK_THROWS_WITH_AS(
      run_benchmark(corpus, {oracle_config(), oracle_config()}, {1}),
      doctest::Contains("duplicate backend display name"), ConfigError);

  Corpus broken;
  broken.questions.push_back({"q1", "text"});  // no items, no responses
  CHECK_THROWS_AS(run_benchmark(broken, {oracle_config()}, {1}),
                  CorpusInvalid);

  // A failing cell aborts the run and names itself.
  BackendConfig absent = stub_config();
  absent.initialization = "roberta-large";
  CHECK_THROWS_WITH_AS(
      run_benchmark(corpus, {absent}, {1}),
      doctest::Contains("trainable/roberta-large, seed 1"), BackendError);
}

TEST_CASE("score baseline: perfect predictor, enumerated constant-0") {
  const auto corpus = bench_corpus();
  const std::vector<std::uint64_t> seeds{1, 2};

  PerfectScorePredictor perfect;
  const auto ceiling = run_score_baseline(corpus, perfect, seeds);
  CHECK(ceiling.protocol == "score-baseline");
  REQUIRE(ceiling.rows.size() == 1);
  CHECK(ceiling.rows[0].key == "score/perfect");
  CHECK(ceiling.rows[0].summary.n_runs == 2);
  CHECK(ceiling.rows[0].summary.accuracy.mean == 1.0);
  CHECK(ceiling.rows[0].summary.accuracy.stdev == 0.0);

  // Constant-0 accuracy must equal the zero-gold share of each test split.
  ConstantScorePredictor zero;
  const auto flat = run_score_baseline(corpus, zero, seeds);
  const CorpusIndex index(corpus);
  double sum = 0.0;
  for (std::uint64_t seed : seeds) {
    const auto split = make_split(corpus, SplitFractions{}, seed);
    const auto test = split.responses_in(Partition::test);
    std::size_t zeros = 0;
    for (const auto& id : test) {
      zeros += gold_earned(index, id) == Rational(0);
    }
    sum += static_cast<double>(zeros) / static_cast<double>(test.size());
  }
  CHECK(flat.rows[0].summary.accuracy.mean ==
        doctest::Approx(sum / 2.0).epsilon(1e-12));
}

TEST_CASE("score baseline rejects out-of-range predictions") {
  class Wild : public ScorePredictor {
  public:
    std::string name() const override { return "score/wild"; }
    void fit(const CorpusIndex&,
             const std::vector<const StudentResponse*>&) override {}
    Rational predict(const CorpusIndex& index,
                     const StudentResponse& response) const override {
      return index.max_points(response.question_id) + Rational(1);
    }
  };
  Wild predictor;
  const auto corpus = bench_corpus();
  CHECK_THROWS_WITH_AS(run_score_baseline(corpus, predictor, {1}),
                       doctest::Contains("outside [0,"), DataError);
  CHECK_THROWS_AS(run_score_baseline(corpus, predictor, {}), ConfigError);
}

TEST_CASE("formulation comparison joins rows and takes deltas") {
  auto summary = [](double accuracy, double f1) {
    RunSummary s;
    s.n_runs = 2;
    s.accuracy = {accuracy, 0.01};
    s.f1 = {f1, 0.01};
    return s;
  };
  ProtocolResult rubric;
  rubric.protocol = "benchmark";
  rubric.corpus_hash = "feedfacefeedface";
  rubric.seeds = {1, 2};
  rubric.rows.push_back({"trainable/stub", summary(0.875, 0.75)});
  rubric.rows.push_back({"lexical[theta=3/5]", summary(0.5, 0.5)});

  ProtocolResult score;
  score.protocol = "score-baseline";
  score.corpus_hash = "feedfacefeedface";
  score.seeds = {1, 2};
  score.rows.push_back({"score/nearest-neighbor", summary(0.625, 0.25)});

  const auto comparison = compare_formulations(rubric, score);
  CHECK(comparison.corpus_hash == "feedfacefeedface");
  REQUIRE(comparison.rows.size() == 2);
  CHECK(comparison.rows[0].rubric_key == "trainable/stub");
  CHECK(comparison.rows[0].score_key == "score/nearest-neighbor");
  CHECK(comparison.rows[0].accuracy_delta == 0.25);
  CHECK(comparison.rows[0].f1_delta == 0.5);
  CHECK(comparison.rows[1].score_key == "score/nearest-neighbor");
  CHECK(comparison.rows[1].accuracy_delta == -0.125);

  // Comparing a result against itself is all-zero deltas.
  const auto self = compare_formulations(rubric, rubric);
  for (const auto& row : self.rows) {
    CHECK(row.accuracy_delta == 0.0);
    CHECK(row.f1_delta == 0.0);
  }

  auto other_corpus = score;
  other_corpus.corpus_hash = "0000000000000000";
  CHECK_THROWS_WITH_AS(compare_formulations(rubric, other_corpus),
                       doctest::Contains("different corpora"), DataError);

  auto other_seeds = score;
  other_seeds.seeds = {1, 3};
  CHECK_THROWS_WITH_AS(compare_formulations(rubric, other_seeds),
                       doctest::Contains("different seeds"), DataError);

  auto empty = score;
  empty.rows.clear();
  CHECK_THROWS_AS(compare_formulations(rubric, empty), DataError);

  auto lopsided = score;
  lopsided.rows.push_back({"score/perfect", summary(1.0, 1.0)});
  lopsided.rows.push_back({"score/constant-0", summary(0.25, 0.0)});
  CHECK_THROWS_WITH_AS(compare_formulations(rubric, lopsided),
                       doctest::Contains("cannot pair"), DataError);
}

TEST_CASE("cold start emits one row per question in document order") {
  SyntheticSpec spec;
  spec.n_questions = 4;
  spec.items_per_question = 3;
  spec.responses_per_question = 15;
  const auto corpus = generate_synthetic_corpus(spec, 7);

  const auto result = run_coldstart(corpus, oracle_config());
  CHECK(result.protocol == "coldstart");
  REQUIRE(result.rows.size() == 4);
  for (std::size_t q = 0; q < 4; ++q) {
    CHECK(result.rows[q].key == corpus.questions[q].id);
    CHECK(result.rows[q].summary.n_runs == 1);
    CHECK(result.rows[q].summary.accuracy.mean == 1.0);
    CHECK(result.rows[q].summary.f1.mean == 1.0);
  }
  CHECK(result.seeds == std::vector<std::uint64_t>{0});
  CHECK(result.config_echo.at("val_fraction") == "1/10");
}

TEST_CASE("cold start leaves the stub with nothing to recognize") {
  SyntheticSpec spec;
  spec.n_questions = 3;
  spec.items_per_question = 3;
  spec.responses_per_question = 15;
  const auto corpus = generate_synthetic_corpus(spec, 9);

  // Held-out rubric items were never trained on, so the stub answers
  // FALSE across the board: zero recall, zero F1 on every question.
  const auto result = run_coldstart(corpus, stub_config());
  REQUIRE(result.rows.size() == 3);
  for (const auto& row : result.rows) {
    CHECK(row.summary.f1.mean == 0.0);
    CHECK(row.summary.recall.mean == 0.0);
  }

  Corpus single;
  single.questions.push_back({"q1", "only one"});
  single.rubric_items.push_back({"i1", "q1", "criterion", Rational(1)});
  single.responses.push_back({"r1", "q1", "text"});
  single.judgments.push_back({"r1", "i1", true});
  CHECK_THROWS_WITH_AS(run_coldstart(single, stub_config()),
                       doctest::Contains("at least two questions"), DataError);
}

TEST_CASE("fraction sweep walks the default grid") {
  CHECK(default_sweep_fractions() ==
        std::vector<Rational>{Rational(1, 20), Rational(1, 10),
                              Rational(1, 5), Rational(2, 5), Rational(4, 5)});

  const auto corpus = bench_corpus();
  const auto result = run_fraction_sweep(corpus, oracle_config(),
                                         default_sweep_fractions(), {1, 2});
  CHECK(result.protocol == "fraction-sweep");
  REQUIRE(result.rows.size() == 5);
  CHECK(result.rows[0].key == "1/20");
  CHECK(result.rows[4].key == "4/5");
  REQUIRE(result.curve.size() == 10);
  for (std::size_t f = 0; f < 5; ++f) {
    const auto& accuracy = result.curve[2 * f];
    const auto& f1 = result.curve[2 * f + 1];
    CHECK(accuracy.fraction == default_sweep_fractions()[f]);
    CHECK(accuracy.metric == "accuracy");
    CHECK(f1.metric == "f1");
    // The oracle is flat: more training data cannot help it.
    CHECK(accuracy.mean == 1.0);
    CHECK(f1.mean == 1.0);
  }

  CHECK_THROWS_WITH_AS(
      run_fraction_sweep(corpus, oracle_config(), {Rational(3, 2)}, {1}),
      doctest::Contains("outside (0, 1]"), ConfigError);
  CHECK_THROWS_AS(
      run_fraction_sweep(corpus, oracle_config(), {Rational(0)}, {1}),
      ConfigError);
  CHECK_THROWS_AS(run_fraction_sweep(corpus, oracle_config(), {}, {1}),
                  ConfigError);
  CHECK_THROWS_AS(
      run_fraction_sweep(corpus, oracle_config(), {Rational(1, 2)}, {}),
      ConfigError);
}

TEST_CASE("stub benchmark result is frozen and survives serialization") {
  SyntheticSpec spec;
  spec.n_questions = 2;
  spec.items_per_question = 3;
  spec.responses_per_question = 20;
  const auto corpus = generate_synthetic_corpus(spec, 7);

  const auto result = run_benchmark(corpus, {stub_config()}, {1, 2});
  const auto text = protocol_result_to_json(result).dump(2) + "\n";
  const auto mismatch = testing::check_golden("stub_benchmark.json", text);
  CHECK_MESSAGE(mismatch.empty(), mismatch);

  // JSON round trip preserves every field bit for bit.
  const auto reparsed = protocol_result_from_json(protocol_result_to_json(result));
  CHECK(protocol_result_to_json(reparsed).dump(2) + "\n" == text);

  const auto path = std::filesystem::temp_directory_path() /
                    "rubricgrade_protocol_roundtrip.json";
  save_protocol_result(result, path);
  const auto loaded = load_protocol_result(path);
  CHECK(protocol_result_to_json(loaded).dump(2) + "\n" == text);
  std::filesystem::remove(path);

  nlohmann::ordered_json bad{{"protocol", "benchmark"}};
  CHECK_THROWS_WITH_AS(protocol_result_from_json(bad),
                       doctest::Contains("malformed protocol result"),
                       DataError);
}

TEST_CASE("sweep results keep their curve through the JSON round trip") {
  const auto corpus = bench_corpus();
  const auto result = run_fraction_sweep(corpus, oracle_config(),
                                         {Rational(1, 5), Rational(4, 5)}, {3});
  const auto reparsed =
      protocol_result_from_json(protocol_result_to_json(result));
  REQUIRE(reparsed.curve.size() == 4);
  CHECK(reparsed.curve[0].fraction == Rational(1, 5));
  CHECK(reparsed.curve[0].metric == "accuracy");
  CHECK(reparsed.curve[0].mean == result.curve[0].mean);
  CHECK(reparsed.rows.size() == result.rows.size());
  CHECK(reparsed.rows[0].summary == result.rows[0].summary);
}
