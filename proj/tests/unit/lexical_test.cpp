#include <doctest.h>

#include <vector>

#include "rubricgrade/backends/lexical.hpp"
#include "rubricgrade/backends/oracle.hpp"
#include "rubricgrade/errors.hpp"
#include "rubricgrade/pairs.hpp"
#include "rubricgrade/synthetic.hpp"

using namespace rubricgrade;

namespace {

EntailmentPair make_pair(std::string premise, std::string hypothesis) {
  EntailmentPair p;
  p.response_id = "r";
  p.rubric_item_id = "i";
  p.premise = std::move(premise);
  p.hypothesis = std::move(hypothesis);
  return p;
}

}  // namespace

TEST_CASE("lexical: both hypothesis tokens present clears theta 3/5") {
  const auto pair = make_pair("The gas exerts pressure on the walls", "gas pressure");
  const auto p = lexical_predict(pair, Rational(3, 5));
  CHECK(p.label);
  CHECK(p.score == doctest::Approx(0.4));
  CHECK(p.response_id == "r");
  CHECK(p.rubric_item_id == "i");
}

TEST_CASE("lexical: no hypothesis token present is FALSE") {
  const auto pair = make_pair("liquids flow downhill", "gas pressure");
  const auto p = lexical_predict(pair, Rational(3, 5));
  CHECK_FALSE(p.label);
  CHECK(p.score == doctest::Approx(-0.6));
}

TEST_CASE("lexical: overlap landing exactly on theta ties to FALSE") {
  // One of two content tokens, theta 1/2: score is exactly zero.
  const auto pair = make_pair("only the gas is mentioned", "gas pressure");
  const auto p = lexical_predict(pair, Rational(1, 2));
  CHECK_FALSE(p.label);
  CHECK(p.score == 0.0);

  // Same rule away from 1/2: three of four tokens at theta 3/4.
  const auto wide =
      make_pair("alpha beta gamma here", "alpha beta gamma delta");
  const auto q = lexical_predict(wide, Rational(3, 4));
  CHECK_FALSE(q.label);
  CHECK(q.score == 0.0);
}

TEST_CASE("lexical: full containment beats the tie rule at theta 1") {
  const auto pair = make_pair("the gas pressure rises", "gas pressure");
  const auto p = lexical_predict(pair, Rational(1));
  CHECK(p.label);
  CHECK(p.score == 1e-9);

  // Partial matches at theta 1 stay FALSE with a negative score.
  const auto partial = make_pair("only gas here", "gas pressure");
  const auto q = lexical_predict(partial, Rational(1));
  CHECK_FALSE(q.label);
  CHECK(q.score < 0.0);
}

TEST_CASE("lexical: stopwords are dropped from the hypothesis only") {
  // Glue words contribute nothing, so this hypothesis needs just "pressure".
  const auto pair = make_pair("pressure", "it should have the pressure");
  const auto p = lexical_predict(pair, Rational(1));
  CHECK(p.label);
}

TEST_CASE("lexical: all-stopword hypothesis is rejected") {
  const auto pair = make_pair("any premise", "it should have the");
  CHECK_THROWS_WITH_AS(lexical_predict(pair, Rational(1, 2)),
                       doctest::Contains("no content tokens"), DataError);
}

TEST_CASE("lexical: theta outside [0, 1] is a config error") {
  const auto pair = make_pair("a b", "b");
  CHECK_THROWS_AS(lexical_predict(pair, Rational(-1, 10)), ConfigError);
  CHECK_THROWS_AS(lexical_predict(pair, Rational(11, 10)), ConfigError);
  CHECK_THROWS_AS(LexicalBackend(Rational(2)), ConfigError);
}

TEST_CASE("lexical: backend name carries the threshold") {
  CHECK(LexicalBackend(Rational(3, 5)).name() == "lexical(theta=3/5)");
  CHECK(LexicalBackend(Rational(1)).name() == "lexical(theta=1)");
}

TEST_CASE("lexical: empty pair list yields empty predictions") {
  const LexicalBackend backend{Rational(3, 5)};
  CHECK(backend.predict({}).empty());
}

TEST_CASE("lexical: theta 1 recovers planted gold labels") {
  SyntheticSpec spec;
  spec.n_questions = 2;
  spec.items_per_question = 3;
  spec.responses_per_question = 25;
  const auto corpus = generate_synthetic_corpus(spec, 11);
  const auto pairs = build_pairs(corpus);

  const LexicalBackend lexical{Rational(1)};
  const auto predicted = lexical.predict(pairs);
  const auto gold = OracleBackend{}.predict(pairs);
  REQUIRE(predicted.size() == gold.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    CHECK(predicted[i].label == gold[i].label);
    CHECK(predicted[i].response_id == pairs[i].response_id);
    CHECK(predicted[i].rubric_item_id == pairs[i].rubric_item_id);
  }
}

TEST_CASE("lexical: label tracks the sign of the score at every theta") {
  SyntheticSpec spec;
  spec.n_questions = 2;
  spec.items_per_question = 4;
  spec.responses_per_question = 20;
  spec.distractor_rate = 0.8;
  const auto corpus = generate_synthetic_corpus(spec, 23);
  const auto pairs = build_pairs(corpus);

  const Rational grid[] = {Rational(0), Rational(1, 4), Rational(1, 2),
                           Rational(3, 5), Rational(3, 4), Rational(1)};
  for (const auto& theta : grid) {
    const LexicalBackend backend{theta};
    for (const auto& p : backend.predict(pairs)) {
      CHECK(p.label == (p.score > 0.0));
    }
  }
}

TEST_CASE("lexical: parallel and serial paths agree exactly") {
  SyntheticSpec spec;
  spec.n_questions = 3;
  spec.items_per_question = 5;
  spec.responses_per_question = 30;
  spec.distractor_rate = 0.5;
  const auto corpus = generate_synthetic_corpus(spec, 5);
  const auto pairs = build_pairs(corpus);

  const LexicalBackend backend{Rational(3, 5)};
  const auto parallel = backend.predict(pairs);
  const auto serial = backend.predict_serial(pairs);
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < parallel.size(); ++i) {
    CHECK(parallel[i].response_id == serial[i].response_id);
    CHECK(parallel[i].rubric_item_id == serial[i].rubric_item_id);
    CHECK(parallel[i].label == serial[i].label);
    CHECK(parallel[i].score == serial[i].score);
  }

  // Batch and single-pair entry points agree too.
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto one = lexical_predict(pairs[i], Rational(3, 5));
    CHECK(one.label == parallel[i].label);
    CHECK(one.score == parallel[i].score);
  }
}
