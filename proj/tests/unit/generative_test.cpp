#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "rubricgrade/backends/generative.hpp"
#include "rubricgrade/errors.hpp"
#include "support/fixtures.hpp"

using namespace rubricgrade;

namespace {

EntailmentPair sample_pair() {
  EntailmentPair p;
  p.response_id = "r1";
  p.rubric_item_id = "i1";
  p.premise = "The buffer resists pH changes because it absorbs added acid.";
  p.hypothesis = "Explains why the buffer resists pH changes.";
  return p;
}

// Adapter driven by a plain function, for exercising the backend without
// any network in the way.
class FakeAdapter : public LogProbAdapter {
public:
  using Fn = std::function<std::vector<double>(const Request&)>;
  explicit FakeAdapter(Fn fn) : fn_(std::move(fn)) {}

  std::string name() const override { return "fake"; }
  std::vector<double> complete(const Request& request) override {
    requests.push_back(request);
    return fn_(request);
  }

  std::vector<Request> requests;

private:
  Fn fn_;
};

}  // namespace

TEST_CASE("decide_from_logprobs follows argmax with a FALSE tie") {
  {
    const auto [label, score] = decide_from_logprobs(-0.2, -1.5);
    CHECK(label);
    CHECK(score == doctest::Approx(1.3));
  }
  {
    const auto [label, score] = decide_from_logprobs(-3.0, -1.0);
    CHECK_FALSE(label);
    CHECK(score == -2.0);
  }
  {
    const auto [label, score] = decide_from_logprobs(-0.7, -0.7);
    CHECK_FALSE(label);
    CHECK(score == 0.0);
  }
}

TEST_CASE("decide_from_logprobs rejects non-finite input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(decide_from_logprobs(nan, -1.0), DataError);
  CHECK_THROWS_AS(decide_from_logprobs(-1.0, nan), DataError);
  CHECK_THROWS_AS(decide_from_logprobs(inf, -1.0), DataError);
  CHECK_THROWS_AS(decide_from_logprobs(-1.0, -inf), DataError);
}

TEST_CASE("decide_from_logprobs is translation invariant on exact inputs") {
  // Binary fractions keep every sum exact, so the check can demand
  // bit-identical scores rather than approximate ones.
  const double shifts[] = {2.0, -3.5, 0.25, -128.0};
  for (double lp_true = -4.0; lp_true <= 0.0; lp_true += 0.125) {
    for (double lp_false = -4.0; lp_false <= 0.0; lp_false += 0.125) {
      const auto base = decide_from_logprobs(lp_true, lp_false);
      for (double shift : shifts) {
        const auto moved =
            decide_from_logprobs(lp_true + shift, lp_false + shift);
        CHECK(moved.first == base.first);
        CHECK(moved.second == base.second);
      }
    }
  }
}

TEST_CASE("render_prompt substitutes both placeholders verbatim") {
  EntailmentPair p;
  p.premise = "a";
  p.hypothesis = "b";
  CHECK(render_prompt(p, "P: {premise} H: {hypothesis} True or False?") ==
        "P: a H: b True or False?");

  // Placeholder-looking text inside the substituted values stays literal.
  p.premise = "x {hypothesis} y";
  p.hypothesis = "h";
  CHECK(render_prompt(p, "{premise}|{hypothesis}") == "x {hypothesis} y|h");
}

TEST_CASE("render_prompt demands both placeholders") {
  const auto p = sample_pair();
  CHECK_THROWS_WITH_AS(render_prompt(p, "only {premise} here"),
                       doctest::Contains("{hypothesis}"), ConfigError);
  CHECK_THROWS_WITH_AS(render_prompt(p, "only {hypothesis} here"),
                       doctest::Contains("{premise}"), ConfigError);
}

TEST_CASE("default prompt template render is frozen") {
  const auto text = render_prompt(sample_pair(), kDefaultPromptTemplate);
  CHECK(text.find("True or False") != std::string::npos);
  CHECK(text.find(sample_pair().premise) != std::string::npos);
  CHECK(text.find(sample_pair().hypothesis) != std::string::npos);
  const auto mismatch = testing::check_golden("default_prompt.txt", text);
  CHECK_MESSAGE(mismatch.empty(), mismatch);
}

TEST_CASE("generative backend maps adapter log-probs onto predictions") {
  auto adapter = std::make_shared<FakeAdapter>([](const auto& request) {
    // TRUE whenever the hypothesis mentions a buffer.
    const bool yes = request.prompt.find("buffer") != std::string::npos;
    return yes ? std::vector<double>{-0.25, -1.5}
               : std::vector<double>{-2.0, -0.5};
  });
  BackendConfig config;
  config.kind = BackendKind::generative;
  const GenerativeBackend backend{adapter, config};
  CHECK(backend.name() == "generative/fake");

  auto second = sample_pair();
  second.response_id = "r2";
  second.hypothesis = "Names the acid involved.";
  second.premise = "Some unrelated text.";
  const std::vector<EntailmentPair> pairs{sample_pair(), second};

  const auto predictions = backend.predict(pairs);
  REQUIRE(predictions.size() == 2);
  CHECK(predictions[0].response_id == "r1");
  CHECK(predictions[0].label);
  CHECK(predictions[0].score == 1.25);
  CHECK(predictions[1].response_id == "r2");
  CHECK_FALSE(predictions[1].label);
  CHECK(predictions[1].score == -1.5);

  // The adapter saw the default template with both texts substituted and
  // the stock sampling parameters.
  REQUIRE(adapter->requests.size() == 2);
  const auto& request = adapter->requests[0];
  CHECK(request.prompt.rfind("You are grading", 0) == 0);
  CHECK(request.prompt.find(pairs[0].premise) != std::string::npos);
  CHECK(request.temperature == 1.0);
  CHECK(request.frequency_penalty == 0.0);
  CHECK(request.presence_penalty == 0.0);
  REQUIRE(request.candidates.size() == 2);
  CHECK(request.candidates[0] == "True");
  CHECK(request.candidates[1] == "False");
}

TEST_CASE("generative backend validates the template at construction") {
  auto adapter = std::make_shared<FakeAdapter>(
      [](const auto&) { return std::vector<double>{0.0, 0.0}; });
  BackendConfig config;
  config.kind = BackendKind::generative;
  config.prompt_template = "no placeholders at all";
  CHECK_THROWS_AS(GenerativeBackend(adapter, config), ConfigError);
  CHECK_THROWS_AS(GenerativeBackend(nullptr, BackendConfig{}), ConfigError);
}

TEST_CASE("generative backend reports the failing pair") {
  auto flaky = std::make_shared<FakeAdapter>(
      [calls = std::make_shared<int>(0)](const auto&) {
        if ((*calls)++ == 1) throw std::runtime_error("socket reset");
        return std::vector<double>{-0.5, -0.25};
      });
  const GenerativeBackend backend{flaky, BackendConfig{}};
  auto second = sample_pair();
  second.response_id = "r9";
  second.rubric_item_id = "i3";
  const std::vector<EntailmentPair> pairs{sample_pair(), second};
  CHECK_THROWS_WITH_AS(backend.predict(pairs),
                       doctest::Contains("pair 1 (r9, i3)"), BackendError);

  auto short_reply = std::make_shared<FakeAdapter>(
      [](const auto&) { return std::vector<double>{-0.5}; });
  const GenerativeBackend clipped{short_reply, BackendConfig{}};
  CHECK_THROWS_WITH_AS(clipped.predict({&pairs[0], 1}),
                       doctest::Contains("1 log-probabilities"), BackendError);
}

TEST_CASE("generative backend passes an empty pair list through") {
  auto adapter = std::make_shared<FakeAdapter>(
      [](const auto&) { return std::vector<double>{0.0, 0.0}; });
  const GenerativeBackend backend{adapter, BackendConfig{}};
  CHECK(backend.predict({}).empty());
  CHECK(adapter->requests.empty());
}

TEST_CASE("http adapter speaks the documented wire protocol") {
  httplib::Server server;
  std::string seen_auth;
  nlohmann::json seen_body;
  server.Post("/v1/logprobs",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_auth = req.get_header_value("Authorization");
                seen_body = nlohmann::json::parse(req.body);
                res.set_content(
                    R"({"logprobs": {"True": -0.25, "False": -1.5}})",
                    "application/json");
              });
  server.Post("/v1/broken",
              [](const httplib::Request&, httplib::Response& res) {
                res.set_content(R"({"logprobs": {"True": -0.25}})",
                                "application/json");
              });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("RUBRICGRADE_TEST_KEY", "tt-0123", 1);
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  {
    BackendConfig config;
    config.kind = BackendKind::generative;
    const GenerativeBackend backend{
        make_http_logprob_adapter(base + "/v1/logprobs",
                                  "RUBRICGRADE_TEST_KEY"),
        config};
    const std::vector<EntailmentPair> pairs{sample_pair()};
    const auto predictions = backend.predict(pairs);
    REQUIRE(predictions.size() == 1);
    CHECK(predictions[0].label);
    CHECK(predictions[0].score == 1.25);
    CHECK(seen_auth == "Bearer tt-0123");
    CHECK(seen_body["temperature"] == 1.0);
    CHECK(seen_body["candidates"] ==
          nlohmann::json::array({"True", "False"}));
    CHECK(seen_body["prompt"].get<std::string>().find("True or False") !=
          std::string::npos);
  }

  {
    // A reply missing one candidate surfaces as a backend error.
    const GenerativeBackend backend{
        make_http_logprob_adapter(base + "/v1/broken", ""), BackendConfig{}};
    const std::vector<EntailmentPair> pairs{sample_pair()};
    CHECK_THROWS_WITH_AS(backend.predict(pairs),
                         doctest::Contains("\"False\""), BackendError);
  }

  unsetenv("RUBRICGRADE_TEST_KEY");
  server.stop();
  worker.join();
}

TEST_CASE("http adapter endpoint needs a scheme") {
  CHECK_THROWS_AS(make_http_logprob_adapter("localhost:80/x", ""), ConfigError);
}
