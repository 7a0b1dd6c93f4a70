#include "rubricgrade/backends/generative.hpp"

#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "rubricgrade/errors.hpp"

#ifndef RUBRICGRADE_NO_HTTP
#define CPPHTTPLIB_OPENSSL_SUPPORT_DISABLED
#include "httplib.h"
#endif

namespace rubricgrade {

std::pair<bool, double> decide_from_logprobs(double lp_true, double lp_false) {
  if (!std::isfinite(lp_true) || !std::isfinite(lp_false)) {
    throw DataError("non-finite log-probability");
  }
  const double score = lp_true - lp_false;
  return {score > 0.0, score};
}

std::string render_prompt(const EntailmentPair& pair, std::string_view tmpl) {
  static constexpr std::string_view kPremise = "{premise}";
  static constexpr std::string_view kHypothesis = "{hypothesis}";
  if (tmpl.find(kPremise) == std::string_view::npos) {
    throw ConfigError("prompt template lacks {premise} placeholder");
  }
  if (tmpl.find(kHypothesis) == std::string_view::npos) {
    throw ConfigError("prompt template lacks {hypothesis} placeholder");
  }
  std::string out;
  out.reserve(tmpl.size() + pair.premise.size() + pair.hypothesis.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl.compare(pos, kPremise.size(), kPremise) == 0) {
      out += pair.premise;
      pos += kPremise.size();
    } else if (tmpl.compare(pos, kHypothesis.size(), kHypothesis) == 0) {
      out += pair.hypothesis;
      pos += kHypothesis.size();
    } else {
      out += tmpl[pos];
      ++pos;
    }
  }
  return out;
}

GenerativeBackend::GenerativeBackend(std::shared_ptr<LogProbAdapter> adapter,
                                     const BackendConfig& config)
    : adapter_(std::move(adapter)),
      template_(config.prompt_template.empty()
                    ? std::string(kDefaultPromptTemplate)
                    : config.prompt_template),
      temperature_(config.temperature),
      frequency_penalty_(config.frequency_penalty),
      presence_penalty_(config.presence_penalty) {
  if (!adapter_) throw ConfigError("generative backend needs an adapter");
  // Fail on a bad template at construction, not on the first predict call.
  EntailmentPair probe{"", "", "p", "h", std::nullopt};
  render_prompt(probe, template_);
}

std::string GenerativeBackend::name() const {
  return "generative/" + adapter_->name();
}

std::vector<Prediction> GenerativeBackend::predict(
    std::span<const EntailmentPair> pairs) const {
  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const EntailmentPair& pair = pairs[i];
    LogProbAdapter::Request request;
    request.prompt = render_prompt(pair, template_);
    request.temperature = temperature_;
    request.frequency_penalty = frequency_penalty_;
    request.presence_penalty = presence_penalty_;

    std::vector<double> logprobs;
    try {
      logprobs = adapter_->complete(request);
    } catch (const BackendError&) {
      throw;
    } catch (const std::exception& e) {
      throw BackendError("pair " + std::to_string(i) + " (" +
                         pair.response_id + ", " + pair.rubric_item_id +
                         "): " + e.what());
    }
    if (logprobs.size() != request.candidates.size()) {
      throw BackendError("pair " + std::to_string(i) +
                         ": adapter returned " +
                         std::to_string(logprobs.size()) +
                         " log-probabilities for " +
                         std::to_string(request.candidates.size()) +
                         " candidates");
    }
    const auto [label, score] = decide_from_logprobs(logprobs[0], logprobs[1]);
    out.push_back(
        {pair.response_id, pair.rubric_item_id, label, score});
  }
  return out;
}

#ifndef RUBRICGRADE_NO_HTTP
namespace {

// Splits "https://host:port/path" into client target and request path.
struct ParsedEndpoint {
  std::string base;
  std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must include a scheme: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {endpoint, "/"};
  }
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpLogProbAdapter : public LogProbAdapter {
public:
  HttpLogProbAdapter(const std::string& endpoint,
                     const std::string& credential_env)
      : endpoint_(parse_endpoint(endpoint)) {
    if (!credential_env.empty()) {
      if (const char* value = std::getenv(credential_env.c_str())) {
        bearer_ = value;
      }
    }
  }

  std::string name() const override { return "http"; }

  std::vector<double> complete(const Request& request) override {
    nlohmann::ordered_json body{
        {"prompt", request.prompt},
        {"temperature", request.temperature},
        {"frequency_penalty", request.frequency_penalty},
        {"presence_penalty", request.presence_penalty},
        {"candidates", request.candidates},
    };

    httplib::Client client(endpoint_.base);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!bearer_.empty()) {
      headers.emplace("Authorization", "Bearer " + bearer_);
    }
    auto res = client.Post(endpoint_.path, headers, body.dump(),
                           "application/json");
    if (!res) {
      throw BackendError("request to " + endpoint_.base + " failed: " +
                         httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw BackendError("service returned status " +
                         std::to_string(res->status));
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("unparsable service reply: ") + e.what());
    }
    if (!reply.contains("logprobs") || !reply["logprobs"].is_object()) {
      throw BackendError("service reply lacks a logprobs object");
    }
    const auto& table = reply["logprobs"];
    std::vector<double> out;
    out.reserve(request.candidates.size());
    for (const auto& candidate : request.candidates) {
      if (!table.contains(candidate) || !table[candidate].is_number()) {
        throw BackendError("service reply lacks a log-probability for \"" +
                           candidate + "\"");
      }
      out.push_back(table[candidate].get<double>());
    }
    return out;
  }

private:
  ParsedEndpoint endpoint_;
  std::string bearer_;
};

}  // namespace

std::unique_ptr<LogProbAdapter> make_http_logprob_adapter(
    const std::string& endpoint, const std::string& credential_env) {
  return std::make_unique<HttpLogProbAdapter>(endpoint, credential_env);
}
#else
std::unique_ptr<LogProbAdapter> make_http_logprob_adapter(
    const std::string&, const std::string&) {
  throw BackendError("built without HTTP support");
}
#endif

}  // namespace rubricgrade
