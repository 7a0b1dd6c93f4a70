#include "rubricgrade/backend.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rubricgrade/backends/generative.hpp"
#include "rubricgrade/backends/lexical.hpp"
#include "rubricgrade/backends/memorizing_stub.hpp"
#include "rubricgrade/backends/oracle.hpp"
#include "rubricgrade/errors.hpp"
#include "rubricgrade/metrics.hpp"
#include "rubricgrade/rng.hpp"

namespace rubricgrade {

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::trainable: return "trainable";
    case BackendKind::generative: return "generative";
    case BackendKind::lexical: return "lexical";
    case BackendKind::oracle: return "oracle";
  }
  throw ConfigError("unrepresentable backend kind");
}

BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "trainable") return BackendKind::trainable;
  if (s == "generative") return BackendKind::generative;
  if (s == "lexical") return BackendKind::lexical;
  if (s == "oracle") return BackendKind::oracle;
  throw ConfigError("unknown backend kind: " + s);
}

void BackendConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  auto beta_ok = [](double b) { return b >= 0.0 && b < 1.0; };
  if (!beta_ok(optimizer_betas.first) || !beta_ok(optimizer_betas.second)) {
    throw ConfigError("optimizer betas must lie in [0, 1)");
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be non-negative and finite");
  }
  if (!std::isfinite(frequency_penalty) || !std::isfinite(presence_penalty)) {
    throw ConfigError("penalties must be finite");
  }
  if (lexical_theta < Rational(0) || lexical_theta > Rational(1)) {
    throw ConfigError("lexical_theta must lie in [0, 1]");
  }
  if (kind == BackendKind::generative && endpoint.empty()) {
    throw ConfigError("generative backend needs an endpoint");
  }
}

std::string BackendConfig::display_name() const {
  switch (kind) {
    case BackendKind::trainable:
      return "trainable/" +
             (initialization.empty() ? std::string("memorizing-stub")
                                     : initialization);
    case BackendKind::generative:
      return "generative";
    case BackendKind::lexical:
      return "lexical[theta=" + lexical_theta.str() + "]";
    case BackendKind::oracle:
      return "oracle";
  }
  throw ConfigError("unrepresentable backend kind");
}

nlohmann::ordered_json backend_config_to_json(const BackendConfig& config) {
  return nlohmann::ordered_json{
      {"kind", to_string(config.kind)},
      {"initialization", config.initialization},
      {"learning_rate", config.learning_rate},
      {"batch_size", config.batch_size},
      {"max_epochs", config.max_epochs},
      {"optimizer_betas",
       {config.optimizer_betas.first, config.optimizer_betas.second}},
      {"seed", config.seed},
      {"temperature", config.temperature},
      {"frequency_penalty", config.frequency_penalty},
      {"presence_penalty", config.presence_penalty},
      {"lexical_theta", config.lexical_theta.str()},
      {"prepend_question", config.prepend_question},
      {"endpoint", config.endpoint},
      {"credential_env", config.credential_env},
      {"prompt_template", config.prompt_template},
  };
}

namespace {

Rational rational_from_json(const nlohmann::ordered_json& value,
                            const std::string& key) {
  try {
    // Numbers go through their shortest decimal form, so 0.6 parses to 3/5.
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number()) return Rational::parse(value.dump());
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
  throw ConfigError(key + " must be a number or a rational string");
}

}  // namespace

BackendConfig backend_config_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw ConfigError("backend config must be an object");
  BackendConfig config;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "kind") {
        config.kind = backend_kind_from_string(value.get<std::string>());
      } else if (key == "initialization") {
        config.initialization = value.get<std::string>();
      } else if (key == "learning_rate") {
        config.learning_rate = value.get<double>();
      } else if (key == "batch_size") {
        config.batch_size = value.get<int>();
      } else if (key == "max_epochs") {
        config.max_epochs = value.get<int>();
      } else if (key == "optimizer_betas") {
        if (!value.is_array() || value.size() != 2) {
          throw ConfigError("optimizer_betas must be a two-element array");
        }
        config.optimizer_betas = {value[0].get<double>(),
                                  value[1].get<double>()};
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "temperature") {
        config.temperature = value.get<double>();
      } else if (key == "frequency_penalty") {
        config.frequency_penalty = value.get<double>();
      } else if (key == "presence_penalty") {
        config.presence_penalty = value.get<double>();
      } else if (key == "lexical_theta") {
        config.lexical_theta = rational_from_json(value, key);
      } else if (key == "prepend_question") {
        config.prepend_question = value.get<bool>();
      } else if (key == "endpoint") {
        config.endpoint = value.get<std::string>();
      } else if (key == "credential_env") {
        config.credential_env = value.get<std::string>();
      } else if (key == "prompt_template") {
        config.prompt_template = value.get<std::string>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return config;
}

namespace {

LabelVec gold_labels_of(std::span<const EntailmentPair> pairs,
                        const char* what) {
  LabelVec gold;
  gold.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (!pair.gold.has_value()) {
      throw DataError(std::string(what) + " pair (" + pair.response_id +
                      ", " + pair.rubric_item_id + ") has no gold label");
    }
    gold.push_back(*pair.gold ? 1 : 0);
  }
  return gold;
}

LabelVec predicted_labels_of(const std::vector<Prediction>& predictions) {
  LabelVec labels;
  labels.reserve(predictions.size());
  for (const auto& p : predictions) labels.push_back(p.label ? 1 : 0);
  return labels;
}

}  // namespace

FitResult backend_fit(const TrainableModel& initial,
                      std::span<const EntailmentPair> train,
                      std::span<const EntailmentPair> val,
                      const BackendConfig& config) {
  config.validate();
  if (train.empty()) throw DataError("empty training set");
  if (val.empty()) throw DataError("empty validation set");
  const LabelVec val_gold = gold_labels_of(val, "validation");
  gold_labels_of(train, "training");  // reject unlabeled pairs up front

  auto model = initial.clone();
  FitResult result;
  // Exact sentinel below any reachable F1, so epoch 0 always snapshots.
  Rational best_f1(-1);

  std::vector<EntailmentPair> order(train.begin(), train.end());
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    model->begin_epoch(epoch);
    Rng rng(derive_seed(config.seed, "epoch/" + std::to_string(epoch)));
    shuffle(order, rng);
    const int batch = config.batch_size;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(batch)) {
      const std::size_t len =
          std::min<std::size_t>(batch, order.size() - start);
      model->train_batch(std::span<const EntailmentPair>(
          order.data() + start, len));
    }

    const MetricsReport report =
        compute_metrics(val_gold, predicted_labels_of(model->predict(val)));
    result.log.epochs.push_back({epoch, report.f1.to_double(),
                                 report.accuracy.to_double()});
    // Strict improvement keeps the earliest epoch on exact F1 ties.
    if (report.f1 > best_f1) {
      best_f1 = report.f1;
      result.log.selected_epoch = epoch;
      result.model = model->clone();
    }
  }
  return result;
}

std::unique_ptr<TrainableModel> make_trainable_runtime(
    const std::string& initialization) {
  if (initialization.empty() || initialization == "memorizing-stub") {
    return std::make_unique<MemorizingStub>();
  }
  throw BackendError("unknown initialization \"" + initialization +
                     "\"; only the built-in memorizing-stub runtime ships "
                     "with this build");
}

std::unique_ptr<TrainableModel> load_trainable_runtime(
    const std::filesystem::path& state_path) {
  std::ifstream in(state_path);
  if (!in) throw DataError("cannot read model state: " + state_path.string());
  nlohmann::ordered_json state;
  try {
    state = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unparsable model state " + state_path.string() + ": " +
                    e.what());
  }
  const std::string runtime = state.value("runtime", std::string{});
  if (runtime == "memorizing-stub") return MemorizingStub::from_state(state);
  throw BackendError("state file names unknown runtime \"" + runtime + "\"");
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  switch (config.kind) {
    case BackendKind::lexical:
      return std::make_unique<LexicalBackend>(config.lexical_theta);
    case BackendKind::oracle:
      return std::make_unique<OracleBackend>();
    case BackendKind::generative:
      return std::make_unique<GenerativeBackend>(
          make_http_logprob_adapter(config.endpoint, config.credential_env),
          config);
    case BackendKind::trainable:
      throw ConfigError(
          "trainable backends are produced by fitting; use "
          "make_trainable_runtime and backend_fit");
  }
  throw ConfigError("unrepresentable backend kind");
}

std::string predictions_to_jsonl(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    nlohmann::ordered_json record{
        {"response_id", p.response_id},
        {"rubric_item_id", p.rubric_item_id},
        {"label", p.label},
        {"score", p.score},
    };
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<Prediction> predictions_from_jsonl(const std::string& text) {
  std::vector<Prediction> out;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::ordered_json record;
    try {
      record = nlohmann::ordered_json::parse(line);
      out.push_back({record.at("response_id").get<std::string>(),
                     record.at("rubric_item_id").get<std::string>(),
                     record.at("label").get<bool>(),
                     record.at("score").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError("predictions line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

void save_predictions(const std::vector<Prediction>& predictions,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << predictions_to_jsonl(predictions);
  if (!out) throw DataError("failed while writing " + path.string());
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return predictions_from_jsonl(buffer.str());
}

std::string training_log_to_json_text(const TrainingLog& log) {
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (const auto& record : log.epochs) {
    epochs.push_back({{"epoch", record.epoch},
                      {"val_f1", record.val_f1},
                      {"val_accuracy", record.val_accuracy}});
  }
  nlohmann::ordered_json doc{
      {"selection_metric", std::string(BackendConfig::selection_metric)},
      {"selected_epoch", log.selected_epoch},
      {"epochs", std::move(epochs)},
  };
  return doc.dump(2) + "\n";
}

}  // namespace rubricgrade
