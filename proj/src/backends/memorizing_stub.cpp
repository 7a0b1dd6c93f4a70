#include "rubricgrade/backends/memorizing_stub.hpp"

#include "rubricgrade/errors.hpp"

namespace rubricgrade {

namespace {

std::string key_of(const EntailmentPair& pair) {
  return pair.premise + '\x1f' + pair.hypothesis;
}

}  // namespace

void MemorizingStub::begin_epoch(int) {}

void MemorizingStub::train_batch(std::span<const EntailmentPair> batch) {
  for (const auto& pair : batch) {
    if (!pair.gold)
      throw DataError("training pair (" + pair.response_id + ", " +
                      pair.rubric_item_id + ") has no gold label");
    // Count each distinct pair once, no matter how many epochs replay it.
    if (memory_.emplace(key_of(pair), *pair.gold).second) {
      auto& votes = hypothesis_votes_[pair.hypothesis];
      votes.true_count += *pair.gold;
      votes.total += 1;
    }
  }
}

std::vector<Prediction> MemorizingStub::predict(
    std::span<const EntailmentPair> pairs) const {
  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    Prediction p;
    p.response_id = pair.response_id;
    p.rubric_item_id = pair.rubric_item_id;
    if (auto found = memory_.find(key_of(pair)); found != memory_.end()) {
      p.label = found->second;
      p.score = p.label ? 1.0 : -1.0;
    } else if (auto votes = hypothesis_votes_.find(pair.hypothesis);
               votes != hypothesis_votes_.end()) {
      const auto& v = votes->second;
      p.score = static_cast<double>(2 * v.true_count - v.total) /
                static_cast<double>(v.total);
      p.label = p.score > 0.0;  // an even vote decides FALSE
    } else {
      p.label = false;
      p.score = -1.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::unique_ptr<TrainableModel> MemorizingStub::clone() const {
  return std::make_unique<MemorizingStub>(*this);
}

nlohmann::ordered_json MemorizingStub::save_state() const {
  nlohmann::ordered_json doc;
  doc["runtime"] = name();
  auto& memory = doc["memory"] = nlohmann::ordered_json::array();
  for (const auto& [key, label] : memory_) {
    const auto sep = key.find('\x1f');
    memory.push_back({{"premise", key.substr(0, sep)},
                      {"hypothesis", key.substr(sep + 1)},
                      {"label", label}});
  }
  return doc;
}

std::unique_ptr<MemorizingStub> MemorizingStub::from_state(
    const nlohmann::ordered_json& state) {
  if (state.value("runtime", "") != "memorizing-stub")
    throw DataError("model state file does not name the memorizing-stub runtime");
  auto stub = std::make_unique<MemorizingStub>();
  for (const auto& entry : state.at("memory")) {
    EntailmentPair pair;
    pair.premise = entry.at("premise").get<std::string>();
    pair.hypothesis = entry.at("hypothesis").get<std::string>();
    pair.gold = entry.at("label").get<bool>();
    stub->train_batch(std::span<const EntailmentPair>(&pair, 1));
  }
  return stub;
}

}  // namespace rubricgrade
