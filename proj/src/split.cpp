#include "rubricgrade/split.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/rng.hpp"

namespace rubricgrade {

namespace {

using ordered_json = nlohmann::ordered_json;

// Largest-remainder seat allocation. `priority` breaks remainder ties:
// lower value wins. Returns per-fraction counts summing to n.
std::vector<std::size_t> largest_remainder(std::size_t n,
                                           const std::vector<Rational>& fractions,
                                           const std::vector<int>& priority) {
  const std::size_t k = fractions.size();
  std::vector<std::size_t> counts(k, 0);
  std::vector<Rational> remainders(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Rational quota = fractions[i] * Rational(static_cast<std::int64_t>(n));
    const std::int64_t fl = quota.floor();
    counts[i] = static_cast<std::size_t>(fl);
    remainders[i] = quota - Rational(fl);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[b] < remainders[a];
    return priority[a] < priority[b];
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) counts[order[i % k]]++;
  return counts;
}

std::vector<std::string> shuffled_response_ids(const CorpusIndex& index,
                                               const std::string& question_id,
                                               std::uint64_t seed,
                                               std::string_view purpose) {
  std::vector<std::string> ids;
  for (const auto* r : index.responses_of(question_id)) ids.push_back(r->id);
  Rng rng(derive_seed(seed, std::string(purpose) + "/" + question_id));
  shuffle(ids, rng);
  return ids;
}

}  // namespace

std::string to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::val: return "val";
    case Partition::test: return "test";
  }
  throw std::logic_error("bad partition");
}

Partition partition_from_string(const std::string& s) {
  if (s == "train") return Partition::train;
  if (s == "val") return Partition::val;
  if (s == "test") return Partition::test;
  throw DataError("unknown partition '" + s + "'");
}

SplitAssignment::SplitAssignment(
    SplitProvenance provenance,
    std::vector<std::pair<std::string, Partition>> entries)
    : provenance_(std::move(provenance)), entries_(std::move(entries)) {
  for (const auto& [id, p] : entries_) by_response_.emplace(id, p);
}

std::optional<Partition> SplitAssignment::partition_of(
    const std::string& response_id) const {
  auto it = by_response_.find(response_id);
  if (it == by_response_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> SplitAssignment::responses_in(Partition p) const {
  std::vector<std::string> out;
  for (const auto& [id, part] : entries_)
    if (part == p) out.push_back(id);
  return out;
}

SplitAssignment make_split(const Corpus& corpus, const SplitFractions& fractions,
                           std::uint64_t seed) {
  if (fractions.train.is_negative() || fractions.val.is_negative() ||
      fractions.test.is_negative() ||
      fractions.train + fractions.val + fractions.test != Rational(1))
    throw ConfigError("split fractions must be non-negative and sum to 1");

  require_valid(corpus);
  const CorpusIndex index(corpus);

  std::size_t positive = 0;
  for (const Rational& f : {fractions.train, fractions.val, fractions.test})
    if (f > Rational(0)) ++positive;

  std::unordered_map<std::string, Partition> assignment;
  for (const auto& q : corpus.questions) {
    const std::size_t n = index.responses_of(q.id).size();
    if (n < positive)
      throw DataError("question '" + q.id + "' has " + std::to_string(n) +
                      " responses, fewer than the " + std::to_string(positive) +
                      " non-empty partitions requested");

    // Tie priority: val, then test, then train.
    const auto counts = largest_remainder(
        n, {fractions.train, fractions.val, fractions.test}, {2, 0, 1});

    const auto ids = shuffled_response_ids(index, q.id, seed, "split");
    std::size_t cursor = 0;
    const std::array<Partition, 3> parts{Partition::train, Partition::val,
                                         Partition::test};
    for (std::size_t p = 0; p < parts.size(); ++p)
      for (std::size_t i = 0; i < counts[p]; ++i)
        assignment.emplace(ids[cursor++], parts[p]);
  }

  std::vector<std::pair<std::string, Partition>> entries;
  entries.reserve(corpus.responses.size());
  for (const auto& r : corpus.responses)
    entries.emplace_back(r.id, assignment.at(r.id));

  SplitProvenance prov;
  prov.seed = seed;
  prov.fractions = fractions;
  return SplitAssignment(std::move(prov), std::move(entries));
}

SplitAssignment holdout_question_split(const Corpus& corpus,
                                       const std::string& question_id,
                                       const Rational& val_fraction,
                                       std::uint64_t seed) {
  if (val_fraction.is_negative() || val_fraction >= Rational(1))
    throw ConfigError("val_fraction must lie in [0, 1)");
  require_valid(corpus);
  const CorpusIndex index(corpus);
  if (!index.has_question(question_id))
    throw DataError("unknown question '" + question_id + "'");
  if (corpus.questions.size() < 2)
    throw DataError("cold-start split needs at least two questions");

  std::unordered_map<std::string, Partition> assignment;
  for (const auto& q : corpus.questions) {
    if (q.id == question_id) {
      for (const auto* r : index.responses_of(q.id))
        assignment.emplace(r->id, Partition::test);
      continue;
    }
    const std::size_t n = index.responses_of(q.id).size();
    const auto counts = largest_remainder(
        n, {Rational(1) - val_fraction, val_fraction}, {1, 0});
    const auto ids = shuffled_response_ids(index, q.id, seed, "holdout");
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < counts[0]; ++i)
      assignment.emplace(ids[cursor++], Partition::train);
    for (std::size_t i = 0; i < counts[1]; ++i)
      assignment.emplace(ids[cursor++], Partition::val);
  }

  std::vector<std::pair<std::string, Partition>> entries;
  entries.reserve(corpus.responses.size());
  for (const auto& r : corpus.responses)
    entries.emplace_back(r.id, assignment.at(r.id));

  SplitProvenance prov;
  prov.seed = seed;
  prov.held_out_question = question_id;
  prov.val_fraction = val_fraction;
  return SplitAssignment(std::move(prov), std::move(entries));
}

SplitAssignment subsample_train(const SplitAssignment& split, const Corpus& corpus,
                                const Rational& fraction, std::uint64_t seed) {
  if (fraction <= Rational(0) || fraction > Rational(1))
    throw ConfigError("training fraction must lie in (0, 1]");

  const CorpusIndex index(corpus);

  // Per question, the training responses in split-entry order.
  std::unordered_map<std::string, std::vector<std::string>> train_by_question;
  for (const auto& [id, p] : split.entries())
    if (p == Partition::train)
      train_by_question[index.response(id).question_id].push_back(id);

  std::unordered_map<std::string, bool> keep;
  for (auto& [qid, ids] : train_by_question) {
    const auto target = static_cast<std::size_t>(
        (fraction * Rational(static_cast<std::int64_t>(ids.size()))).ceil());
    std::vector<std::string> pool = ids;
    Rng rng(derive_seed(seed, "subsample/" + qid));
    shuffle(pool, rng);
    for (std::size_t i = 0; i < pool.size(); ++i) keep[pool[i]] = i < target;
  }

  std::vector<std::pair<std::string, Partition>> entries;
  for (const auto& [id, p] : split.entries()) {
    if (p == Partition::train && !keep[id]) continue;
    entries.emplace_back(id, p);
  }

  SplitProvenance prov = split.provenance();
  prov.subsample = SubsampleInfo{fraction, seed};
  return SplitAssignment(std::move(prov), std::move(entries));
}

std::string split_to_json_text(const SplitAssignment& split) {
  ordered_json prov;
  const auto& p = split.provenance();
  prov["seed"] = p.seed;
  if (p.fractions) {
    prov["fractions"] = {p.fractions->train.str(), p.fractions->val.str(),
                         p.fractions->test.str()};
  }
  if (p.held_out_question) prov["held_out_question"] = *p.held_out_question;
  if (p.val_fraction) prov["val_fraction"] = p.val_fraction->str();
  if (p.subsample) {
    prov["subsample"] = {{"fraction", p.subsample->fraction.str()},
                         {"seed", p.subsample->seed}};
  }

  ordered_json doc;
  doc["provenance"] = std::move(prov);
  auto& assignments = doc["assignments"] = ordered_json::array();
  for (const auto& [id, part] : split.entries())
    assignments.push_back({{"response_id", id}, {"partition", to_string(part)}});
  return doc.dump(2) + "\n";
}

SplitAssignment split_from_json_text(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("split parse failure: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("provenance") || !doc.contains("assignments"))
    throw DataError("split document needs 'provenance' and 'assignments'");

  SplitProvenance prov;
  const auto& p = doc["provenance"];
  prov.seed = p.value("seed", std::uint64_t{0});
  if (p.contains("fractions")) {
    const auto& f = p["fractions"];
    if (!f.is_array() || f.size() != 3)
      throw DataError("split provenance fractions must be a 3-element array");
    prov.fractions = SplitFractions{Rational::parse(f[0].get<std::string>()),
                                    Rational::parse(f[1].get<std::string>()),
                                    Rational::parse(f[2].get<std::string>())};
  }
  if (p.contains("held_out_question"))
    prov.held_out_question = p["held_out_question"].get<std::string>();
  if (p.contains("val_fraction"))
    prov.val_fraction = Rational::parse(p["val_fraction"].get<std::string>());
  if (p.contains("subsample")) {
    prov.subsample =
        SubsampleInfo{Rational::parse(p["subsample"]["fraction"].get<std::string>()),
                      p["subsample"]["seed"].get<std::uint64_t>()};
  }

  std::vector<std::pair<std::string, Partition>> entries;
  for (const auto& a : doc["assignments"])
    entries.emplace_back(a.at("response_id").get<std::string>(),
                         partition_from_string(a.at("partition").get<std::string>()));
  return SplitAssignment(std::move(prov), std::move(entries));
}

void save_split(const SplitAssignment& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write split file '" + path.string() + "'");
  out << split_to_json_text(split);
}

SplitAssignment load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read split file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return split_from_json_text(buf.str());
}

}  // namespace rubricgrade
