#include "rubricgrade/synthetic.hpp"

#include <array>
#include <unordered_set>

#include "rubricgrade/errors.hpp"
#include "rubricgrade/rng.hpp"
#include "rubricgrade/text.hpp"

namespace rubricgrade {

namespace {

constexpr std::array<const char*, 20> kSyllables{
    "za", "mor", "vel", "tin", "qua", "rex", "pol", "dar", "fen", "lus",
    "gri", "nov", "bex", "sul", "tam", "ord", "pix", "kel", "run", "vos"};

// Filler vocabulary for the prose around the planted keywords. None of
// these may collide with a coined keyword; the generator checks anyway.
constexpr std::array<const char*, 24> kFillerNouns{
    "reaction",  "mixture",   "sample",   "value",    "result",   "system",
    "effect",    "change",    "process",  "balance",  "amount",   "state",
    "measurement", "observation", "experiment", "outcome", "quantity",
    "condition", "container", "solution", "product",  "step",     "factor",
    "setup"};

constexpr std::array<const char*, 12> kFillerVerbs{
    "increases", "decreases", "shifts",  "remains", "depends",  "changes",
    "stabilizes", "varies",   "behaves", "reacts",  "develops", "settles"};

constexpr std::array<const char*, 8> kOpeners{
    "Overall the experiment shows a clear trend.",
    "In this case the setup behaves as expected.",
    "The measurements support a simple explanation.",
    "Several observations matter for this answer.",
    "The outcome follows from the initial conditions.",
    "A careful reading of the data suggests the following.",
    "The described procedure leads to a stable result.",
    "Taken together the steps explain the observation."};

std::string coin_keyword(Rng& rng) {
  std::string word;
  const std::size_t syllables = 2 + rng.bounded(2);
  for (std::size_t s = 0; s < syllables; ++s)
    word += kSyllables[rng.bounded(kSyllables.size())];
  return word;
}

std::string filler_sentence(Rng& rng) {
  std::string s = "The ";
  s += kFillerNouns[rng.bounded(kFillerNouns.size())];
  s += ' ';
  s += kFillerVerbs[rng.bounded(kFillerVerbs.size())];
  s += " and the ";
  s += kFillerNouns[rng.bounded(kFillerNouns.size())];
  s += ' ';
  s += kFillerVerbs[rng.bounded(kFillerVerbs.size())];
  s += " as well.";
  return s;
}

// Weaves the given keywords into one sentence of stopword glue + filler.
std::string keyword_sentence(const std::vector<std::string>& keywords, Rng& rng) {
  std::string s = "The ";
  s += kFillerNouns[rng.bounded(kFillerNouns.size())];
  s += " involves";
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    s += i == 0 ? " the " : " and the ";
    s += keywords[i];
  }
  s += " in this case.";
  return s;
}

}  // namespace

Corpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_questions == 0 || spec.items_per_question == 0 ||
      spec.responses_per_question == 0 || spec.keyword_pool_size == 0)
    throw ConfigError("synthetic generator counts must be positive");
  if (spec.distractor_rate < 0.0 || spec.distractor_rate > 1.0)
    throw ConfigError("distractor rate must lie in [0, 1]");
  if (spec.points_min < 0 || spec.points_max < spec.points_min)
    throw ConfigError("points range must satisfy 0 <= min <= max");

  Rng rng(derive_seed(seed, "synthetic"));

  // Reserved filler words; a coined keyword must never equal one of them,
  // otherwise filler prose could complete a keyword set by accident.
  std::unordered_set<std::string> reserved;
  for (const char* w : kFillerNouns) reserved.insert(w);
  for (const char* w : kFillerVerbs) reserved.insert(w);
  for (const char* s : kOpeners)
    for (const auto& tok : tokenize(s)) reserved.insert(tok);

  std::vector<std::string> pool;
  std::unordered_set<std::string> used;
  while (pool.size() < spec.keyword_pool_size) {
    std::string word = coin_keyword(rng);
    if (reserved.count(word) || is_stopword(word) || !used.insert(word).second)
      continue;
    pool.push_back(std::move(word));
  }

  Corpus corpus;
  std::size_t pool_cursor = 0;

  for (std::size_t qi = 0; qi < spec.n_questions; ++qi) {
    const std::string qid = "q" + std::to_string(qi + 1);
    corpus.questions.push_back(
        {qid, "Explain what governs topic " + std::to_string(qi + 1) +
                  " and justify each claim."});

    struct PlannedItem {
      std::string id;
      std::vector<std::string> keywords;
      double true_rate;
    };
    std::vector<PlannedItem> planned;

    for (std::size_t ii = 0; ii < spec.items_per_question; ++ii) {
      const std::string iid = qid + "_i" + std::to_string(ii + 1);
      const std::size_t n_keywords = 2 + rng.bounded(3);  // 2..4
      if (pool_cursor + n_keywords > pool.size())
        throw ConfigError("keyword pool too small for requested disjoint sets");
      std::vector<std::string> keywords(pool.begin() + pool_cursor,
                                        pool.begin() + pool_cursor + n_keywords);
      pool_cursor += n_keywords;

      // Item text: stopword glue around the keywords, nothing else, so the
      // item's content tokens are exactly its keyword set.
      std::string text = "It should have the";
      for (std::size_t k = 0; k < keywords.size(); ++k) {
        text += k == 0 ? " " : " and the ";
        text += keywords[k];
      }
      text += " in it.";

      const Rational points(spec.points_min +
                            static_cast<std::int64_t>(rng.bounded(
                                spec.points_max - spec.points_min + 1)));
      corpus.rubric_items.push_back({iid, qid, text, points});
      planned.push_back({iid, std::move(keywords), 0.35 + rng.uniform() * 0.45});
    }

    for (std::size_t ri = 0; ri < spec.responses_per_question; ++ri) {
      const std::string rid = qid + "_r" + std::to_string(ri + 1);
      std::string text(kOpeners[rng.bounded(kOpeners.size())]);

      for (const auto& item : planned) {
        const bool gold = rng.uniform() < item.true_rate;
        if (gold) {
          text += ' ';
          text += keyword_sentence(item.keywords, rng);
        } else if (rng.uniform() < spec.distractor_rate && item.keywords.size() > 1) {
          // Strict subset only: the planted rule stays intact.
          std::vector<std::string> subset = item.keywords;
          shuffle(subset, rng);
          subset.resize(1 + rng.bounded(item.keywords.size() - 1));
          text += ' ';
          text += keyword_sentence(subset, rng);
        }
        corpus.judgments.push_back({rid, item.id, gold});
      }

      text += ' ';
      text += filler_sentence(rng);
      corpus.responses.push_back({rid, qid, std::move(text)});
    }
  }

  return corpus;
}

}  // namespace rubricgrade
