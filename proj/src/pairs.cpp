#include "rubricgrade/pairs.hpp"

#include "rubricgrade/errors.hpp"

namespace rubricgrade {

namespace {

std::vector<EntailmentPair> build(const Corpus& corpus, const PairOptions& options,
                                  const SplitAssignment* split,
                                  std::optional<Partition> partition) {
  require_valid(corpus);
  const CorpusIndex index(corpus);

  std::vector<EntailmentPair> pairs;
  for (const auto& response : corpus.responses) {
    if (split) {
      const auto p = split->partition_of(response.id);
      if (!p || *p != *partition) continue;
    }
    std::string premise = response.text;
    if (options.prepend_question)
      premise = index.question(response.question_id).text + "\n" + premise;
    for (const auto* item : index.items_of(response.question_id)) {
      EntailmentPair pair;
      pair.response_id = response.id;
      pair.rubric_item_id = item->id;
      pair.premise = premise;
      pair.hypothesis = item->text;
      pair.gold = index.gold(response.id, item->id);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

}  // namespace

std::vector<EntailmentPair> build_pairs(const Corpus& corpus,
                                        const PairOptions& options) {
  return build(corpus, options, nullptr, std::nullopt);
}

std::vector<EntailmentPair> build_pairs(const Corpus& corpus,
                                        const SplitAssignment& split,
                                        Partition partition,
                                        const PairOptions& options) {
  return build(corpus, options, &split, partition);
}

}  // namespace rubricgrade
