#pragma once

// Experiment splits. All allocation arithmetic is exact-rational and all
// randomness flows through explicit seeds, so a (corpus, parameters, seed)
// triple always reproduces the same bytes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rubricgrade/corpus.hpp"
#include "rubricgrade/rational.hpp"

namespace rubricgrade {

enum class Partition { train, val, test };

std::string to_string(Partition p);
Partition partition_from_string(const std::string& s);

struct SplitFractions {
  Rational train{4, 5};
  Rational val{1, 10};
  Rational test{1, 10};

  friend bool operator==(const SplitFractions&, const SplitFractions&) = default;
};

struct SubsampleInfo {
  Rational fraction;
  std::uint64_t seed = 0;

  friend bool operator==(const SubsampleInfo&, const SubsampleInfo&) = default;
};

struct SplitProvenance {
  std::uint64_t seed = 0;
  std::optional<SplitFractions> fractions;          // fraction-driven splits
  std::optional<std::string> held_out_question;     // cold-start splits
  std::optional<Rational> val_fraction;             // cold-start splits
  std::optional<SubsampleInfo> subsample;

  friend bool operator==(const SplitProvenance&, const SplitProvenance&) = default;
};

// Per-response partition assignment, kept in corpus document order.
// Responses dropped by subsampling simply have no entry.
class SplitAssignment {
public:
  SplitAssignment() = default;
  SplitAssignment(SplitProvenance provenance,
                  std::vector<std::pair<std::string, Partition>> entries);

  const SplitProvenance& provenance() const { return provenance_; }
  const std::vector<std::pair<std::string, Partition>>& entries() const {
    return entries_;
  }

  std::optional<Partition> partition_of(const std::string& response_id) const;
  std::vector<std::string> responses_in(Partition p) const;

  friend bool operator==(const SplitAssignment& a, const SplitAssignment& b) {
    return a.provenance_ == b.provenance_ && a.entries_ == b.entries_;
  }

private:
  SplitProvenance provenance_;
  std::vector<std::pair<std::string, Partition>> entries_;
  std::unordered_map<std::string, Partition> by_response_;
};

// Per-question random 3-way split. Partition sizes follow largest-remainder
// allocation of the fractions over each question's response count, ties
// awarded val first, then test, then train. Fractions must be non-negative
// and sum to exactly 1; every question needs at least as many responses as
// there are positive fractions.
SplitAssignment make_split(const Corpus& corpus, const SplitFractions& fractions,
                           std::uint64_t seed);

// Cold-start split: the named question's responses all go to test; the
// remaining questions go to train except a val_fraction slice carved out
// per question for model selection. val_fraction must lie in [0, 1).
SplitAssignment holdout_question_split(const Corpus& corpus,
                                       const std::string& question_id,
                                       const Rational& val_fraction,
                                       std::uint64_t seed);

// Keeps ceil(fraction * |train_q|) training responses per question and
// drops the rest from the assignment. val and test are untouched.
SplitAssignment subsample_train(const SplitAssignment& split, const Corpus& corpus,
                                const Rational& fraction, std::uint64_t seed);

std::string split_to_json_text(const SplitAssignment& split);
SplitAssignment split_from_json_text(const std::string& text);
void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

}  // namespace rubricgrade
