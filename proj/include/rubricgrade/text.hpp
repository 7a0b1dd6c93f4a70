#pragma once

// Tokenization shared by the lexical backend, the synthetic generator and
// the nearest-neighbor score baseline: lowercase, split on
// non-alphanumerics, with a fixed built-in stopword list.

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace rubricgrade {

std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(const std::string& token);

// Tokens with stopwords removed, deduplicated, original order kept.
std::vector<std::string> content_tokens(std::string_view text);

std::unordered_set<std::string> token_set(std::string_view text);

}  // namespace rubricgrade
