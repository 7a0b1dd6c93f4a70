#include "rubricgrade/text.hpp"

#include <cctype>

namespace rubricgrade {

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words{
      "a",    "an",   "and",  "are",  "as",    "at",   "be",   "but",
      "by",   "for",  "from", "has",  "have",  "if",   "in",   "into",
      "is",   "it",   "its",  "no",   "not",   "of",   "on",   "or",
      "should", "such", "that", "the", "their", "then", "there", "these",
      "they", "this", "to",   "was",  "were",  "will", "with"};
  return words;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool is_stopword(const std::string& token) { return stopwords().count(token) != 0; }

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& tok : tokenize(text)) {
    if (is_stopword(tok)) continue;
    if (seen.insert(tok).second) out.push_back(std::move(tok));
  }
  return out;
}

std::unordered_set<std::string> token_set(std::string_view text) {
  std::unordered_set<std::string> out;
  for (auto& tok : tokenize(text)) out.insert(std::move(tok));
  return out;
}

}  // namespace rubricgrade
