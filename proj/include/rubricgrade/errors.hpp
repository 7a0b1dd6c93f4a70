#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rubricgrade {

// Error taxonomy mirrored by the CLI exit codes: data problems (bad corpus
// files, dangling references, label gaps) exit 1, configuration problems
// exit 2, backend/external failures exit 3.

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class BackendError : public std::runtime_error {
public:
  explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// Carries the full violation listing so `validate` can print one line per
// problem instead of stopping at the first.
class CorpusInvalid : public DataError {
public:
  explicit CorpusInvalid(std::vector<std::string> violations)
      : DataError(violations.empty() ? "invalid corpus" : violations.front()),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

}  // namespace rubricgrade
