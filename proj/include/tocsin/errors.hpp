#pragma once

#include <stdexcept>
#include <string>

namespace tocsin {

// Configuration problems: bad flags, invalid hyperparameters, unresolvable ids.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Corpus ingestion problems. `line()` is 0 when not tied to a line.
class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_{line} {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid argument to a pure operation (short passage, empty input, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Server not reachable or model not loaded.
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

class ContextOverflow : public BackendError {
 public:
  ContextOverflow(std::size_t tokens, std::size_t limit)
      : BackendError("context overflow: " + std::to_string(tokens) + " tokens exceeds limit " +
                     std::to_string(limit)) {}
  explicit ContextOverflow(const std::string& what) : BackendError(what) {}
};

// The backend lacks the requested capability (e.g. no seq2seq scorer).
class Unsupported : public BackendError {
 public:
  using BackendError::BackendError;
};

// A detector statistic is undefined for its input (e.g. LRR with all ranks 1).
class DegenerateScore : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace tocsin
