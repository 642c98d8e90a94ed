#pragma once

// Scoring backends turn text into per-token log-probabilities.
//
// A Backend exposes three views of a language model: causal scoring of a
// text, conditional (sequence-to-sequence) scoring of a target given a
// source, and the "<source> In other words, <target>" template scoring used
// by the GPTScore-style difference metric. It also computes the sampling
// statistics needed by the conditional-curvature detector at the backend,
// because full predictive distributions are too large to ship around.
//
// All log quantities are natural logarithms. Ranks are 1-based.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tocsin/corpus.hpp"
#include "tocsin/errors.hpp"

namespace tocsin {

struct ScoredSequence {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
  std::optional<std::vector<std::int64_t>> ranks;
  std::optional<std::vector<double>> entropies;

  [[nodiscard]] std::size_t size() const noexcept { return logprobs.size(); }

  /// Throws InputError when a structural invariant is violated.
  void validate() const {
    const auto n = logprobs.size();
    if (n == 0) throw InputError("scored sequence is empty");
    if (tokens.size() != n) throw InputError("tokens/logprobs length mismatch");
    if (ranks && ranks->size() != n) throw InputError("ranks length mismatch");
    if (entropies && entropies->size() != n) throw InputError("entropies length mismatch");
    for (double lp : logprobs) {
      if (!(lp <= 0.0)) throw InputError("logprob must be <= 0 and not NaN");
    }
    if (ranks) {
      for (auto r : *ranks) {
        if (r < 1) throw InputError("rank must be >= 1");
      }
    }
    if (entropies) {
      for (double h : *entropies) {
        if (!(h >= 0.0)) throw InputError("entropy must be >= 0");
      }
    }
  }

  friend bool operator==(const ScoredSequence&, const ScoredSequence&) = default;
};

struct Wants {
  bool ranks = false;
  bool entropies = false;
};

struct FastDetectStats {
  double ll_actual = 0.0;
  double sample_mean_ll = 0.0;
  double sample_std_ll = 0.0;
  double analytic_mean_ll = 0.0;
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const FastDetectStats&, const FastDetectStats&) = default;
};

enum class BackendKind { toy, remote };
enum class Setting { white_box, black_box };

inline std::string_view to_string(BackendKind k) noexcept {
  return k == BackendKind::toy ? "toy" : "remote";
}
inline std::string_view to_string(Setting s) noexcept {
  return s == Setting::white_box ? "white-box" : "black-box";
}

struct ScorerConfig {
  BackendKind backend = BackendKind::toy;
  std::string causal_model;
  std::string seq2seq_model;
  std::string endpoint;
  Setting setting = Setting::black_box;

  void validate() const {
    if (backend == BackendKind::remote && endpoint.empty()) {
      throw ConfigError("remote backend requires an endpoint");
    }
  }
};

/// The literal phrase joining copy and original in template scoring.
inline constexpr std::string_view kTemplatePhrase = "In other words,";

/// Builds "<source> In other words, <target>" from canonical forms. An empty
/// source yields "In other words, <target>".
inline std::string template_context(std::string_view source, std::string_view target) {
  std::string ctx;
  bool has_source = false;
  try {
    ctx = canonicalize(source);
    has_source = true;
  } catch (const InputError&) {
  }
  if (has_source) ctx.push_back(' ');
  ctx += kTemplatePhrase;
  ctx.push_back(' ');
  ctx += canonicalize(target);
  return ctx;
}

class Backend {
 public:
  virtual ~Backend() = default;

  [[nodiscard]] virtual std::string causal_model_id() const = 0;
  [[nodiscard]] virtual std::string seq2seq_model_id() const = 0;

  /// Position j carries log p(token_j | tokens_<j); ranks/entropies on request.
  [[nodiscard]] virtual ScoredSequence causal_score(std::string_view text, Wants wants) const = 0;

  /// log p(target_j | target_<j, source) for every target token.
  [[nodiscard]] virtual ScoredSequence conditional_score(std::string_view source,
                                                         std::string_view target) const = 0;

  /// Causal scores of the target positions inside template_context(source, target).
  [[nodiscard]] virtual ScoredSequence template_score(std::string_view source,
                                                      std::string_view target) const = 0;

  /// Position-wise independent resampling statistics; deterministic in (text, n_samples, seed).
  [[nodiscard]] virtual FastDetectStats fastdetect_stats(std::string_view text,
                                                         std::uint64_t n_samples,
                                                         std::uint64_t seed) const = 0;
};

}  // namespace tocsin
