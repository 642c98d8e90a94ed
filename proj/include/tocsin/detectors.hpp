#pragma once

// Zero-shot base detectors. Every score is oriented so that larger values
// point toward LLM origin, except Entropy, which is reported as the plain
// mean predictive entropy.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tocsin/errors.hpp"
#include "tocsin/rng.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin {

enum class Detector { likelihood, logrank, lrr, entropy, fast_detectgpt };

inline constexpr Detector kAllDetectors[] = {Detector::likelihood, Detector::logrank, Detector::lrr,
                                             Detector::entropy, Detector::fast_detectgpt};

inline std::string_view to_string(Detector d) noexcept {
  switch (d) {
    case Detector::likelihood: return "likelihood";
    case Detector::logrank: return "logrank";
    case Detector::lrr: return "lrr";
    case Detector::entropy: return "entropy";
    case Detector::fast_detectgpt: return "fast-detectgpt";
  }
  return "likelihood";
}

inline std::optional<Detector> parse_detector(std::string_view s) noexcept {
  for (auto d : kAllDetectors) {
    if (s == to_string(d)) return d;
  }
  if (s == "fast_detectgpt" || s == "fastdetectgpt") return Detector::fast_detectgpt;
  return std::nullopt;
}

// Mean is the default; Sum reproduces the unnormalized per-passage totals.
enum class Aggregation { mean, sum };

struct DetectorOptions {
  Aggregation aggregation = Aggregation::mean;
  bool normalize_fastdetect = false;
  std::uint64_t n_samples = 10000;
};

namespace detail {

inline double aggregate(double total, std::size_t n, Aggregation agg) {
  return agg == Aggregation::mean ? total / static_cast<double>(n) : total;
}

inline const std::vector<std::int64_t>& require_ranks(const ScoredSequence& s) {
  if (!s.ranks) throw InputError("detector requires ranks");
  if (s.ranks->empty()) throw InputError("empty sequence");
  for (auto r : *s.ranks) {
    if (r < 1) throw InputError("rank must be >= 1, got " + std::to_string(r));
  }
  return *s.ranks;
}

}  // namespace detail

inline double likelihood(const ScoredSequence& s, Aggregation agg = Aggregation::mean) {
  if (s.logprobs.empty()) throw InputError("empty sequence");
  double total = 0.0;
  for (double lp : s.logprobs) total += lp;
  return detail::aggregate(total, s.logprobs.size(), agg);
}

/// -mean(log rank). Zero when every rank is 1, negative otherwise.
inline double logrank(const ScoredSequence& s, Aggregation agg = Aggregation::mean) {
  const auto& ranks = detail::require_ranks(s);
  double total = 0.0;
  for (auto r : ranks) total += std::log(static_cast<double>(r));
  return -detail::aggregate(total, ranks.size(), agg);
}

/// -sum(log p) / sum(log r). Throws DegenerateScore when every rank is 1.
inline double lrr(const ScoredSequence& s) {
  const auto& ranks = detail::require_ranks(s);
  if (s.logprobs.size() != ranks.size()) throw InputError("ranks/logprobs length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < ranks.size(); ++j) {
    num += s.logprobs[j];
    den += std::log(static_cast<double>(ranks[j]));
  }
  if (den == 0.0) throw DegenerateScore("degenerate LRR: every rank is 1");
  return -num / den;
}

inline double entropy_score(const ScoredSequence& s) {
  if (!s.entropies) throw InputError("detector requires entropies");
  if (s.entropies->empty()) throw InputError("empty sequence");
  double total = 0.0;
  for (double h : *s.entropies) total += h;
  return total / static_cast<double>(s.entropies->size());
}

/// ll_actual - sample_mean_ll, optionally divided by sample_std_ll.
inline double fast_detectgpt(const FastDetectStats& stats, bool normalize = false) {
  const double gap = stats.ll_actual - stats.sample_mean_ll;
  if (!normalize) return gap;
  if (!(stats.sample_std_ll > 0.0)) {
    throw DegenerateScore("normalized fast-detectgpt requires sample_std_ll > 0");
  }
  return gap / stats.sample_std_ll;
}

/// Sampling seed for a passage: a pure function of the run seed and the text.
inline std::uint64_t fastdetect_seed(std::uint64_t global_seed, std::string_view canonical_text) {
  return rng::derive_seed(global_seed, canonical_text, 0xFA57DE7EC7ULL);
}

/// Runs one detector against a scoring backend.
inline double base_score(Detector d, const Backend& scorer, std::string_view text,
                         std::uint64_t global_seed, const DetectorOptions& opts = {}) {
  const auto canonical = canonicalize(text);
  switch (d) {
    case Detector::likelihood:
      return likelihood(scorer.causal_score(canonical, {}), opts.aggregation);
    case Detector::logrank:
      return logrank(scorer.causal_score(canonical, {.ranks = true}), opts.aggregation);
    case Detector::lrr:
      return lrr(scorer.causal_score(canonical, {.ranks = true}));
    case Detector::entropy:
      return entropy_score(scorer.causal_score(canonical, {.entropies = true}));
    case Detector::fast_detectgpt:
      return fast_detectgpt(
          scorer.fastdetect_stats(canonical, opts.n_samples, fastdetect_seed(global_seed, canonical)),
          opts.normalize_fastdetect);
  }
  throw InputError("unknown base detector");
}

}  // namespace tocsin
