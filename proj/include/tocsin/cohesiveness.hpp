#pragma once

// Token cohesiveness: the mean semantic difference between a passage and
// copies of it with a small fraction of whitespace tokens randomly deleted.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tocsin/corpus.hpp"
#include "tocsin/errors.hpp"
#include "tocsin/parallel.hpp"
#include "tocsin/rng.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin {

enum class DiffMetric { neg_bartscore, neg_gptscore };

inline std::string_view to_string(DiffMetric m) noexcept {
  return m == DiffMetric::neg_bartscore ? "bartscore" : "gptscore";
}

inline std::optional<DiffMetric> parse_metric(std::string_view s) noexcept {
  if (s == "bartscore" || s == "neg_bartscore") return DiffMetric::neg_bartscore;
  if (s == "gptscore" || s == "neg_gptscore") return DiffMetric::neg_gptscore;
  return std::nullopt;
}

struct DeletionConfig {
  std::size_t n_copies = 10;
  double rho = 0.015;
  std::uint64_t global_seed = 0;
  DiffMetric metric = DiffMetric::neg_bartscore;
  // Divide each DIFF by the original's token count. Off: the plain sum.
  bool per_token_diff = false;

  void validate() const {
    if (n_copies < 1) throw ConfigError("n_copies must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  }

  friend bool operator==(const DeletionConfig&, const DeletionConfig&) = default;
};

struct CohesivenessResult {
  double u = 0.0;
  std::vector<double> per_copy_diffs;
  std::vector<std::vector<std::size_t>> deleted_index_sets;
  DeletionConfig config;
};

inline constexpr std::size_t kMinCohesivenessTokens = 2;

/// d = max(1, round_half_up(rho * k)), capped at k - 1.
inline std::size_t deletion_count(std::size_t k, double rho) {
  if (k < kMinCohesivenessTokens) throw InputError("passage too short for cohesiveness");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("rho must lie in (0, 1)");
  // The epsilon absorbs representation error in products such as 0.015 * 100.
  const double scaled = rho * static_cast<double>(k);
  const auto rounded = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
  return std::min(std::max<std::size_t>(1, rounded), k - 1);
}

struct DeletedCopy {
  std::string text;
  std::vector<std::size_t> deleted;  // strictly increasing
};

/// Deletes d distinct positions chosen uniformly at random by a partial
/// Fisher-Yates shuffle driven by `seed`.
inline DeletedCopy random_delete(const TokenSequence& tokens, std::size_t d, std::uint64_t seed) {
  const std::size_t k = tokens.size();
  if (d < 1 || d >= k) {
    throw InputError("deletion count must satisfy 1 <= d < k (d=" + std::to_string(d) +
                     ", k=" + std::to_string(k) + ")");
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::CounterRng gen(seed);
  for (std::size_t i = 0; i < d; ++i) {
    const auto j = i + static_cast<std::size_t>(gen.below(k - i));
    std::swap(order[i], order[j]);
  }
  DeletedCopy out;
  out.deleted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d));
  std::sort(out.deleted.begin(), out.deleted.end());

  std::size_t next_deleted = 0;
  bool first = true;
  for (std::size_t i = 0; i < k; ++i) {
    if (next_deleted < d && out.deleted[next_deleted] == i) {
      ++next_deleted;
      continue;
    }
    if (!first) out.text.push_back(' ');
    out.text += tokens.tokens[i];
    first = false;
  }
  return out;
}

/// Semantic difference of `original` given `copy`: the negated total
/// log-probability of generating the original from the copy.
inline double diff(std::string_view original, std::string_view copy, DiffMetric metric,
                   const Backend& backend, bool per_token = false) {
  const auto x = canonicalize(original);
  const auto x_copy = canonicalize(copy);
  const auto scored = metric == DiffMetric::neg_bartscore ? backend.conditional_score(x_copy, x)
                                                          : backend.template_score(x_copy, x);
  double total = 0.0;
  for (double lp : scored.logprobs) total += lp;
  if (per_token) total /= static_cast<double>(scored.logprobs.size());
  return -total;
}

/// Seed of copy `index` of a passage; independent of iteration order.
inline std::uint64_t copy_seed(std::uint64_t global_seed, std::string_view canonical_text,
                               std::size_t index) {
  return rng::derive_seed(global_seed, canonical_text, index);
}

inline CohesivenessResult token_cohesiveness(std::string_view text, const DeletionConfig& config,
                                             const Backend& backend, std::size_t jobs = 1) {
  config.validate();
  const auto seq = split_tokens(text);
  const auto d = deletion_count(seq.size(), config.rho);
  const auto canonical = seq.canonical();

  CohesivenessResult result;
  result.config = config;
  result.per_copy_diffs.assign(config.n_copies, 0.0);
  result.deleted_index_sets.assign(config.n_copies, {});
  parallel_for(config.n_copies, jobs, [&](std::size_t i) {
    auto copy = random_delete(seq, d, copy_seed(config.global_seed, canonical, i));
    result.per_copy_diffs[i] = diff(canonical, copy.text, config.metric, backend, config.per_token_diff);
    result.deleted_index_sets[i] = std::move(copy.deleted);
  });

  double total = 0.0;
  for (double v : result.per_copy_diffs) total += v;
  result.u = total / static_cast<double>(config.n_copies);
  return result;
}

}  // namespace tocsin
