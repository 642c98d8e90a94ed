#pragma once

// Deterministic in-process backend used as a test oracle substrate.
//
// Causal scorer: add-alpha smoothed bigram over whitespace tokens,
//   p(t | prev) = (c(prev, t) + alpha) / (c(prev) + alpha * V)
// where V counts BOS, UNK and every distinct fixture token, and c(prev) is the
// number of bigrams starting with prev.
//
// Conditional scorer: copy-unigram over the source,
//   p(t | source) = (count(t, source) + alpha) / (|source| + alpha * V')
// where V' = V - 1 (BOS is never generated).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tocsin/corpus.hpp"
#include "tocsin/errors.hpp"
#include "tocsin/rng.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin {

struct ToyOptions {
  double alpha = 1.0;
  std::size_t max_context = 4096;
  std::string causal_id = "toy-bigram";
  std::string seq2seq_id = "toy-copy-unigram";
};

class ToyBackend final : public Backend {
 public:
  static constexpr std::int64_t kBos = 0;
  static constexpr std::int64_t kUnk = 1;
  static constexpr std::string_view kBosToken = "<bos>";
  static constexpr std::string_view kUnkToken = "<unk>";

  ToyBackend(std::span<const std::string> fixture, ToyOptions options = {})
      : options_{std::move(options)} {
    if (!(options_.alpha > 0.0) || !std::isfinite(options_.alpha)) {
      throw ConfigError("toy backend smoothing alpha must be > 0");
    }
    if (fixture.empty()) throw ConfigError("toy backend fixture corpus is empty");

    std::vector<std::vector<std::string>> docs;
    std::map<std::string, int> distinct;
    for (const auto& text : fixture) {
      std::vector<std::string> toks;
      try {
        toks = split_tokens(text).tokens;
      } catch (const InputError&) {
        continue;
      }
      for (const auto& t : toks) distinct.emplace(t, 0);
      docs.push_back(std::move(toks));
    }
    if (docs.empty()) throw ConfigError("toy backend fixture corpus has no tokens");

    names_ = {std::string(kBosToken), std::string(kUnkToken)};
    for (const auto& [tok, _] : distinct) {
      ids_.emplace(tok, static_cast<std::int64_t>(names_.size()));
      names_.push_back(tok);
    }
    rows_.resize(names_.size());
    for (const auto& doc : docs) {
      std::int64_t prev = kBos;
      for (const auto& t : doc) {
        const auto cur = id_of(t);
        auto& row = rows_[static_cast<std::size_t>(prev)];
        ++row.next[cur];
        ++row.total;
        prev = cur;
      }
    }
  }

  [[nodiscard]] std::string causal_model_id() const override { return options_.causal_id; }
  [[nodiscard]] std::string seq2seq_model_id() const override { return options_.seq2seq_id; }
  [[nodiscard]] const ToyOptions& options() const noexcept { return options_; }

  /// V for the causal scorer (BOS + UNK + fixture tokens).
  [[nodiscard]] std::size_t vocab_size() const noexcept { return names_.size(); }
  /// V' for the conditional scorer (UNK + fixture tokens).
  [[nodiscard]] std::size_t conditional_vocab_size() const noexcept { return names_.size() - 1; }

  [[nodiscard]] std::int64_t id_of(std::string_view token) const {
    const auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnk : it->second;
  }
  [[nodiscard]] const std::string& name_of(std::int64_t id) const {
    return names_.at(static_cast<std::size_t>(id));
  }

  [[nodiscard]] std::int64_t bigram_count(std::int64_t prev, std::int64_t next) const {
    const auto& row = rows_.at(static_cast<std::size_t>(prev));
    const auto it = row.next.find(next);
    return it == row.next.end() ? 0 : it->second;
  }
  [[nodiscard]] std::int64_t prefix_count(std::int64_t prev) const {
    return rows_.at(static_cast<std::size_t>(prev)).total;
  }

  [[nodiscard]] double bigram_probability(std::int64_t prev, std::int64_t next) const {
    const double a = options_.alpha;
    return (static_cast<double>(bigram_count(prev, next)) + a) /
           (static_cast<double>(prefix_count(prev)) + a * static_cast<double>(vocab_size()));
  }

  /// Full predictive distribution after `prev`, indexed by token id.
  [[nodiscard]] std::vector<double> next_distribution(std::int64_t prev) const {
    const double a = options_.alpha;
    const auto& row = rows_.at(static_cast<std::size_t>(prev));
    const double denom = static_cast<double>(row.total) + a * static_cast<double>(vocab_size());
    std::vector<double> dist(vocab_size(), a / denom);
    for (const auto& [id, c] : row.next) {
      dist[static_cast<std::size_t>(id)] = (static_cast<double>(c) + a) / denom;
    }
    return dist;
  }

  [[nodiscard]] ScoredSequence causal_score(std::string_view text, Wants wants) const override {
    const auto seq = split_tokens(text);
    check_context(seq.size());
    ScoredSequence out;
    out.tokens = seq.tokens;
    out.logprobs.reserve(seq.size());
    if (wants.ranks) out.ranks.emplace().reserve(seq.size());
    if (wants.entropies) out.entropies.emplace().reserve(seq.size());

    std::int64_t prev = kBos;
    for (const auto& tok : seq.tokens) {
      const auto cur = id_of(tok);
      out.logprobs.push_back(std::log(bigram_probability(prev, cur)));
      if (wants.ranks) out.ranks->push_back(rank_in_row(prev, cur));
      if (wants.entropies) out.entropies->push_back(row_entropy(prev));
      prev = cur;
    }
    return out;
  }

  [[nodiscard]] ScoredSequence conditional_score(std::string_view source,
                                                 std::string_view target) const override {
    const auto tgt = split_tokens(target);
    std::vector<std::string> src;
    try {
      src = split_tokens(source).tokens;
    } catch (const InputError&) {
    }
    check_context(src.size());
    check_context(tgt.size());

    std::unordered_map<std::int64_t, std::int64_t> counts;
    for (const auto& t : src) ++counts[id_of(t)];
    const double a = options_.alpha;
    const double denom =
        static_cast<double>(src.size()) + a * static_cast<double>(conditional_vocab_size());

    ScoredSequence out;
    out.tokens = tgt.tokens;
    out.logprobs.reserve(tgt.size());
    for (const auto& t : tgt.tokens) {
      const auto it = counts.find(id_of(t));
      const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
      out.logprobs.push_back(std::log((c + a) / denom));
    }
    return out;
  }

  [[nodiscard]] ScoredSequence template_score(std::string_view source,
                                              std::string_view target) const override {
    const auto n_target = split_tokens(target).size();
    auto full = causal_score(template_context(source, target), Wants{});
    const auto skip = static_cast<std::ptrdiff_t>(full.size() - n_target);
    ScoredSequence out;
    out.tokens.assign(full.tokens.begin() + skip, full.tokens.end());
    out.logprobs.assign(full.logprobs.begin() + skip, full.logprobs.end());
    return out;
  }

  [[nodiscard]] FastDetectStats fastdetect_stats(std::string_view text, std::uint64_t n_samples,
                                                 std::uint64_t seed) const override {
    if (n_samples == 0) throw InputError("n_samples must be >= 1");
    const auto seq = split_tokens(text);
    check_context(seq.size());
    const std::size_t k = seq.size();
    const std::size_t v = vocab_size();

    // Per-position log-probs and CDFs, all conditioned on the original prefix.
    std::vector<double> logp(k * v);
    std::vector<double> cdf(k * v);
    FastDetectStats stats;
    stats.n_samples = n_samples;
    stats.seed = seed;
    std::int64_t prev = kBos;
    for (std::size_t j = 0; j < k; ++j) {
      const auto dist = next_distribution(prev);
      double acc = 0.0;
      double expected = 0.0;
      for (std::size_t t = 0; t < v; ++t) {
        const double lp = std::log(dist[t]);
        logp[j * v + t] = lp;
        acc += dist[t];
        cdf[j * v + t] = acc;
        expected += dist[t] * lp;
      }
      const auto cur = id_of(seq.tokens[j]);
      stats.ll_actual += logp[j * v + static_cast<std::size_t>(cur)];
      stats.analytic_mean_ll += expected;
      prev = cur;
    }

    const rng::CounterRng stream(seed);
    std::vector<double> lls(n_samples);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
      double ll = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double u = stream.uniform_at(i * k + j);
        const auto first = cdf.begin() + static_cast<std::ptrdiff_t>(j * v);
        const auto last = first + static_cast<std::ptrdiff_t>(v);
        // Scale by the row total so rounding in the running sum cannot strand u.
        auto it = std::upper_bound(first, last, u * *(last - 1));
        if (it == last) --it;
        ll += logp[j * v + static_cast<std::size_t>(it - first)];
      }
      lls[i] = ll;
    }
    double mean = 0.0;
    for (double x : lls) mean += x;
    mean /= static_cast<double>(n_samples);
    double var = 0.0;
    for (double x : lls) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n_samples);
    stats.sample_mean_ll = mean;
    stats.sample_std_ll = std::sqrt(var);
    return stats;
  }

 private:
  struct Row {
    std::map<std::int64_t, std::int64_t> next;
    std::int64_t total = 0;
  };

  void check_context(std::size_t n) const {
    if (n > options_.max_context) throw ContextOverflow(n, options_.max_context);
  }

  // Probability order equals count order within a row; ties go to the lower id.
  [[nodiscard]] std::int64_t rank_in_row(std::int64_t prev, std::int64_t cur) const {
    const auto& row = rows_[static_cast<std::size_t>(prev)];
    const auto c = bigram_count(prev, cur);
    std::int64_t better = 0;
    if (c == 0) {
      // Seen tokens all beat unseen ones; unseen ties resolved by id.
      better = static_cast<std::int64_t>(row.next.size());
      std::int64_t seen_below = 0;
      for (const auto& [id, cnt] : row.next) {
        if (id < cur) ++seen_below;
      }
      better += cur - seen_below;
    } else {
      for (const auto& [id, cnt] : row.next) {
        if (cnt > c || (cnt == c && id < cur)) ++better;
      }
    }
    return better + 1;
  }

  [[nodiscard]] double row_entropy(std::int64_t prev) const {
    const double a = options_.alpha;
    const auto& row = rows_[static_cast<std::size_t>(prev)];
    const double denom = static_cast<double>(row.total) + a * static_cast<double>(vocab_size());
    double h = 0.0;
    for (const auto& [id, c] : row.next) {
      const double p = (static_cast<double>(c) + a) / denom;
      h -= p * std::log(p);
    }
    const double unseen = static_cast<double>(vocab_size() - row.next.size());
    if (unseen > 0) {
      const double p0 = a / denom;
      h -= unseen * p0 * std::log(p0);
    }
    return std::max(h, 0.0);
  }

  ToyOptions options_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int64_t> ids_;
  std::vector<Row> rows_;
};

}  // namespace tocsin
