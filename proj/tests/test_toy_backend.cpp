#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "tocsin/toy_backend.hpp"

using namespace tocsin;

namespace {

ToyBackend make(std::vector<std::string> fixture, ToyOptions opts = {}) {
  return ToyBackend(std::span<const std::string>(fixture), opts);
}

}  // namespace

TEST(ToyBackend, HandBigramOracle) {
  const auto toy = make({"a b a b"});
  EXPECT_EQ(toy.vocab_size(), 4u);
  const auto a = toy.id_of("a");
  const auto b = toy.id_of("b");
  EXPECT_DOUBLE_EQ(toy.bigram_probability(a, b), 0.5);
  // Unseen continuation: 1 / (2 + 4)
  EXPECT_DOUBLE_EQ(toy.bigram_probability(a, a), 1.0 / 6.0);
  EXPECT_EQ(toy.id_of("zzz"), ToyBackend::kUnk);

  const auto s = toy.causal_score("a b", {});
  ASSERT_EQ(s.size(), 2u);
  // BOS -> a seen once: (1 + 1) / (1 + 4)
  EXPECT_NEAR(s.logprobs[0], std::log(0.4), 1e-12);
  EXPECT_NEAR(s.logprobs[1], std::log(0.5), 1e-12);
}

TEST(ToyBackend, AlphaChangesSmoothing) {
  const auto toy = make({"a b a b"}, {.alpha = 0.5});
  EXPECT_DOUBLE_EQ(toy.bigram_probability(toy.id_of("a"), toy.id_of("b")), 2.5 / 4.0);
}

TEST(ToyBackend, RejectsBadConfiguration) {
  EXPECT_THROW(make({"a"}, {.alpha = 0.0}), ConfigError);
  EXPECT_THROW(make({"a"}, {.alpha = -1.0}), ConfigError);
  EXPECT_THROW(make({}), ConfigError);
  EXPECT_THROW(make({"   "}), ConfigError);
}

TEST(ToyBackend, ContextOverflow) {
  const auto toy = make({"a b"}, {.max_context = 3});
  EXPECT_NO_THROW((void)toy.causal_score("a b a", {}));
  EXPECT_THROW((void)toy.causal_score("a b a b", {}), ContextOverflow);
  EXPECT_THROW((void)toy.conditional_score("a b a b", "a"), ContextOverflow);
  EXPECT_THROW((void)toy.fastdetect_stats("a b a b", 10, 1), ContextOverflow);
}

TEST(ToyBackend, DistributionsAreNormalized) {
  const auto& toy = fixtures::bundled_toy();
  for (std::int64_t prev = 0; prev < static_cast<std::int64_t>(toy.vocab_size()); ++prev) {
    const auto d = toy.next_distribution(prev);
    ASSERT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-12) << prev;
  }
}

TEST(ToyBackend, RanksAndEntropiesMatchBruteForce) {
  const auto& toy = fixtures::bundled_toy();
  const auto corpus = fixtures::bundled_corpus();
  for (const auto& p : corpus.passages) {
    const auto s = toy.causal_score(p.text, {.ranks = true, .entropies = true});
    s.validate();
    std::int64_t prev = ToyBackend::kBos;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto cur = toy.id_of(s.tokens[j]);
      const auto dist = toy.next_distribution(prev);
      const double pc = dist[static_cast<std::size_t>(cur)];
      std::int64_t rank = 1;
      double h = 0.0;
      for (std::size_t t = 0; t < dist.size(); ++t) {
        const auto id = static_cast<std::int64_t>(t);
        if (dist[t] > pc || (dist[t] == pc && id < cur)) ++rank;
        h -= dist[t] * std::log(dist[t]);
      }
      ASSERT_EQ((*s.ranks)[j], rank) << p.id << " @" << j;
      ASSERT_NEAR((*s.entropies)[j], h, 1e-9);
      ASSERT_NEAR(s.logprobs[j], std::log(pc), 1e-12);
      prev = cur;
    }
  }
}

TEST(ToyBackend, ConditionalCopyUnigramOracle) {
  const auto toy = make({"a b"});
  EXPECT_EQ(toy.conditional_vocab_size(), 3u);
  const auto s = toy.conditional_score("a b", "a b c");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.logprobs[0], std::log(0.4), 1e-12);
  EXPECT_NEAR(s.logprobs[1], std::log(0.4), 1e-12);
  EXPECT_NEAR(s.logprobs[2], std::log(0.2), 1e-12);
  // Empty source: uniform over V'
  const auto e = toy.conditional_score("", "a");
  EXPECT_NEAR(e.logprobs[0], std::log(1.0 / 3.0), 1e-12);
}

TEST(ToyBackend, TemplateScoreSlicesTargetPositions) {
  const auto& toy = fixtures::bundled_toy();
  const std::string src = "the river ran";
  const std::string tgt = "the  river ran quietly";
  const auto t = toy.template_score(src, tgt);
  const auto full = toy.causal_score("the river ran In other words, the river ran quietly", {});
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"the", "river", "ran", "quietly"}));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(t.logprobs[j], full.logprobs[full.size() - 4 + j]);
  EXPECT_EQ(template_context("", "x"), "In other words, x");
}

TEST(ToyBackend, FastDetectStatsIdentities) {
  const auto& toy = fixtures::bundled_toy();
  const auto text = fixtures::bundled_corpus().passages.front().text;
  const auto s = toy.fastdetect_stats(text, 2000, 77);
  const auto c = toy.causal_score(text, {.entropies = true});
  EXPECT_NEAR(s.ll_actual, std::accumulate(c.logprobs.begin(), c.logprobs.end(), 0.0), 1e-9);
  EXPECT_NEAR(s.analytic_mean_ll, -std::accumulate(c.entropies->begin(), c.entropies->end(), 0.0), 1e-9);
  EXPECT_GT(s.sample_std_ll, 0.0);
  EXPECT_NEAR(s.sample_mean_ll, s.analytic_mean_ll, 5.0 * s.sample_std_ll / std::sqrt(2000.0));
  EXPECT_EQ(s, toy.fastdetect_stats(text, 2000, 77));
  EXPECT_NE(s.sample_mean_ll, toy.fastdetect_stats(text, 2000, 78).sample_mean_ll);
  EXPECT_THROW((void)toy.fastdetect_stats(text, 0, 1), InputError);
}
