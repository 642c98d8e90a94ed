#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "test_support.hpp"
#include "tocsin/metrics.hpp"
#include "tocsin/rng.hpp"

using namespace tocsin;

namespace {

double brute_auroc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(pos.size() * neg.size());
}

std::vector<double> draw(rng::CounterRng& r, std::size_t n, int levels) {
  std::vector<double> out(n);
  for (auto& x : out) x = static_cast<double>(r.below(static_cast<std::uint64_t>(levels))) * 0.25 - 3.0;
  return out;
}

}  // namespace

TEST(Auroc, FrozenExamples) {
  EXPECT_EQ(auroc(std::vector<double>{0.9, 0.4}, std::vector<double>{0.6, 0.1}), 0.75);
  EXPECT_EQ(auroc(std::vector<double>{1, 2}, std::vector<double>{0, 0}), 1.0);
  EXPECT_EQ(auroc(std::vector<double>{0}, std::vector<double>{1}), 0.0);
  EXPECT_EQ(auroc(std::vector<double>{1, 1}, std::vector<double>{1}), 0.5);
}

TEST(Auroc, MatchesPairwiseCountingWithTies) {
  rng::CounterRng r(2718);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pos = draw(r, 1 + r.below(40), 2 + static_cast<int>(r.below(20)));
    const auto neg = draw(r, 1 + r.below(40), 2 + static_cast<int>(r.below(20)));
    ASSERT_NEAR(auroc(pos, neg), brute_auroc(pos, neg), 1e-12);
  }
}

TEST(Auroc, InvariantUnderStrictlyIncreasingTransforms) {
  rng::CounterRng r(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto pos = draw(r, 25, 12);
    auto neg = draw(r, 25, 12);
    const double a = auroc(pos, neg);
    for (auto* side : {&pos, &neg}) {
      for (auto& x : *side) x = std::exp(x) * 3.0 + 1.0;
    }
    ASSERT_EQ(auroc(pos, neg), a);
    ASSERT_NEAR(auroc(neg, pos), 1.0 - a, 1e-12);
  }
}

TEST(Auroc, RejectsBadInput) {
  EXPECT_THROW(auroc(std::vector<double>{}, std::vector<double>{1}), InputError);
  EXPECT_THROW(auroc(std::vector<double>{NAN}, std::vector<double>{1}), InputError);
}

TEST(Pearson, FrozenAndInvariances) {
  EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 7}), 0.9933992677987828, 1e-15);
  rng::CounterRng r(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(10);
    std::vector<double> b(10);
    for (std::size_t i = 0; i < 10; ++i) {
      a[i] = r.uniform();
      b[i] = a[i] + r.uniform();
    }
    const double p = pearson(a, b);
    ASSERT_LE(std::abs(p), 1.0);
    ASSERT_NEAR(pearson(b, a), p, 1e-12);
    std::vector<double> scaled(a);
    for (auto& x : scaled) x = 4.0 * x - 2.0;
    ASSERT_NEAR(pearson(scaled, b), p, 1e-12);
    for (auto& x : scaled) x = -x;
    ASSERT_NEAR(pearson(scaled, b), -p, 1e-12);
    ASSERT_NEAR(pearson(a, a), 1.0, 1e-12);
  }
}

TEST(Pearson, UndefinedCases) {
  EXPECT_THROW(pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2}), InputError);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), InputError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1}), InputError);
}

TEST(Histogram, MatchesNumpyGolden) {
  std::ifstream in(fixtures::test_data_dir() / "synthetic_scores.json");
  const auto j = nlohmann::json::parse(in);
  const auto human = j["human"].get<std::vector<double>>();
  const auto llm = j["llm"].get<std::vector<double>>();
  const auto h = export_histograms(human, llm, j["bins"].get<std::size_t>());
  const auto edges = j["golden"]["edges"].get<std::vector<double>>();
  ASSERT_EQ(h.edges.size(), edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) EXPECT_NEAR(h.edges[i], edges[i], 1e-12);
  EXPECT_EQ(h.human, j["golden"]["human"].get<std::vector<std::size_t>>());
  EXPECT_EQ(h.llm, j["golden"]["llm"].get<std::vector<std::size_t>>());
}

TEST(Histogram, CountsAndEdges) {
  const std::vector<double> a{0.0, 0.5, 1.0};
  const std::vector<double> b{1.0, 1.0};
  const auto h = export_histograms(a, b, 2);
  EXPECT_EQ(h.edges, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(h.human, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(h.llm, (std::vector<std::size_t>{0, 2}));

  const auto flat = export_histograms(std::vector<double>{2, 2}, std::vector<double>{2}, 5);
  EXPECT_EQ(flat.edges, (std::vector<double>{2, 2}));
  EXPECT_EQ(flat.human, (std::vector<std::size_t>{2}));
  EXPECT_EQ(flat.llm, (std::vector<std::size_t>{1}));
  EXPECT_THROW(export_histograms(a, b, 0), InputError);
}

TEST(Histogram, OverlapBounds) {
  const auto same = export_histograms(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 2}, 3);
  EXPECT_NEAR(histogram_overlap(same), 1.0, 1e-12);
  const auto apart = export_histograms(std::vector<double>{0, 0.1}, std::vector<double>{5, 5.1}, 4);
  EXPECT_EQ(histogram_overlap(apart), 0.0);
}
