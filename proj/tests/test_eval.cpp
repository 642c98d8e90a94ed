#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"
#include "tocsin/eval.hpp"

using namespace tocsin;

namespace {

EvalConfig small_config() {
  EvalConfig cfg;
  cfg.detector.n_samples = 300;
  cfg.deletion = {.n_copies = 4, .rho = 0.05, .global_seed = 7};
  return cfg;
}

Corpus small_corpus(std::size_t per_dataset = 6) {
  const auto full = fixtures::bundled_corpus();
  Corpus c{full.name, {}};
  std::map<std::string, std::size_t> seen;
  for (const auto& p : full.passages) {
    if (seen[p.dataset]++ < per_dataset) c.passages.push_back(p);
  }
  return c;
}

Backends toy_backends() { return {fixtures::bundled_toy(), fixtures::bundled_toy()}; }

}  // namespace

TEST(Variants, NamesParseAndDefaults) {
  for (const char* s : {"likelihood", "lrr+tocsin", "cohesiveness", "fast-detectgpt+logrank"}) {
    const auto v = parse_variant(s);
    ASSERT_TRUE(v) << s;
    EXPECT_EQ(v->name(), s);
  }
  EXPECT_FALSE(parse_variant("bogus"));
  EXPECT_FALSE(parse_variant("lrr+lrr"));

  std::vector<std::string> names;
  for (const auto& v : default_variants({Detector::entropy, Detector::likelihood})) names.push_back(v.name());
  EXPECT_EQ(names, (std::vector<std::string>{"entropy", "likelihood", "likelihood+tocsin", "cohesiveness"}));
  const auto with_fast = default_variants({Detector::likelihood, Detector::fast_detectgpt});
  EXPECT_NE(std::find(with_fast.begin(), with_fast.end(),
                      Variant{Variant::Kind::pair, Detector::fast_detectgpt, Detector::likelihood}),
            with_fast.end());
}

TEST(Eval, InvariantToPassageOrderAndJobs) {
  const auto corpus = small_corpus();
  const auto variants = default_variants({Detector::likelihood, Detector::logrank, Detector::fast_detectgpt});
  auto cfg = small_config();
  const auto a = run_benchmark(corpus, variants, cfg, toy_backends());

  auto shuffled = corpus;
  std::reverse(shuffled.passages.begin(), shuffled.passages.end());
  cfg.jobs = 4;
  const auto b = run_benchmark(shuffled, variants, cfg, toy_backends());
  EXPECT_EQ(a.auroc, b.auroc);
  EXPECT_EQ(a.auroc_by_dataset, b.auroc_by_dataset);
  EXPECT_EQ(a.improvements, b.improvements);
  EXPECT_EQ(a.datasets, (std::vector<std::string>{"toy-news", "toy-stories"}));
}

TEST(Eval, ZeroCohesivenessReproducesBase) {
  auto cfg = small_config();
  cfg.zero_cohesiveness = true;
  const auto r = run_benchmark(small_corpus(), default_variants({Detector::likelihood, Detector::lrr}), cfg,
                               toy_backends());
  EXPECT_EQ(r.auroc.at("likelihood+tocsin"), r.auroc.at("likelihood"));
  EXPECT_EQ(r.auroc.at("lrr+tocsin"), r.auroc.at("lrr"));
  EXPECT_EQ(r.improvements.at("likelihood+tocsin"), 0.0);
}

TEST(Eval, AverageIsUnweightedOverDatasets) {
  const auto r = run_benchmark(small_corpus(), {{Variant::Kind::base, Detector::likelihood}}, small_config(),
                               toy_backends());
  const auto& by = r.auroc_by_dataset;
  EXPECT_DOUBLE_EQ(*r.auroc.at("likelihood"),
                   (*by.at("toy-news").at("likelihood") + *by.at("toy-stories").at("likelihood")) / 2.0);
}

TEST(Eval, CorrelationMatrixShape) {
  const auto corpus = small_corpus();
  auto cfg = small_config();
  // Summed DIFF drives exp(-u) * v below the double range on these lengths.
  cfg.deletion.per_token_diff = true;
  const auto one = build_score_table(corpus, {{Variant::Kind::base, Detector::logrank}}, cfg, toy_backends());
  const auto m1 = correlation_matrix(one);
  ASSERT_EQ(m1.values.size(), 1u);
  EXPECT_NEAR(*m1.values[0][0], 1.0, 1e-12);

  const auto table = build_score_table(corpus, default_variants({Detector::likelihood, Detector::logrank}), cfg,
                                       toy_backends());
  const auto m = correlation_matrix(table);
  ASSERT_EQ(m.values.size(), table.variants.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    for (std::size_t j = 0; j < m.values.size(); ++j) {
      ASSERT_TRUE(m.values[i][j]) << m.labels[i] << " / " << m.labels[j];
      EXPECT_NEAR(*m.values[i][j], *m.values[j][i], 1e-12);
      EXPECT_LE(std::abs(*m.values[i][j]), 1.0);
    }
  }
  cfg.deletion.per_token_diff = false;
  const auto summed = correlation_matrix(build_score_table(
      corpus, {{Variant::Kind::base, Detector::likelihood}, {Variant::Kind::tocsin, Detector::likelihood}}, cfg,
      toy_backends()));
  EXPECT_FALSE(summed.values[0][1]);
}

TEST(Eval, FailuresAreExcludedNotImputed) {
  auto corpus = small_corpus();
  corpus.passages.push_back({"tiny", "solo", Label::llm, "toy-bigram", "toy-news"});
  const auto r = run_benchmark(corpus, {{Variant::Kind::tocsin, Detector::likelihood},
                                        {Variant::Kind::base, Detector::likelihood}},
                               small_config(), toy_backends());
  EXPECT_EQ(r.failures.at("likelihood+tocsin"), 1u);
  EXPECT_EQ(r.failures.at("likelihood"), 0u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Eval, WhiteBoxRequiresMatchingSourceModel) {
  auto cfg = small_config();
  cfg.setting = Setting::white_box;
  EXPECT_NO_THROW(run_benchmark(small_corpus(2), {{Variant::Kind::base, Detector::likelihood}}, cfg,
                                toy_backends()));
  auto corpus = small_corpus(2);
  for (auto& p : corpus.passages) {
    if (p.label == Label::llm) p.source_model = "other-model";
  }
  EXPECT_THROW(run_benchmark(corpus, {{Variant::Kind::base, Detector::likelihood}}, cfg, toy_backends()),
               ConfigError);
}

TEST(Eval, RequiresBothLabels) {
  auto corpus = small_corpus();
  std::erase_if(corpus.passages, [](const Passage& p) { return p.label == Label::llm; });
  EXPECT_THROW(run_benchmark(corpus, {{Variant::Kind::base, Detector::likelihood}}, small_config(),
                             toy_backends()),
               CorpusError);
}

TEST(Ablation, TruncatesAndReports) {
  const auto corpus = small_corpus(4);
  const auto rows = length_ablation(corpus, {20, 60}, Detector::likelihood, small_config(), toy_backends());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].target, 20u);
  EXPECT_EQ(rows[0].u_human.size() + rows[0].u_llm.size(), corpus.passages.size());
  EXPECT_TRUE(rows[1].overlap);
  EXPECT_EQ(rows[1].report.provenance["target_length"], 60);
  for (const auto& p : truncate_corpus(corpus, 20).passages) EXPECT_EQ(split_tokens(p.text).size(), 20u);
  EXPECT_THROW(length_ablation(corpus, {60, 20}, Detector::likelihood, small_config(), toy_backends()),
               ConfigError);
  EXPECT_THROW(length_ablation(corpus, {1}, Detector::likelihood, small_config(), toy_backends()), ConfigError);
}

TEST(Sweep, ZeroPointIsBaseAndSinglePointMatchesEval) {
  const auto corpus = small_corpus();
  const auto cfg = small_config();
  const auto s = sweep(corpus, {0, 4}, {0.0, 0.05}, Detector::logrank, cfg, toy_backends());
  ASSERT_EQ(s.n_curve.size(), 2u);
  EXPECT_EQ(s.n_curve[0].auroc, s.base_auroc);
  EXPECT_EQ(s.rho_curve[0].auroc, s.base_auroc);

  // n=4, rho=0.05 is exactly the eval configuration.
  const auto r = run_benchmark(corpus, {{Variant::Kind::tocsin, Detector::logrank}}, cfg, toy_backends());
  EXPECT_EQ(s.n_curve[1].auroc, r.auroc.at("logrank+tocsin"));
  EXPECT_EQ(s.rho_curve[1].auroc, r.auroc.at("logrank+tocsin"));
}

TEST(Bench, PositiveTimesAndWarmupSkip) {
  const auto cfg = small_config();
  const auto r = runtime_bench(small_corpus(3), Detector::likelihood, cfg, toy_backends());
  EXPECT_EQ(r.instances, 3u);
  EXPECT_FALSE(r.warmup_skipped);
  EXPECT_GT(r.base_seconds, 0.0);
  EXPECT_GT(r.delta_seconds, 0.0);
  EXPECT_NEAR(r.tocsin_seconds, r.base_seconds + r.delta_seconds, 1e-15);

  const auto tiny = runtime_bench(small_corpus(1), Detector::likelihood, cfg, toy_backends());
  EXPECT_TRUE(tiny.warmup_skipped);
  EXPECT_EQ(tiny.instances, 2u);
  EXPECT_FALSE(tiny.warnings.empty());
}

TEST(Serialization, CsvAndJson) {
  const auto h = export_histograms(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0}, 2);
  EXPECT_EQ(histogram_csv(h), "bin_lo,bin_hi,human,llm\n0.0,0.5,1,0\n0.5,1.0,1,1\n");
  const auto r = run_benchmark(small_corpus(2), {{Variant::Kind::base, Detector::likelihood}}, small_config(),
                               toy_backends());
  const auto j = to_json(r);
  EXPECT_TRUE(j.contains("auroc"));
  EXPECT_EQ(j["provenance"]["seed"], 7);
}
