#pragma once

// Corpus-level evaluation: score tables, AUROC/correlation reports, length
// ablation, hyperparameter sweeps and runtime benchmarks.
//
// Scoring runs passage-parallel; every reducer consumes a finished ScoreTable
// and is single-threaded. Per-passage failures are recorded and excluded per
// variant, never imputed.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tocsin/cohesiveness.hpp"
#include "tocsin/corpus.hpp"
#include "tocsin/detectors.hpp"
#include "tocsin/metrics.hpp"
#include "tocsin/parallel.hpp"
#include "tocsin/scoring.hpp"
#include "tocsin/tocsin.hpp"

namespace tocsin {

// ---------------------------------------------------------------------------
// Variants

struct Variant {
  enum class Kind { base, tocsin, cohesiveness, pair };
  Kind kind = Kind::base;
  Detector primary = Detector::fast_detectgpt;
  Detector secondary = Detector::likelihood;  // pair only: the detector used in place of u

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::base: return std::string(to_string(primary));
      case Kind::tocsin: return std::string(to_string(primary)) + "+tocsin";
      case Kind::cohesiveness: return "cohesiveness";
      case Kind::pair: return std::string(to_string(primary)) + "+" + std::string(to_string(secondary));
    }
    return {};
  }

  friend bool operator==(const Variant&, const Variant&) = default;
};

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "cohesiveness") return Variant{Variant::Kind::cohesiveness};
  const auto plus = s.find('+');
  const auto head = parse_detector(s.substr(0, plus));
  if (!head) return std::nullopt;
  if (plus == std::string_view::npos) return Variant{Variant::Kind::base, *head};
  const auto tail = s.substr(plus + 1);
  if (tail == "tocsin") return Variant{Variant::Kind::tocsin, *head};
  if (const auto other = parse_detector(tail); other && *other != *head) {
    return Variant{Variant::Kind::pair, *head, *other};
  }
  return std::nullopt;
}

/// Bases, their +tocsin versions (Entropy is a baseline only), standalone
/// cohesiveness, and Fast-DetectGPT paired with each other selected detector.
inline std::vector<Variant> default_variants(const std::vector<Detector>& bases) {
  std::vector<Variant> out;
  for (auto d : bases) out.push_back({Variant::Kind::base, d});
  for (auto d : bases) {
    if (d != Detector::entropy) out.push_back({Variant::Kind::tocsin, d});
  }
  out.push_back({Variant::Kind::cohesiveness});
  const bool has_fast =
      std::find(bases.begin(), bases.end(), Detector::fast_detectgpt) != bases.end();
  if (has_fast) {
    for (auto d : bases) {
      if (d == Detector::likelihood || d == Detector::logrank || d == Detector::lrr) {
        out.push_back({Variant::Kind::pair, Detector::fast_detectgpt, d});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score tables

struct Cell {
  std::optional<double> value;
  std::string error;

  [[nodiscard]] bool ok() const noexcept { return value.has_value(); }
};

struct ScoreRow {
  std::string passage_id;
  Label label = Label::human;
  std::string dataset;
  std::map<std::string, Cell> scores;  // variant name -> score
};

struct ScoreTable {
  std::vector<std::string> variants;
  std::vector<ScoreRow> rows;
};

struct EvalConfig {
  DetectorOptions detector;
  DeletionConfig deletion;
  Setting setting = Setting::black_box;
  std::size_t jobs = 1;
  std::size_t bins = 20;
  bool zero_cohesiveness = false;
};

// Raw per-passage channel outputs from which every variant is derived.
struct PassageChannels {
  std::map<Detector, Cell> base;
  Cell u;
};

namespace detail {

template <typename Fn>
Cell capture(Fn&& fn) {
  try {
    return Cell{fn(), {}};
  } catch (const DegenerateScore& e) {
    return Cell{std::nullopt, e.what()};
  } catch (const InputError& e) {
    return Cell{std::nullopt, e.what()};
  } catch (const ContextOverflow& e) {
    return Cell{std::nullopt, e.what()};
  }
}

inline std::string dataset_key(const Passage& p) { return p.dataset.empty() ? "default" : p.dataset; }

}  // namespace detail

/// Base detector scores for one passage, sharing a single causal pass.
inline std::map<Detector, Cell> score_bases(const Passage& passage, const std::set<Detector>& detectors,
                                            const EvalConfig& config, const Backend& scorer) {
  std::map<Detector, Cell> out;
  std::string canonical;
  try {
    canonical = canonicalize(passage.text);
  } catch (const InputError& e) {
    for (auto d : detectors) out[d] = Cell{std::nullopt, e.what()};
    return out;
  }
  const bool need_causal = std::any_of(detectors.begin(), detectors.end(),
                                       [](Detector d) { return d != Detector::fast_detectgpt; });
  std::optional<ScoredSequence> causal;
  std::string causal_error;
  if (need_causal) {
    const bool ranks = detectors.count(Detector::logrank) || detectors.count(Detector::lrr);
    const bool entropies = detectors.count(Detector::entropy) > 0;
    try {
      causal = scorer.causal_score(canonical, {.ranks = ranks, .entropies = entropies});
    } catch (const ContextOverflow& e) {
      causal_error = e.what();
    }
  }
  const auto& agg = config.detector.aggregation;
  for (auto d : detectors) {
    if (d != Detector::fast_detectgpt && !causal) {
      out[d] = Cell{std::nullopt, causal_error};
      continue;
    }
    switch (d) {
      case Detector::likelihood: out[d] = detail::capture([&] { return likelihood(*causal, agg); }); break;
      case Detector::logrank: out[d] = detail::capture([&] { return logrank(*causal, agg); }); break;
      case Detector::lrr: out[d] = detail::capture([&] { return lrr(*causal); }); break;
      case Detector::entropy: out[d] = detail::capture([&] { return entropy_score(*causal); }); break;
      case Detector::fast_detectgpt:
        out[d] = detail::capture([&] {
          return fast_detectgpt(
              scorer.fastdetect_stats(canonical, config.detector.n_samples,
                                      fastdetect_seed(config.deletion.global_seed, canonical)),
              config.detector.normalize_fastdetect);
        });
        break;
    }
  }
  return out;
}

inline Cell score_cohesiveness(const Passage& passage, const DeletionConfig& deletion,
                               const Backend& cohesion, bool zero) {
  if (zero) return Cell{0.0, {}};
  return detail::capture([&] { return token_cohesiveness(passage.text, deletion, cohesion).u; });
}

inline Cell variant_cell(const Variant& v, const PassageChannels& ch) {
  const auto base = [&](Detector d) -> const Cell& {
    static const Cell missing{std::nullopt, "detector not computed"};
    const auto it = ch.base.find(d);
    return it == ch.base.end() ? missing : it->second;
  };
  const auto combined = [](const Cell& u, const Cell& v) -> Cell {
    if (!v.ok()) return v;
    if (!u.ok()) return u;
    return Cell{combine(*u.value, *v.value), {}};
  };
  switch (v.kind) {
    case Variant::Kind::base: return base(v.primary);
    case Variant::Kind::tocsin: return combined(ch.u, base(v.primary));
    case Variant::Kind::cohesiveness: return ch.u;
    case Variant::Kind::pair: return combined(base(v.secondary), base(v.primary));
  }
  return Cell{std::nullopt, "unknown variant"};
}

inline std::set<Detector> detectors_needed(const std::vector<Variant>& variants) {
  std::set<Detector> out;
  for (const auto& v : variants) {
    if (v.kind != Variant::Kind::cohesiveness) out.insert(v.primary);
    if (v.kind == Variant::Kind::pair) out.insert(v.secondary);
  }
  return out;
}

inline bool needs_cohesiveness(const std::vector<Variant>& variants) {
  return std::any_of(variants.begin(), variants.end(), [](const Variant& v) {
    return v.kind == Variant::Kind::tocsin || v.kind == Variant::Kind::cohesiveness;
  });
}

/// Enforces that white-box runs score each LLM passage with its source model.
inline void check_setting(const Corpus& corpus, Setting setting, const Backend& scorer) {
  if (setting != Setting::white_box) return;
  const auto id = scorer.causal_model_id();
  for (const auto& p : corpus.passages) {
    if (p.label == Label::llm && p.source_model != id) {
      throw ConfigError("white-box setting requires scorer model \"" + id + "\" to match source_model \"" +
                        p.source_model + "\" of passage " + p.id);
    }
  }
}

inline std::vector<PassageChannels> score_channels(const Corpus& corpus, const std::vector<Variant>& variants,
                                                   const EvalConfig& config, const Backends& backends) {
  const auto detectors = detectors_needed(variants);
  const bool need_u = needs_cohesiveness(variants);
  std::vector<PassageChannels> channels(corpus.passages.size());
  parallel_for(corpus.passages.size(), config.jobs, [&](std::size_t i) {
    const auto& p = corpus.passages[i];
    channels[i].base = score_bases(p, detectors, config, backends.scorer);
    channels[i].u = need_u ? score_cohesiveness(p, config.deletion, backends.cohesion, config.zero_cohesiveness)
                           : Cell{std::nullopt, "not computed"};
  });
  return channels;
}

inline ScoreTable assemble_table(const Corpus& corpus, const std::vector<Variant>& variants,
                                 const std::vector<PassageChannels>& channels) {
  ScoreTable table;
  for (const auto& v : variants) table.variants.push_back(v.name());
  table.rows.reserve(corpus.passages.size());
  for (std::size_t i = 0; i < corpus.passages.size(); ++i) {
    const auto& p = corpus.passages[i];
    ScoreRow row{p.id, p.label, detail::dataset_key(p), {}};
    for (const auto& v : variants) row.scores[v.name()] = variant_cell(v, channels[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline ScoreTable build_score_table(const Corpus& corpus, const std::vector<Variant>& variants,
                                    const EvalConfig& config, const Backends& backends) {
  config.deletion.validate();
  check_setting(corpus, config.setting, backends.scorer);
  return assemble_table(corpus, variants, score_channels(corpus, variants, config, backends));
}

// ---------------------------------------------------------------------------
// Reports

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::optional<double>>> values;  // nullopt where undefined
};

struct EvalReport {
  std::vector<std::string> variants;
  std::vector<std::string> datasets;
  std::map<std::string, std::optional<double>> auroc;  // unweighted mean over datasets
  std::map<std::string, std::map<std::string, std::optional<double>>> auroc_by_dataset;
  std::map<std::string, double> improvements;  // "<base>+tocsin" -> AUROC delta over "<base>"
  CorrelationMatrix correlations;
  std::map<std::string, CorrelationMatrix> correlations_by_label;
  std::map<std::string, Histogram> histograms;
  std::map<std::string, double> runtime;
  std::map<std::string, std::size_t> failures;  // variant -> excluded passages
  std::vector<std::string> warnings;
  nlohmann::json provenance;
};

inline CorrelationMatrix correlation_matrix(const ScoreTable& table, std::optional<Label> label = std::nullopt) {
  CorrelationMatrix m;
  m.labels = table.variants;
  const auto n = table.variants.size();
  m.values.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t a = 0; a < n; ++a) {
    m.values[a][a] = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<double> xs;
      std::vector<double> ys;
      for (const auto& row : table.rows) {
        if (label && row.label != *label) continue;
        const auto& ca = row.scores.at(table.variants[a]);
        const auto& cb = row.scores.at(table.variants[b]);
        if (ca.ok() && cb.ok()) {
          xs.push_back(*ca.value);
          ys.push_back(*cb.value);
        }
      }
      std::optional<double> r;
      try {
        r = pearson(xs, ys);
      } catch (const InputError&) {
      }
      m.values[a][b] = r;
      m.values[b][a] = r;
    }
  }
  return m;
}

inline EvalReport summarize(const ScoreTable& table, const EvalConfig& config) {
  EvalReport report;
  report.variants = table.variants;
  std::set<std::string> datasets;
  for (const auto& row : table.rows) datasets.insert(row.dataset);
  report.datasets.assign(datasets.begin(), datasets.end());

  for (const auto& name : table.variants) {
    std::size_t excluded = 0;
    for (const auto& row : table.rows) {
      if (!row.scores.at(name).ok()) ++excluded;
    }
    report.failures[name] = excluded;
    if (excluded > 0) {
      report.warnings.push_back(name + ": " + std::to_string(excluded) + " passage(s) excluded from AUROC");
    }

    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& ds : report.datasets) {
      std::vector<double> pos;
      std::vector<double> neg;
      for (const auto& row : table.rows) {
        if (row.dataset != ds) continue;
        const auto& c = row.scores.at(name);
        if (!c.ok()) continue;
        (row.label == Label::llm ? pos : neg).push_back(*c.value);
      }
      std::optional<double> a;
      if (!pos.empty() && !neg.empty()) {
        a = auroc(pos, neg);
        sum += *a;
        ++counted;
      } else {
        report.warnings.push_back(name + " on " + ds + ": AUROC undefined (needs both labels)");
      }
      report.auroc_by_dataset[ds][name] = a;
    }
    report.auroc[name] = counted > 0 ? std::optional<double>(sum / static_cast<double>(counted)) : std::nullopt;
  }

  for (const auto& name : table.variants) {
    const auto v = parse_variant(name);
    if (!v || v->kind != Variant::Kind::tocsin) continue;
    const auto base = std::string(to_string(v->primary));
    if (!report.auroc.count(base)) continue;
    const auto& a = report.auroc[name];
    const auto& b = report.auroc[base];
    if (a && b) report.improvements[name] = *a - *b;
  }

  report.correlations = correlation_matrix(table);
  report.correlations_by_label["human"] = correlation_matrix(table, Label::human);
  report.correlations_by_label["llm"] = correlation_matrix(table, Label::llm);

  for (const auto& name : table.variants) {
    std::vector<double> human;
    std::vector<double> llm;
    for (const auto& row : table.rows) {
      const auto& c = row.scores.at(name);
      if (c.ok()) (row.label == Label::llm ? llm : human).push_back(*c.value);
    }
    if (!human.empty() || !llm.empty()) report.histograms[name] = export_histograms(human, llm, config.bins);
  }
  return report;
}

inline nlohmann::json provenance_json(const EvalConfig& config, const Backends& backends, const Corpus& corpus) {
  return {{"corpus", corpus.name},
          {"n_passages", corpus.passages.size()},
          {"n_human", corpus.count(Label::human)},
          {"n_llm", corpus.count(Label::llm)},
          {"seed", config.deletion.global_seed},
          {"n_copies", config.deletion.n_copies},
          {"rho", config.deletion.rho},
          {"metric", std::string(to_string(config.deletion.metric))},
          {"per_token_diff", config.deletion.per_token_diff},
          {"aggregation", config.detector.aggregation == Aggregation::mean ? "mean" : "sum"},
          {"normalize_fastdetect", config.detector.normalize_fastdetect},
          {"n_samples", config.detector.n_samples},
          {"setting", std::string(to_string(config.setting))},
          {"zero_cohesiveness", config.zero_cohesiveness},
          {"scorer_model", backends.scorer.causal_model_id()},
          {"cohesion_model", config.deletion.metric == DiffMetric::neg_bartscore
                                 ? backends.cohesion.seq2seq_model_id()
                                 : backends.cohesion.causal_model_id()}};
}

/// Scores every passage under every variant and reduces to a report.
inline EvalReport run_benchmark(const Corpus& corpus, const std::vector<Variant>& variants,
                                const EvalConfig& config, const Backends& backends) {
  if (!corpus.has_both_labels()) throw CorpusError("evaluation requires both human and llm passages");
  if (variants.empty()) throw ConfigError("no variants to evaluate");
  auto report = summarize(build_score_table(corpus, variants, config, backends), config);
  report.provenance = provenance_json(config, backends, corpus);
  return report;
}

// ---------------------------------------------------------------------------
// Length ablation

struct AblationRow {
  std::size_t target = 0;
  EvalReport report;
  std::vector<double> u_human;
  std::vector<double> u_llm;
  Histogram u_histogram;
  std::optional<double> overlap;
};

inline const std::vector<std::size_t>& default_length_targets() {
  static const std::vector<std::size_t> targets{45, 90, 135, 180};
  return targets;
}

inline Corpus truncate_corpus(const Corpus& corpus, std::size_t target) {
  Corpus out{corpus.name, corpus.passages};
  for (auto& p : out.passages) p.text = truncate_to_length(p.text, target);
  return out;
}

inline std::vector<AblationRow> length_ablation(const Corpus& corpus, const std::vector<std::size_t>& targets,
                                                Detector base, const EvalConfig& config,
                                                const Backends& backends) {
  if (targets.empty()) throw ConfigError("length ablation needs at least one target");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < kMinCohesivenessTokens) {
      throw ConfigError("target " + std::to_string(targets[i]) + " is below the cohesiveness minimum length");
    }
    if (i > 0 && targets[i] <= targets[i - 1]) throw ConfigError("length targets must be strictly ascending");
  }
  const std::vector<Variant> variants{{Variant::Kind::base, base},
                                      {Variant::Kind::tocsin, base},
                                      {Variant::Kind::cohesiveness}};
  std::vector<AblationRow> rows;
  for (auto target : targets) {
    const auto truncated = truncate_corpus(corpus, target);
    const auto table = build_score_table(truncated, variants, config, backends);
    AblationRow row;
    row.target = target;
    row.report = summarize(table, config);
    row.report.provenance = provenance_json(config, backends, truncated);
    row.report.provenance["target_length"] = target;
    for (const auto& r : table.rows) {
      const auto& c = r.scores.at("cohesiveness");
      if (c.ok()) (r.label == Label::llm ? row.u_llm : row.u_human).push_back(*c.value);
    }
    if (!row.u_human.empty() || !row.u_llm.empty()) {
      row.u_histogram = export_histograms(row.u_human, row.u_llm, config.bins);
      if (!row.u_human.empty() && !row.u_llm.empty()) row.overlap = histogram_overlap(row.u_histogram);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Hyperparameter sweep

struct SweepPoint {
  double value = 0.0;  // n (as a number) or rho; 0 is the base-detector column
  std::optional<double> auroc;
};

struct SweepResult {
  Detector base = Detector::fast_detectgpt;
  std::optional<double> base_auroc;
  std::vector<SweepPoint> n_curve;
  std::vector<SweepPoint> rho_curve;
  nlohmann::json provenance;
};

inline const std::vector<std::size_t>& default_sweep_n() {
  static const std::vector<std::size_t> v{10, 20, 50, 100};
  return v;
}
inline const std::vector<double>& default_sweep_rho() {
  static const std::vector<double> v{0.015, 0.05, 0.075, 0.10};
  return v;
}

/// AUROC of base+tocsin over the n grid (rho at its configured value) and the
/// rho grid (n at its configured value). n = 0 / rho = 0 report the base AUROC.
inline SweepResult sweep(const Corpus& corpus, const std::vector<std::size_t>& n_values,
                         const std::vector<double>& rho_values, Detector base, const EvalConfig& config,
                         const Backends& backends) {
  if (n_values.empty() || rho_values.empty()) throw ConfigError("sweep grids must be non-empty");
  if (!corpus.has_both_labels()) throw CorpusError("sweep requires both human and llm passages");
  config.deletion.validate();
  check_setting(corpus, config.setting, backends.scorer);

  const Variant base_v{Variant::Kind::base, base};
  const Variant tocsin_v{Variant::Kind::tocsin, base};
  // Base scores are independent of the deletion hyperparameters: compute once.
  auto channels = score_channels(corpus, {base_v}, config, backends);

  const auto avg_auroc = [&](const Variant& v) {
    return summarize(assemble_table(corpus, {v}, channels), config).auroc.at(v.name());
  };
  SweepResult result;
  result.base = base;
  result.base_auroc = avg_auroc(base_v);
  result.provenance = provenance_json(config, backends, corpus);

  const auto at = [&](std::size_t n, double rho) -> std::optional<double> {
    if (n == 0 || rho == 0.0) return result.base_auroc;
    auto deletion = config.deletion;
    deletion.n_copies = n;
    deletion.rho = rho;
    deletion.validate();
    parallel_for(corpus.passages.size(), config.jobs, [&](std::size_t i) {
      channels[i].u = score_cohesiveness(corpus.passages[i], deletion, backends.cohesion, config.zero_cohesiveness);
    });
    return avg_auroc(tocsin_v);
  };
  for (auto n : n_values) result.n_curve.push_back({static_cast<double>(n), at(n, config.deletion.rho)});
  for (auto rho : rho_values) result.rho_curve.push_back({rho, at(config.deletion.n_copies, rho)});
  return result;
}

// ---------------------------------------------------------------------------
// Runtime benchmark

struct RuntimeReport {
  std::string base_name;
  std::string tocsin_name;
  double base_seconds = 0.0;    // mean per instance
  double tocsin_seconds = 0.0;  // mean per instance, base work included
  double delta_seconds = 0.0;
  std::size_t instances = 0;
  bool warmup_skipped = false;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kWarmupInstances = 3;

inline RuntimeReport runtime_bench(const Corpus& corpus, Detector base, const EvalConfig& config,
                                   const Backends& backends) {
  if (corpus.passages.empty()) throw CorpusError("empty corpus");
  using clock = std::chrono::steady_clock;
  RuntimeReport r;
  r.base_name = std::string(to_string(base));
  r.tocsin_name = r.base_name + "+tocsin";
  std::size_t first = kWarmupInstances;
  if (corpus.passages.size() <= kWarmupInstances) {
    first = 0;
    r.warmup_skipped = true;
    r.warnings.push_back("fewer than " + std::to_string(kWarmupInstances + 1) +
                         " passages: warmup skipped");
  }
  double base_total = 0.0;
  double extra_total = 0.0;
  for (std::size_t i = 0; i < corpus.passages.size(); ++i) {
    const auto& p = corpus.passages[i];
    const auto t0 = clock::now();
    const double v = base_score(base, backends.scorer, p.text, config.deletion.global_seed, config.detector);
    const auto t1 = clock::now();
    const auto coh = token_cohesiveness(p.text, config.deletion, backends.cohesion);
    volatile double w = combine(coh.u, v);
    (void)w;
    const auto t2 = clock::now();
    if (i < first) continue;
    base_total += std::chrono::duration<double>(t1 - t0).count();
    extra_total += std::chrono::duration<double>(t2 - t1).count();
    ++r.instances;
  }
  const auto n = static_cast<double>(r.instances);
  r.base_seconds = base_total / n;
  r.delta_seconds = extra_total / n;
  r.tocsin_seconds = r.base_seconds + r.delta_seconds;
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"human", h.human}, {"llm", h.llm}};
}

inline nlohmann::json to_json(const CorrelationMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.values) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& v : r) row.push_back(detail::opt(v));
    rows.push_back(std::move(row));
  }
  return {{"labels", m.labels}, {"matrix", std::move(rows)}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json auroc = nlohmann::json::object();
  for (const auto& [k, v] : r.auroc) auroc[k] = detail::opt(v);
  nlohmann::json by_ds = nlohmann::json::object();
  for (const auto& [ds, m] : r.auroc_by_dataset) {
    for (const auto& [k, v] : m) by_ds[ds][k] = detail::opt(v);
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, h] : r.histograms) hist[k] = to_json(h);
  nlohmann::json by_label = nlohmann::json::object();
  for (const auto& [k, m] : r.correlations_by_label) by_label[k] = to_json(m);
  return {{"variants", r.variants},
          {"datasets", r.datasets},
          {"auroc", auroc},
          {"auroc_by_dataset", by_ds},
          {"improvements", r.improvements},
          {"correlations", to_json(r.correlations)},
          {"correlations_by_label", by_label},
          {"histograms", hist},
          {"runtime", r.runtime},
          {"failures", r.failures},
          {"warnings", r.warnings},
          {"provenance", r.provenance}};
}

inline nlohmann::json to_json(const AblationRow& row) {
  return {{"target", row.target},
          {"report", to_json(row.report)},
          {"u_human", row.u_human},
          {"u_llm", row.u_llm},
          {"u_histogram", to_json(row.u_histogram)},
          {"overlap", detail::opt(row.overlap)}};
}

inline nlohmann::json to_json(const SweepResult& s) {
  const auto curve = [](const std::vector<SweepPoint>& pts, const char* key) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : pts) out.push_back({{key, p.value}, {"auroc", detail::opt(p.auroc)}});
    return out;
  };
  return {{"base", std::string(to_string(s.base))},
          {"base_auroc", detail::opt(s.base_auroc)},
          {"n_curve", curve(s.n_curve, "n")},
          {"rho_curve", curve(s.rho_curve, "rho")},
          {"provenance", s.provenance}};
}

inline nlohmann::json to_json(const RuntimeReport& r) {
  return {{"runtime", {{r.base_name, r.base_seconds}, {r.tocsin_name, r.tocsin_seconds}}},
          {"delta_seconds", r.delta_seconds},
          {"instances", r.instances},
          {"warmup_skipped", r.warmup_skipped},
          {"warnings", r.warnings}};
}

namespace detail {

inline std::string csv_number(double v) { return nlohmann::json(v).dump(); }

}  // namespace detail

/// "bin_lo,bin_hi,human,llm" rows.
inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,human,llm\n";
  for (std::size_t b = 0; b < h.human.size(); ++b) {
    out += detail::csv_number(h.edges[b]) + "," + detail::csv_number(h.edges[b + 1]) + "," +
           std::to_string(h.human[b]) + "," + std::to_string(h.llm[b]) + "\n";
  }
  return out;
}

/// Square matrix with a header row; undefined cells are empty.
inline std::string correlation_csv(const CorrelationMatrix& m) {
  std::string out = "variant";
  for (const auto& l : m.labels) out += "," + l;
  out += "\n";
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out += m.labels[i];
    for (const auto& v : m.values[i]) out += "," + (v ? detail::csv_number(*v) : std::string());
    out += "\n";
  }
  return out;
}

}  // namespace tocsin
