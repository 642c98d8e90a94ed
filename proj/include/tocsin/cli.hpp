#pragma once

// Command-line front end: configuration parsing and subcommand dispatch.
//
//   tocsin detect|eval|histogram|ablate-length|sweep|correlate|bench [flags]
//
// Precedence is flags > --config file > defaults. Exit codes: 0 success,
// 1 unexpected failure, 2 configuration error, 3 corpus/input error,
// 4 backend error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tocsin/cohesiveness.hpp"
#include "tocsin/corpus.hpp"
#include "tocsin/detectors.hpp"
#include "tocsin/errors.hpp"
#include "tocsin/eval.hpp"
#include "tocsin/remote.hpp"
#include "tocsin/scoring.hpp"
#include "tocsin/tocsin.hpp"
#include "tocsin/toy_backend.hpp"

#ifndef TOCSIN_DATA_DIR
#define TOCSIN_DATA_DIR "data"
#endif

namespace tocsin::cli {

enum class ExitCode : int { ok = 0, failure = 1, config = 2, corpus = 3, backend = 4 };

enum class Command { detect, eval, histogram, ablate_length, sweep, correlate, bench };

inline std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::detect: return "detect";
    case Command::eval: return "eval";
    case Command::histogram: return "histogram";
    case Command::ablate_length: return "ablate-length";
    case Command::sweep: return "sweep";
    case Command::correlate: return "correlate";
    case Command::bench: return "bench";
  }
  return "detect";
}

inline constexpr const char* kEndpointEnv = "TOCSIN_ENDPOINT";
inline constexpr const char* kDefaultToyModel = TOCSIN_DATA_DIR "/toy/model.txt";

struct RunConfig {
  Command command = Command::eval;
  ScorerConfig scorer;
  DeletionConfig deletion;
  DetectorOptions detector;
  std::vector<Detector> bases;
  std::vector<std::string> variants;  // eval only; empty = defaults
  std::optional<double> threshold;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t bins = 20;
  bool zero_cohesiveness = false;

  std::string corpus_path;
  std::string text_file;
  std::string text;
  std::string out_path;
  std::string csv_path;

  std::string toy_model_path = kDefaultToyModel;
  double toy_alpha = 1.0;
  std::size_t toy_max_context = 4096;

  std::vector<std::size_t> targets = default_length_targets();
  std::vector<std::size_t> n_values = default_sweep_n();
  std::vector<double> rho_values = default_sweep_rho();

  [[nodiscard]] Detector primary_base() const { return bases.empty() ? Detector::fast_detectgpt : bases.front(); }

  [[nodiscard]] EvalConfig eval_config() const {
    EvalConfig c;
    c.detector = detector;
    c.deletion = deletion;
    c.setting = scorer.setting;
    c.jobs = jobs;
    c.bins = bins;
    c.zero_cohesiveness = zero_cohesiveness;
    return c;
  }
};

// Help requested or a usage problem; carries the text to print.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string text, int code) : std::runtime_error(text), code_{code} {}
  [[nodiscard]] int code() const noexcept { return code_; }

 private:
  int code_;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace detail {

// Collects a flag value, a config-file value and a default, then resolves.
class Resolver {
 public:
  Resolver(const CLI::App& app, nlohmann::json file) : app_{app}, file_(std::move(file)) {}

  template <typename T>
  T get(const std::string& flag, const std::optional<T>& flag_value, T fallback) const {
    if (app_.count("--" + flag) > 0 && flag_value) return *flag_value;
    for (const auto& key : {flag, underscore(flag)}) {
      if (const auto it = file_.find(key); it != file_.end()) {
        try {
          return it->template get<T>();
        } catch (const nlohmann::json::exception&) {
          throw ConfigError("config file: bad value for \"" + key + "\"");
        }
      }
    }
    return fallback;
  }

  [[nodiscard]] bool has(const std::string& flag) const {
    return app_.count("--" + flag) > 0 || file_.contains(flag) || file_.contains(underscore(flag));
  }

 private:
  static std::string underscore(std::string s) {
    for (auto& c : s) {
      if (c == '-') c = '_';
    }
    return s;
  }

  const CLI::App& app_;
  nlohmann::json file_;
};

inline nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
}

}  // namespace detail

/// Parses argv (without the program name). Throws UsageError for help or
/// usage problems and ConfigError for invalid values.
inline RunConfig parse_config(const std::vector<std::string>& args, const EnvLookup& env = process_env) {
  CLI::App app{"Zero-shot LLM-text detection with token cohesiveness", "tocsin"};
  app.fallthrough();
  app.require_subcommand(1);

  std::optional<std::string> config_path, corpus, backend, endpoint, base_csv, metric, setting, out, csv,
      text_file, text, toy_model, variants, targets, n_values, rho_values, aggregation, causal_model,
      seq2seq_model;
  std::optional<std::size_t> n_copies, jobs, bins, n_samples, toy_max_context;
  std::optional<double> rho, threshold, toy_alpha;
  std::optional<std::int64_t> seed;
  bool normalize = false;
  bool zero_u = false;
  bool per_token = false;

  app.add_option("--config", config_path, "JSON file with default flag values");
  app.add_option("--corpus", corpus, "Line-delimited JSON corpus");
  app.add_option("--backend", backend, "toy|remote");
  app.add_option("--endpoint", endpoint, std::string("Remote scoring endpoint (default $") + kEndpointEnv + ")");
  app.add_option("--base", base_csv, "Base detector(s): likelihood,logrank,lrr,entropy,fast-detectgpt");
  app.add_option("--variants", variants, "eval: comma-separated variant names");
  app.add_option("--n-copies", n_copies, "Copies per passage (default 10)");
  app.add_option("--rho", rho, "Fraction of tokens deleted per copy (default 0.015)");
  app.add_option("--metric", metric, "bartscore|gptscore");
  app.add_option("--setting", setting, "white-box|black-box");
  app.add_option("--seed", seed, "Global seed (required)");
  app.add_option("--threshold", threshold, "Decision threshold on w");
  app.add_option("--jobs", jobs, "Concurrent passages");
  app.add_option("--out", out, "Output path (default stdout)");
  app.add_option("--csv", csv, "histogram/correlate: CSV output path");
  app.add_option("--bins", bins, "Histogram bins (default 20)");
  app.add_option("--text-file", text_file, "detect: passage file");
  app.add_option("--text", text, "detect: passage text");
  app.add_option("--n-samples", n_samples, "Fast-DetectGPT samples (default 10000)");
  app.add_flag("--normalize-fastdetect", normalize, "Divide the curvature by the sample std");
  app.add_option("--aggregation", aggregation, "mean|sum for likelihood/logrank");
  app.add_flag("--zero-cohesiveness", zero_u, "Diagnostic: force u = 0");
  app.add_flag("--diff-per-token", per_token, "Divide each DIFF by the passage token count");
  app.add_option("--targets", targets, "ablate-length: comma-separated target lengths");
  app.add_option("--n-values", n_values, "sweep: comma-separated copy counts");
  app.add_option("--rho-values", rho_values, "sweep: comma-separated deletion ratios");
  app.add_option("--causal-model", causal_model, "Scoring model id");
  app.add_option("--seq2seq-model", seq2seq_model, "Cohesiveness model id");
  app.add_option("--toy-model", toy_model, "Toy backend fixture text (one document per line)");
  app.add_option("--toy-alpha", toy_alpha, "Toy backend smoothing alpha");
  app.add_option("--toy-max-context", toy_max_context, "Toy backend context window");

  const std::pair<Command, const char*> commands[] = {
      {Command::detect, "Score one passage (or every corpus passage)"},
      {Command::eval, "AUROC report over a labeled corpus"},
      {Command::histogram, "Cohesiveness histograms per label"},
      {Command::ablate_length, "AUROC and cohesiveness at truncated lengths"},
      {Command::sweep, "AUROC over copy-count and deletion-ratio grids"},
      {Command::correlate, "Pearson correlations between detector scores"},
      {Command::bench, "Per-instance runtime with and without cohesiveness"},
  };
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, desc] : commands) subs.emplace_back(cmd, app.add_subcommand(std::string(to_string(cmd)), desc));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), 0);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n\n" + app.help(), static_cast<int>(ExitCode::config));
  }

  RunConfig cfg;
  for (const auto& [cmd, sub] : subs) {
    if (sub->parsed()) cfg.command = cmd;
  }

  const detail::Resolver r(app, config_path ? detail::read_config_file(*config_path) : nlohmann::json::object());

  const auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  const auto to_size = [](const std::string& s, const char* what) -> std::size_t {
    try {
      std::size_t pos = 0;
      const auto v = std::stoll(s, &pos);
      if (pos != s.size() || v < 0) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid ") + what + ": \"" + s + "\"");
    }
  };
  const auto to_double = [](const std::string& s, const char* what) -> double {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid ") + what + ": \"" + s + "\"");
    }
  };

  // Scorer
  const auto backend_s = r.get<std::string>("backend", backend, "toy");
  if (backend_s == "toy") {
    cfg.scorer.backend = BackendKind::toy;
  } else if (backend_s == "remote") {
    cfg.scorer.backend = BackendKind::remote;
  } else {
    throw ConfigError("unknown backend \"" + backend_s + "\" (expected toy|remote)");
  }
  cfg.scorer.endpoint = r.get<std::string>("endpoint", endpoint, env(kEndpointEnv).value_or(""));
  const auto setting_s = r.get<std::string>("setting", setting, "black-box");
  if (setting_s == "white-box") {
    cfg.scorer.setting = Setting::white_box;
  } else if (setting_s == "black-box") {
    cfg.scorer.setting = Setting::black_box;
  } else {
    throw ConfigError("unknown setting \"" + setting_s + "\" (expected white-box|black-box)");
  }
  cfg.scorer.causal_model = r.get<std::string>("causal-model", causal_model, "");
  cfg.scorer.seq2seq_model = r.get<std::string>("seq2seq-model", seq2seq_model, "");
  cfg.scorer.validate();
  if (cfg.scorer.backend == BackendKind::toy) {
    const ToyOptions defaults;
    if (!cfg.scorer.causal_model.empty() && cfg.scorer.causal_model != defaults.causal_id) {
      throw ConfigError("unresolvable causal model id \"" + cfg.scorer.causal_model + "\" for toy backend");
    }
    if (!cfg.scorer.seq2seq_model.empty() && cfg.scorer.seq2seq_model != defaults.seq2seq_id) {
      throw ConfigError("unresolvable seq2seq model id \"" + cfg.scorer.seq2seq_model + "\" for toy backend");
    }
  }

  // Deletion
  cfg.deletion.n_copies = r.get<std::size_t>("n-copies", n_copies, 10);
  cfg.deletion.rho = r.get<double>("rho", rho, 0.015);
  const auto metric_s = r.get<std::string>("metric", metric, "bartscore");
  const auto m = parse_metric(metric_s);
  if (!m) throw ConfigError("unknown metric \"" + metric_s + "\" (expected bartscore|gptscore)");
  cfg.deletion.metric = *m;
  cfg.deletion.per_token_diff =
      r.get<bool>("diff-per-token", per_token ? std::optional<bool>(true) : std::nullopt, false);
  if (!r.has("seed")) throw ConfigError("--seed is required");
  cfg.seed = static_cast<std::uint64_t>(r.get<std::int64_t>("seed", seed, 0));
  cfg.deletion.global_seed = cfg.seed;
  cfg.deletion.validate();

  // Detectors
  const auto base_s = r.get<std::string>("base", base_csv, "");
  for (const auto& name : split_list(base_s)) {
    const auto d = parse_detector(name);
    if (!d) throw ConfigError("unknown base detector \"" + name + "\"");
    if (std::find(cfg.bases.begin(), cfg.bases.end(), *d) == cfg.bases.end()) cfg.bases.push_back(*d);
  }
  cfg.variants = split_list(r.get<std::string>("variants", variants, ""));
  for (const auto& v : cfg.variants) {
    if (!parse_variant(v)) throw ConfigError("unknown variant \"" + v + "\"");
  }
  cfg.detector.n_samples = r.get<std::size_t>("n-samples", n_samples, 10000);
  if (cfg.detector.n_samples < 1) throw ConfigError("--n-samples must be >= 1");
  cfg.detector.normalize_fastdetect =
      r.get<bool>("normalize-fastdetect", normalize ? std::optional<bool>(true) : std::nullopt, false);
  const auto agg_s = r.get<std::string>("aggregation", aggregation, "mean");
  if (agg_s == "mean") {
    cfg.detector.aggregation = Aggregation::mean;
  } else if (agg_s == "sum") {
    cfg.detector.aggregation = Aggregation::sum;
  } else {
    throw ConfigError("unknown aggregation \"" + agg_s + "\" (expected mean|sum)");
  }
  cfg.zero_cohesiveness =
      r.get<bool>("zero-cohesiveness", zero_u ? std::optional<bool>(true) : std::nullopt, false);

  if (r.has("threshold")) cfg.threshold = r.get<double>("threshold", threshold, 0.0);
  cfg.jobs = r.get<std::size_t>("jobs", jobs, 1);
  if (cfg.jobs < 1) throw ConfigError("--jobs must be >= 1");
  cfg.bins = r.get<std::size_t>("bins", bins, 20);
  if (cfg.bins < 1) throw ConfigError("--bins must be >= 1");

  cfg.corpus_path = r.get<std::string>("corpus", corpus, "");
  cfg.text_file = r.get<std::string>("text-file", text_file, "");
  cfg.text = r.get<std::string>("text", text, "");
  cfg.out_path = r.get<std::string>("out", out, "");
  cfg.csv_path = r.get<std::string>("csv", csv, "");

  cfg.toy_model_path = r.get<std::string>("toy-model", toy_model, kDefaultToyModel);
  cfg.toy_alpha = r.get<double>("toy-alpha", toy_alpha, 1.0);
  if (!(cfg.toy_alpha > 0.0)) throw ConfigError("--toy-alpha must be > 0");
  cfg.toy_max_context = r.get<std::size_t>("toy-max-context", toy_max_context, 4096);

  if (r.has("targets")) {
    cfg.targets.clear();
    for (const auto& s : split_list(r.get<std::string>("targets", targets, ""))) cfg.targets.push_back(to_size(s, "target"));
  }
  if (r.has("n-values")) {
    cfg.n_values.clear();
    for (const auto& s : split_list(r.get<std::string>("n-values", n_values, ""))) cfg.n_values.push_back(to_size(s, "n value"));
  }
  if (r.has("rho-values")) {
    cfg.rho_values.clear();
    for (const auto& s : split_list(r.get<std::string>("rho-values", rho_values, ""))) {
      const double v = to_double(s, "rho value");
      if (!(v >= 0.0 && v < 1.0)) throw ConfigError("rho values must lie in [0, 1)");
      cfg.rho_values.push_back(v);
    }
  }

  // Command-specific requirements
  const int text_sources = (!cfg.text_file.empty()) + (!cfg.text.empty()) + (!cfg.corpus_path.empty());
  if (cfg.command == Command::detect) {
    if (text_sources != 1) throw ConfigError("detect needs exactly one of --text-file, --text, --corpus");
    if (cfg.bases.size() > 1) throw ConfigError("detect takes a single --base");
  } else {
    if (cfg.corpus_path.empty()) throw ConfigError(std::string(to_string(cfg.command)) + " requires --corpus");
    if (!cfg.text_file.empty() || !cfg.text.empty()) {
      throw ConfigError("--text/--text-file conflict with " + std::string(to_string(cfg.command)));
    }
  }
  if (!cfg.variants.empty() && cfg.command != Command::eval) throw ConfigError("--variants applies to eval only");
  return cfg;
}

// ---------------------------------------------------------------------------

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open toy model fixture: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

inline std::unique_ptr<Backend> make_backend(const RunConfig& cfg) {
  if (cfg.scorer.backend == BackendKind::toy) {
    ToyOptions opts;
    opts.alpha = cfg.toy_alpha;
    opts.max_context = cfg.toy_max_context;
    return std::make_unique<ToyBackend>(read_lines(cfg.toy_model_path), opts);
  }
  auto remote = std::make_unique<RemoteBackend>(cfg.scorer.endpoint);
  if (!cfg.scorer.causal_model.empty() && remote->causal_model_id() != cfg.scorer.causal_model) {
    throw ConfigError("unresolvable causal model id \"" + cfg.scorer.causal_model + "\" (server offers \"" +
                      remote->causal_model_id() + "\")");
  }
  if (!cfg.scorer.seq2seq_model.empty() && remote->seq2seq_model_id() != cfg.scorer.seq2seq_model) {
    throw ConfigError("unresolvable seq2seq model id \"" + cfg.scorer.seq2seq_model + "\" (server offers \"" +
                      remote->seq2seq_model_id() + "\")");
  }
  return remote;
}

/// Writes via a sibling temp file and rename, so the target is either the
/// old content or the complete new content.
inline void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(rng::stable_hash(content) & 0xFFFFFF);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

namespace detail {

inline DetectConfig detect_config(const RunConfig& cfg) {
  DetectConfig d;
  d.base = cfg.primary_base();
  d.detector = cfg.detector;
  d.deletion = cfg.deletion;
  d.threshold = cfg.threshold;
  d.setting = cfg.scorer.setting;
  d.zero_cohesiveness = cfg.zero_cohesiveness;
  return d;
}

inline std::vector<Detector> eval_bases(const RunConfig& cfg) {
  if (!cfg.bases.empty()) return cfg.bases;
  return {std::begin(kAllDetectors), std::end(kAllDetectors)};
}

struct Outputs {
  std::string main;
  std::string csv;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open text file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Outputs run_command(const RunConfig& cfg, const Backend& backend, std::ostream& err) {
  const Backends backends{backend, backend};
  const auto eval_cfg = cfg.eval_config();
  Outputs out;

  if (cfg.command == Command::detect) {
    const auto dc = detail::detect_config(cfg);
    std::vector<Passage> passages;
    if (!cfg.corpus_path.empty()) {
      auto corpus = load_corpus(cfg.corpus_path);
      check_setting(corpus, cfg.scorer.setting, backend);
      passages = std::move(corpus.passages);
    } else if (!cfg.text_file.empty()) {
      passages.push_back({std::filesystem::path(cfg.text_file).filename().string(), read_file(cfg.text_file), Label::human, "", ""});
    } else {
      passages.push_back({"text", cfg.text, Label::human, "", ""});
    }
    std::vector<DetectionResult> results(passages.size());
    parallel_for(passages.size(), cfg.jobs, [&](std::size_t i) { results[i] = detect(passages[i], dc, backends); });
    for (const auto& r : results) out.main += to_json(r).dump() + "\n";
    return out;
  }

  const auto corpus = load_corpus(cfg.corpus_path);
  const auto warn = [&](const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) err << "warning: " << w << "\n";
  };

  switch (cfg.command) {
    case Command::eval: {
      std::vector<Variant> variants;
      for (const auto& v : cfg.variants) variants.push_back(*parse_variant(v));
      if (variants.empty()) variants = default_variants(eval_bases(cfg));
      const auto report = run_benchmark(corpus, variants, eval_cfg, backends);
      warn(report.warnings);
      out.main = to_json(report).dump(2) + "\n";
      break;
    }
    case Command::histogram: {
      if (!corpus.has_both_labels()) throw CorpusError("histogram requires both human and llm passages");
      check_setting(corpus, cfg.scorer.setting, backend);
      const std::vector<Variant> variants{{Variant::Kind::cohesiveness}};
      const auto table = build_score_table(corpus, variants, eval_cfg, backends);
      std::vector<double> human;
      std::vector<double> llm;
      std::size_t failed = 0;
      for (const auto& row : table.rows) {
        const auto& c = row.scores.at("cohesiveness");
        if (!c.ok()) {
          ++failed;
          continue;
        }
        (row.label == Label::llm ? llm : human).push_back(*c.value);
      }
      if (failed > 0) err << "warning: " << failed << " passage(s) excluded\n";
      const auto h = export_histograms(human, llm, cfg.bins);
      nlohmann::json j = to_json(h);
      j["n_human"] = human.size();
      j["n_llm"] = llm.size();
      j["excluded"] = failed;
      j["provenance"] = provenance_json(eval_cfg, backends, corpus);
      out.main = j.dump(2) + "\n";
      out.csv = histogram_csv(h);
      break;
    }
    case Command::correlate: {
      std::vector<Variant> variants;
      for (auto d : eval_bases(cfg)) variants.push_back({Variant::Kind::base, d});
      variants.push_back({Variant::Kind::cohesiveness});
      const auto table = build_score_table(corpus, variants, eval_cfg, backends);
      const auto all = correlation_matrix(table);
      nlohmann::json by_label{{"human", to_json(correlation_matrix(table, Label::human))},
                              {"llm", to_json(correlation_matrix(table, Label::llm))}};
      out.main = nlohmann::json{{"correlations", to_json(all)},
                                {"correlations_by_label", by_label},
                                {"provenance", provenance_json(eval_cfg, backends, corpus)}}
                     .dump(2) +
                 "\n";
      out.csv = correlation_csv(all);
      break;
    }
    case Command::ablate_length: {
      const auto rows = length_ablation(corpus, cfg.targets, cfg.primary_base(), eval_cfg, backends);
      nlohmann::json j = nlohmann::json::array();
      for (const auto& row : rows) {
        warn(row.report.warnings);
        j.push_back(to_json(row));
      }
      out.main = nlohmann::json{{"base", std::string(tocsin::to_string(cfg.primary_base()))}, {"rows", j}}.dump(2) + "\n";
      break;
    }
    case Command::sweep: {
      const auto s = sweep(corpus, cfg.n_values, cfg.rho_values, cfg.primary_base(), eval_cfg, backends);
      out.main = to_json(s).dump(2) + "\n";
      break;
    }
    case Command::bench: {
      const auto r = runtime_bench(corpus, cfg.primary_base(), eval_cfg, backends);
      warn(r.warnings);
      out.main = to_json(r).dump(2) + "\n";
      break;
    }
    case Command::detect:
      break;
  }
  return out;
}

}  // namespace detail

/// Runs a parsed configuration. Never leaves a partially written report.
inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto backend = make_backend(cfg);
    const auto outputs = detail::run_command(cfg, *backend, err);
    if (!cfg.csv_path.empty()) {
      if (outputs.csv.empty()) throw ConfigError("--csv is supported by histogram and correlate only");
      write_atomically(cfg.csv_path, outputs.csv);
    }
    if (cfg.out_path.empty()) {
      out << outputs.main;
    } else {
      write_atomically(cfg.out_path, outputs.main);
    }
    return static_cast<int>(ExitCode::ok);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  } catch (const CorpusError& e) {
    err << "corpus error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::corpus);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::corpus);
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::backend);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::failure);
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const EnvLookup& env = process_env) {
  RunConfig cfg;
  try {
    cfg = parse_config(args, env);
  } catch (const UsageError& e) {
    (e.code() == 0 ? out : err) << e.what() << "\n";
    return e.code();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  }
  return dispatch(cfg, out, err);
}

}  // namespace tocsin::cli
