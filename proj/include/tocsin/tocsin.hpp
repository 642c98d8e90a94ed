#pragma once

// Dual-channel detection: a base detector score v is rescaled by the token
// cohesiveness u of the passage,
//
//   w = exp(u) * v    if v >= 0
//   w = exp(-u) * v   if v <  0
//
// and the passage is called LLM-generated when w exceeds a threshold.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "tocsin/cohesiveness.hpp"
#include "tocsin/corpus.hpp"
#include "tocsin/detectors.hpp"
#include "tocsin/errors.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin {

struct Combined {
  double value = 0.0;
  bool saturated = false;  // true when the exact product overflowed a double
};

inline Combined combine_checked(double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) throw InputError("combine requires finite u and v");
  if (v == 0.0) return {0.0, false};
  const double w = v > 0.0 ? std::exp(u) * v : std::exp(-u) * v;
  if (std::isfinite(w)) return {w, false};
  constexpr double kMax = std::numeric_limits<double>::max();
  return {v > 0.0 ? kMax : -kMax, true};
}

inline double combine(double u, double v) { return combine_checked(u, v).value; }

struct DetectConfig {
  Detector base = Detector::fast_detectgpt;
  DetectorOptions detector;
  DeletionConfig deletion;
  std::optional<double> threshold;
  Setting setting = Setting::black_box;
  bool zero_cohesiveness = false;  // diagnostic: force u = 0 so that w = v
  std::size_t jobs = 1;
};

// The scoring model feeds the base detector; the cohesion model computes DIFF.
struct Backends {
  const Backend& scorer;
  const Backend& cohesion;
};

struct DetectionResult {
  std::string passage_id;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  std::optional<double> threshold;
  std::optional<bool> decision;
  Detector base = Detector::fast_detectgpt;
  bool saturated = false;
  std::vector<double> per_copy_diffs;
  std::vector<std::vector<std::size_t>> deleted_index_sets;
  DetectConfig config;
};

inline nlohmann::json config_snapshot(const DetectConfig& c) {
  return {{"base", std::string(to_string(c.base))},
          {"aggregation", c.detector.aggregation == Aggregation::mean ? "mean" : "sum"},
          {"normalize_fastdetect", c.detector.normalize_fastdetect},
          {"n_samples", c.detector.n_samples},
          {"n_copies", c.deletion.n_copies},
          {"rho", c.deletion.rho},
          {"metric", std::string(to_string(c.deletion.metric))},
          {"per_token_diff", c.deletion.per_token_diff},
          {"seed", c.deletion.global_seed},
          {"setting", std::string(to_string(c.setting))},
          {"zero_cohesiveness", c.zero_cohesiveness}};
}

inline nlohmann::json to_json(const DetectionResult& r) {
  nlohmann::json j{{"passage_id", r.passage_id},
                   {"u", r.u},
                   {"v", r.v},
                   {"w", r.w},
                   {"base_detector", std::string(to_string(r.base))},
                   {"saturated", r.saturated},
                   {"per_copy_diffs", r.per_copy_diffs},
                   {"deleted_index_sets", r.deleted_index_sets},
                   {"config", config_snapshot(r.config)}};
  j["threshold"] = r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr);
  j["decision"] = r.decision ? nlohmann::json(*r.decision) : nlohmann::json(nullptr);
  return j;
}

/// Creates copies by random token deletion, averages their DIFF into u,
/// scores the passage with the base detector into v, and combines.
inline DetectionResult detect(const Passage& passage, const DetectConfig& config,
                              const Backends& backends) {
  const auto canonical = canonicalize(passage.text);
  if (split_tokens(canonical).size() < kMinCohesivenessTokens) {
    throw InputError("passage too short for cohesiveness");
  }
  DetectionResult r;
  r.passage_id = passage.id;
  r.base = config.base;
  r.config = config;
  r.threshold = config.threshold;

  if (!config.zero_cohesiveness) {
    auto coh = token_cohesiveness(canonical, config.deletion, backends.cohesion, config.jobs);
    r.u = coh.u;
    r.per_copy_diffs = std::move(coh.per_copy_diffs);
    r.deleted_index_sets = std::move(coh.deleted_index_sets);
  }
  r.v = base_score(config.base, backends.scorer, canonical, config.deletion.global_seed, config.detector);
  const auto w = combine_checked(r.u, r.v);
  r.w = w.value;
  r.saturated = w.saturated;
  if (config.threshold) r.decision = r.w > *config.threshold;
  return r;
}

}  // namespace tocsin
