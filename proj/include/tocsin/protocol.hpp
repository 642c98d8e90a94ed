#pragma once

// JSON wire format of the remote scoring protocol.
//
//   POST /v1/score       {"mode", "source", "target", "want"} -> ScoredSequence
//   POST /v1/fastdetect  {"text", "n_samples", "seed"}       -> FastDetectStats
//   GET  /v1/models      -> {"causal": [...], "seq2seq": [...]}
//   GET  /v1/health      -> {"status": "ok"}
//
// Status codes: 400 malformed request, 413 context overflow, 503 model not loaded.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "tocsin/errors.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin::protocol {

using nlohmann::json;

enum class Mode { causal, seq2seq, causal_template };

inline std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::causal: return "causal";
    case Mode::seq2seq: return "seq2seq";
    case Mode::causal_template: return "causal-template";
  }
  return "causal";
}

inline std::optional<Mode> parse_mode(std::string_view s) noexcept {
  if (s == "causal") return Mode::causal;
  if (s == "seq2seq") return Mode::seq2seq;
  if (s == "causal-template") return Mode::causal_template;
  return std::nullopt;
}

struct ScoreRequest {
  Mode mode = Mode::causal;
  std::optional<std::string> source;
  std::string target;
  Wants wants;
};

struct FastDetectRequest {
  std::string text;
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
};

// Thrown while decoding a request body; maps to 400.
class MalformedRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json encode(const ScoreRequest& r) {
  json want = json::array({"logprobs"});
  if (r.wants.ranks) want.push_back("ranks");
  if (r.wants.entropies) want.push_back("entropies");
  return json{{"mode", std::string(to_string(r.mode))},
              {"source", r.source ? json(*r.source) : json(nullptr)},
              {"target", r.target},
              {"want", want}};
}

inline json encode(const FastDetectRequest& r) {
  return json{{"text", r.text}, {"n_samples", r.n_samples}, {"seed", r.seed}};
}

inline json encode(const ScoredSequence& s) {
  json j{{"tokens", s.tokens}, {"logprobs", s.logprobs}};
  j["ranks"] = s.ranks ? json(*s.ranks) : json(nullptr);
  j["entropies"] = s.entropies ? json(*s.entropies) : json(nullptr);
  return j;
}

inline json encode(const FastDetectStats& s) {
  return json{{"ll_actual", s.ll_actual},
              {"sample_mean_ll", s.sample_mean_ll},
              {"sample_std_ll", s.sample_std_ll},
              {"analytic_mean_ll", s.analytic_mean_ll}};
}

inline ScoreRequest decode_score_request(const json& j) {
  if (!j.is_object()) throw MalformedRequest("request body must be an object");
  ScoreRequest r;
  const auto mode = j.find("mode");
  if (mode == j.end() || !mode->is_string()) throw MalformedRequest("\"mode\" must be a string");
  const auto m = parse_mode(mode->get<std::string>());
  if (!m) throw MalformedRequest("unknown mode \"" + mode->get<std::string>() + "\"");
  r.mode = *m;
  const auto target = j.find("target");
  if (target == j.end() || !target->is_string()) throw MalformedRequest("\"target\" must be a string");
  r.target = target->get<std::string>();
  if (const auto src = j.find("source"); src != j.end() && !src->is_null()) {
    if (!src->is_string()) throw MalformedRequest("\"source\" must be a string or null");
    r.source = src->get<std::string>();
  }
  if (const auto want = j.find("want"); want != j.end()) {
    if (!want->is_array()) throw MalformedRequest("\"want\" must be an array");
    for (const auto& w : *want) {
      if (!w.is_string()) throw MalformedRequest("\"want\" entries must be strings");
      const auto s = w.get<std::string>();
      if (s == "ranks") {
        r.wants.ranks = true;
      } else if (s == "entropies") {
        r.wants.entropies = true;
      } else if (s != "logprobs") {
        throw MalformedRequest("unknown want \"" + s + "\"");
      }
    }
  }
  return r;
}

inline FastDetectRequest decode_fastdetect_request(const json& j) {
  if (!j.is_object()) throw MalformedRequest("request body must be an object");
  FastDetectRequest r;
  const auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw MalformedRequest("\"text\" must be a string");
  r.text = text->get<std::string>();
  const auto n = j.find("n_samples");
  if (n == j.end() || !n->is_number_integer() || n->get<std::int64_t>() < 1) {
    throw MalformedRequest("\"n_samples\" must be a positive integer");
  }
  r.n_samples = n->get<std::uint64_t>();
  const auto seed = j.find("seed");
  if (seed == j.end() || !seed->is_number_integer()) throw MalformedRequest("\"seed\" must be an integer");
  r.seed = seed->is_number_unsigned() ? seed->get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(seed->get<std::int64_t>());
  return r;
}

inline ScoredSequence decode_scored(const json& j) {
  try {
    ScoredSequence s;
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.logprobs = j.at("logprobs").get<std::vector<double>>();
    if (const auto it = j.find("ranks"); it != j.end() && !it->is_null()) {
      s.ranks = it->get<std::vector<std::int64_t>>();
    }
    if (const auto it = j.find("entropies"); it != j.end() && !it->is_null()) {
      s.entropies = it->get<std::vector<double>>();
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed score response: ") + e.what());
  } catch (const InputError& e) {
    throw BackendError(std::string("invalid score response: ") + e.what());
  }
}

inline FastDetectStats decode_stats(const json& j, std::uint64_t n_samples, std::uint64_t seed) {
  try {
    FastDetectStats s;
    s.ll_actual = j.at("ll_actual").get<double>();
    s.sample_mean_ll = j.at("sample_mean_ll").get<double>();
    s.sample_std_ll = j.at("sample_std_ll").get<double>();
    s.analytic_mean_ll = j.at("analytic_mean_ll").get<double>();
    s.n_samples = n_samples;
    s.seed = seed;
    return s;
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed fastdetect response: ") + e.what());
  }
}

struct Response {
  int status = 200;
  json body;
};

inline json error_body(const std::string& message) { return json{{"error", message}}; }

/// Maps an in-flight exception to a protocol response. Call from a catch block.
inline Response current_exception_response() {
  try {
    throw;
  } catch (const MalformedRequest& e) {
    return {400, error_body(e.what())};
  } catch (const json::exception& e) {
    return {400, error_body(e.what())};
  } catch (const InputError& e) {
    return {400, error_body(e.what())};
  } catch (const ContextOverflow& e) {
    return {413, error_body(e.what())};
  } catch (const BackendError& e) {
    return {503, error_body(e.what())};
  } catch (const std::exception& e) {
    return {500, error_body(e.what())};
  }
}

/// Server-side handling of POST /v1/score against any backend.
inline Response handle_score(const Backend& backend, const std::string& body) {
  try {
    const auto req = decode_score_request(json::parse(body));
    const std::string source = req.source.value_or("");
    ScoredSequence s;
    switch (req.mode) {
      case Mode::causal: s = backend.causal_score(req.target, req.wants); break;
      case Mode::seq2seq: s = backend.conditional_score(source, req.target); break;
      case Mode::causal_template: s = backend.template_score(source, req.target); break;
    }
    return {200, encode(s)};
  } catch (...) {
    return current_exception_response();
  }
}

inline Response handle_fastdetect(const Backend& backend, const std::string& body) {
  try {
    const auto req = decode_fastdetect_request(json::parse(body));
    return {200, encode(backend.fastdetect_stats(req.text, req.n_samples, req.seed))};
  } catch (...) {
    return current_exception_response();
  }
}

inline Response handle_models(const Backend& backend) {
  return {200, json{{"causal", json::array({backend.causal_model_id()})},
                    {"seq2seq", json::array({backend.seq2seq_model_id()})}}};
}

}  // namespace tocsin::protocol
