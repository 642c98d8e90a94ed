#pragma once

// Passages, whitespace tokenization and line-delimited corpus files.
//
// All token counts used for deletion and truncation are counts of whitespace
// tokens of the canonical form (tokens joined by single spaces), which keeps
// them independent of any scorer's subword vocabulary.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tocsin/errors.hpp"

namespace tocsin {

enum class Label { human, llm };

inline std::string_view to_string(Label label) noexcept {
  return label == Label::human ? "human" : "llm";
}

inline std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "human") return Label::human;
  if (s == "llm") return Label::llm;
  return std::nullopt;
}

struct Passage {
  std::string id;
  std::string text;
  Label label = Label::human;
  std::string source_model;
  std::string dataset;

  friend bool operator==(const Passage&, const Passage&) = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }

  [[nodiscard]] std::string canonical() const { return join(tokens.begin(), tokens.end()); }

  template <typename It>
  static std::string join(It first, It last) {
    std::string out;
    for (It it = first; it != last; ++it) {
      if (it != first) out.push_back(' ');
      out += *it;
    }
    return out;
  }
};

struct Corpus {
  std::string name;
  std::vector<Passage> passages;

  [[nodiscard]] std::size_t count(Label label) const {
    return static_cast<std::size_t>(std::count_if(
        passages.begin(), passages.end(), [label](const Passage& p) { return p.label == label; }));
  }
  [[nodiscard]] bool has_both_labels() const {
    return count(Label::human) > 0 && count(Label::llm) > 0;
  }
};

namespace detail {

// Length in bytes of the Unicode whitespace code point starting at s[i], or 0.
// Covers ASCII whitespace plus the UTF-8 encodings of U+0085, U+00A0, U+1680,
// U+2000..U+200A, U+2028, U+2029, U+202F, U+205F and U+3000.
inline std::size_t whitespace_len(std::string_view s, std::size_t i) noexcept {
  const auto b = [&](std::size_t k) -> unsigned {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u;
  };
  switch (b(0)) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
      return 1;
    case 0xC2:
      return (b(1) == 0x85 || b(1) == 0xA0) ? 2 : 0;
    case 0xE1:
      return (b(1) == 0x9A && b(2) == 0x80) ? 3 : 0;
    case 0xE2:
      if (b(1) == 0x80 && ((b(2) >= 0x80 && b(2) <= 0x8A) || b(2) == 0xA8 || b(2) == 0xA9 ||
                           b(2) == 0xAF)) {
        return 3;
      }
      if (b(1) == 0x81 && b(2) == 0x9F) return 3;
      return 0;
    case 0xE3:
      return (b(1) == 0x80 && b(2) == 0x80) ? 3 : 0;
    default:
      return 0;
  }
}

}  // namespace detail

/// Splits on runs of Unicode whitespace. Throws InputError("no tokens") when
/// the text contains no token.
inline TokenSequence split_tokens(std::string_view text, std::string source_id = {}) {
  TokenSequence seq{{}, std::move(source_id)};
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    const std::size_t ws = detail::whitespace_len(text, i);
    if (ws > 0) {
      if (start != std::string_view::npos) {
        seq.tokens.emplace_back(text.substr(start, i - start));
        start = std::string_view::npos;
      }
      i += ws;
    } else {
      if (start == std::string_view::npos) start = i;
      ++i;
    }
  }
  if (start != std::string_view::npos) seq.tokens.emplace_back(text.substr(start));
  if (seq.tokens.empty()) throw InputError("no tokens");
  return seq;
}

inline std::string canonicalize(std::string_view text) { return split_tokens(text).canonical(); }

/// First min(count, k) tokens joined by single spaces.
inline std::string extract_prefix(std::string_view text, std::size_t count) {
  if (count == 0) throw InputError("prefix count must be >= 1");
  const auto seq = split_tokens(text);
  const auto n = std::min(count, seq.size());
  return TokenSequence::join(seq.tokens.begin(), seq.tokens.begin() + static_cast<std::ptrdiff_t>(n));
}

inline std::string truncate_to_length(std::string_view text, std::size_t target) {
  if (target == 0) throw InputError("truncation target must be >= 1");
  return extract_prefix(text, target);
}

// ---------------------------------------------------------------------------
// Line-delimited JSON records

/// Parses one record. `line_no` is 1-based and used for the fallback id and
/// for error messages.
inline Passage parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw CorpusError("record is not a JSON object", line_no);

  const auto string_field = [&](const char* key, bool required) -> std::optional<std::string> {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw CorpusError(std::string("missing \"") + key + "\" field", line_no);
      return std::nullopt;
    }
    if (!it->is_string()) throw CorpusError(std::string("\"") + key + "\" must be a string", line_no);
    return it->get<std::string>();
  };

  Passage p;
  p.text = *string_field("text", true);
  try {
    (void)split_tokens(p.text);
  } catch (const InputError&) {
    throw CorpusError("\"text\" is empty after trimming", line_no);
  }
  const auto label_str = *string_field("label", true);
  const auto label = parse_label(label_str);
  if (!label) throw CorpusError("\"label\" must be \"human\" or \"llm\", got \"" + label_str + "\"", line_no);
  p.label = *label;
  p.id = string_field("id", false).value_or(std::to_string(line_no));
  p.source_model = string_field("source_model", false).value_or("");
  p.dataset = string_field("dataset", false).value_or("");
  return p;
}

/// Canonical single-line form: keys sorted, empty optional fields omitted.
inline std::string serialize_record(const Passage& p) {
  nlohmann::json j;
  j["id"] = p.id;
  j["text"] = p.text;
  j["label"] = std::string(to_string(p.label));
  if (!p.source_model.empty()) j["source_model"] = p.source_model;
  if (!p.dataset.empty()) j["dataset"] = p.dataset;
  return j.dump();
}

inline Corpus parse_corpus(std::istream& in, std::string name) {
  Corpus corpus{std::move(name), {}};
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto p = parse_record(line, line_no);
    if (!ids.insert(p.id).second) throw CorpusError("duplicate id \"" + p.id + "\"", line_no);
    corpus.passages.push_back(std::move(p));
  }
  if (corpus.passages.empty()) throw CorpusError("empty corpus");
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file: " + path.string());
  return parse_corpus(in, path.stem().string());
}

inline std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.passages) {
    out += serialize_record(p);
    out.push_back('\n');
  }
  return out;
}

/// Converts the paired layout {"original": [...], "sampled": [...]} used by
/// public Fast-DetectGPT data releases. Originals become human passages with
/// ids "h<i>", samples become llm passages with ids "m<i>".
inline Corpus convert_paired(const nlohmann::json& doc, const std::string& source_model,
                             const std::string& dataset, std::string name = "paired") {
  if (!doc.is_object()) throw CorpusError("paired document must be a JSON object");
  Corpus corpus{std::move(name), {}};
  const auto take = [&](const char* key, Label label, const char* prefix) {
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) {
      throw CorpusError(std::string("paired document lacks array \"") + key + "\"");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& v = (*it)[i];
      if (!v.is_string()) throw CorpusError(std::string(key) + "[" + std::to_string(i) + "] is not a string");
      const auto text = v.get<std::string>();
      try {
        (void)split_tokens(text);
      } catch (const InputError&) {
        continue;  // blank entries carry no passage
      }
      corpus.passages.push_back(Passage{prefix + std::to_string(i), text, label,
                                        label == Label::llm ? source_model : std::string("human"),
                                        dataset});
    }
  };
  take("original", Label::human, "h");
  take("sampled", Label::llm, "m");
  if (corpus.passages.empty()) throw CorpusError("empty corpus");
  return corpus;
}

}  // namespace tocsin
