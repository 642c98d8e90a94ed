#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tocsin/corpus.hpp"
#include "tocsin/toy_backend.hpp"

namespace tocsin::fixtures {

inline std::filesystem::path data_dir() { return TOCSIN_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return TOCSIN_TEST_DATA_DIR; }

inline std::vector<std::string> toy_model_lines() {
  std::vector<std::string> lines;
  std::ifstream in(data_dir() / "toy" / "model.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline const ToyBackend& bundled_toy() {
  static const ToyBackend backend(toy_model_lines());
  return backend;
}

inline Corpus bundled_corpus() { return load_corpus(data_dir() / "toy" / "corpus.jsonl"); }

}  // namespace tocsin::fixtures
