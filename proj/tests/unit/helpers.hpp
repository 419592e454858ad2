#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "disambig/corpus.hpp"

namespace testing_support {

inline const disambig::SceneCorpus& bundled_corpus() {
  static const disambig::SceneCorpus corpus = disambig::load_corpus(DISAMBIG_DATA_DIR "/corpus");
  return corpus;
}

inline const disambig::Scene& scene(const std::string& id) {
  const disambig::Scene* s = bundled_corpus().find_scene(id);
  if (!s) throw std::runtime_error("missing scene " + id);
  return *s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) {
  return read_file(std::string(DISAMBIG_FIXTURE_DIR) + "/" + name);
}

}  // namespace testing_support
