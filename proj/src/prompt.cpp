#include "disambig/prompt.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "disambig/text.hpp"

#ifndef DISAMBIG_DEFAULT_DATA_DIR
#define DISAMBIG_DEFAULT_DATA_DIR "data"
#endif

namespace disambig {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_final_newline(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DISAMBIG_DATA_DIR"); env && *env) return env;
  return DISAMBIG_DEFAULT_DATA_DIR;
}

PromptTemplate load_prompt_template(const std::filesystem::path& prompt_dir, bool few_shot) {
  PromptTemplate t;
  t.system_preamble = strip_final_newline(read_file(prompt_dir / "zero_shot_preamble.txt"));
  t.output_contract = strip_final_newline(read_file(prompt_dir / "output_contract.txt"));
  if (t.system_preamble.empty()) throw std::runtime_error("empty prompt preamble");
  if (!few_shot) return t;

  const auto shot_dir = prompt_dir / "shots";
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(shot_dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = ".response.txt";
    if (file.size() > suffix.size() && file.ends_with(suffix)) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    FewShotExample shot;
    shot.scene_text = text::trim(read_file(shot_dir / (name + ".scene.txt")));
    shot.inquiry_text = text::trim(read_file(shot_dir / (name + ".inquiry.txt")));
    shot.response_text = strip_final_newline(read_file(shot_dir / (name + ".response.txt")));
    t.shots.push_back(std::move(shot));
  }
  return t;
}

std::string render_user_turn(const std::string& scene_description, const std::string& inquiry) {
  return "Scene: \"" + scene_description + "\"\nInquiry: \"" + inquiry + "\"";
}

std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl,
                                       const std::string& scene_description,
                                       const std::string& inquiry) {
  if (text::trim(scene_description).empty()) {
    throw std::invalid_argument("scene description is empty");
  }
  std::vector<ChatMessage> messages;
  messages.push_back({"system", tmpl.system_preamble + "\n\n" + tmpl.output_contract});
  for (const auto& shot : tmpl.shots) {
    messages.push_back({"user", render_user_turn(shot.scene_text, shot.inquiry_text)});
    messages.push_back({"assistant", shot.response_text});
  }
  messages.push_back({"user", render_user_turn(scene_description, inquiry)});
  return messages;
}

}  // namespace disambig
