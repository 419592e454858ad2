#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace disambig {

struct ChatMessage {
  std::string role;  // system, user or assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct FewShotExample {
  std::string scene_text;
  std::string inquiry_text;
  std::string response_text;
};

struct PromptTemplate {
  std::string system_preamble;
  std::vector<FewShotExample> shots;
  std::string output_contract;
};

// Directory holding the bundled data (corpus, prompts, mock scripts). Uses
// DISAMBIG_DATA_DIR from the environment when set.
std::filesystem::path default_data_dir();

// Reads zero_shot_preamble.txt, output_contract.txt and, when `few_shot`,
// every shots/<name>.{scene,inquiry,response}.txt triple in name order.
PromptTemplate load_prompt_template(const std::filesystem::path& prompt_dir, bool few_shot);

std::string render_user_turn(const std::string& scene_description, const std::string& inquiry);

// system, then (user, assistant) per shot, then the final user turn.
// Throws std::invalid_argument on an empty description.
std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl,
                                       const std::string& scene_description,
                                       const std::string& inquiry);

}  // namespace disambig
