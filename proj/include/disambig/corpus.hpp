#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "disambig/scene.hpp"

namespace disambig {

inline constexpr const char* kCorpusVersion = "1";

// Schema or consistency failure while loading a corpus. `scene_id` is empty
// for manifest-level problems; `field_path` is a JSON-pointer-like location.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string scene_id, std::string field_path, const std::string& what)
      : std::runtime_error(format(scene_id, field_path, what)),
        scene_id_(std::move(scene_id)),
        field_path_(std::move(field_path)) {}

  const std::string& scene_id() const noexcept { return scene_id_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  static std::string format(const std::string& scene, const std::string& path,
                            const std::string& what) {
    std::string out = what;
    if (!scene.empty()) out = "scene '" + scene + "': " + out;
    if (!path.empty()) out += " (at " + path + ")";
    return out;
  }

  std::string scene_id_;
  std::string field_path_;
};

Scene scene_from_json(const nlohmann::json& doc);
nlohmann::ordered_json scene_to_json(const Scene& scene);

// `path` may be a corpus directory (containing corpus.json), a corpus.json
// manifest, or a single scene document. Every scene is validated.
SceneCorpus load_corpus(const std::filesystem::path& path);

// Writes one file per scene plus corpus.json into `dir`.
void save_corpus(const SceneCorpus& corpus, const std::filesystem::path& dir);

}  // namespace disambig
