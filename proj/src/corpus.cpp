#include "disambig/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace disambig {

using nlohmann::json;

namespace {

class SceneReader {
 public:
  explicit SceneReader(std::string scene_id) : scene_id_(std::move(scene_id)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw CorpusError(scene_id_, path, what);
  }

  void expect_keys(const json& obj, const std::string& path, std::set<std::string> required,
                   std::set<std::string> optional = {}) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& key : required) {
      if (!obj.contains(key)) fail(path + "/" + key, "missing field");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!required.count(it.key()) && !optional.count(it.key())) {
        fail(path + "/" + it.key(), "unexpected field");
      }
    }
  }

  std::string str(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  const json& arr(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  double num(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

 private:
  std::string scene_id_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::filesystem::path& path, const std::string& scene_hint) {
  const std::string content = read_file(path);
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw CorpusError(scene_hint, "", "no scenes: '" + path.string() + "' is empty");
  }
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    throw CorpusError(scene_hint, "", "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace

Scene scene_from_json(const json& doc) {
  std::string id;
  if (doc.is_object() && doc.contains("id") && doc["id"].is_string()) {
    id = doc["id"].get<std::string>();
  }
  SceneReader r(id);
  r.expect_keys(doc, "", {"id", "description", "features", "objects", "supports", "inquiries"});

  Scene scene;
  scene.id = r.str(doc["id"], "/id");
  if (scene.id.empty()) r.fail("/id", "empty scene id");
  scene.description = r.str(doc["description"], "/description");

  const json& features = r.arr(doc["features"], "/features");
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string p = "/features/" + std::to_string(i);
    const json& f = features[i];
    r.expect_keys(f, p, {"name", "values", "mentioned", "surface_forms"});
    FeatureDef def;
    def.name = r.str(f["name"], p + "/name");
    const json& values = r.arr(f["values"], p + "/values");
    for (std::size_t j = 0; j < values.size(); ++j) {
      def.values.push_back(r.str(values[j], p + "/values/" + std::to_string(j)));
    }
    if (!f["mentioned"].is_boolean()) r.fail(p + "/mentioned", "expected a boolean");
    def.mentioned = f["mentioned"].get<bool>();
    if (!f["surface_forms"].is_object()) r.fail(p + "/surface_forms", "expected an object");
    for (auto it = f["surface_forms"].begin(); it != f["surface_forms"].end(); ++it) {
      const std::string sp = p + "/surface_forms/" + it.key();
      auto& forms = def.surface_forms[it.key()];
      const json& list = r.arr(it.value(), sp);
      for (std::size_t j = 0; j < list.size(); ++j) {
        forms.push_back(r.str(list[j], sp + "/" + std::to_string(j)));
      }
    }
    scene.features.push_back(std::move(def));
  }

  const json& objects = r.arr(doc["objects"], "/objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string p = "/objects/" + std::to_string(i);
    const json& o = objects[i];
    r.expect_keys(o, p, {"id", "class", "display_name", "assignments", "tags"}, {"position"});
    ObjectInstance obj;
    obj.id = r.str(o["id"], p + "/id");
    obj.class_name = r.str(o["class"], p + "/class");
    obj.display_name = r.str(o["display_name"], p + "/display_name");
    if (!o["assignments"].is_object()) r.fail(p + "/assignments", "expected an object");
    for (auto it = o["assignments"].begin(); it != o["assignments"].end(); ++it) {
      obj.assignments[it.key()] = r.str(it.value(), p + "/assignments/" + it.key());
    }
    const json& tags = r.arr(o["tags"], p + "/tags");
    for (std::size_t j = 0; j < tags.size(); ++j) {
      obj.tags.insert(r.str(tags[j], p + "/tags/" + std::to_string(j)));
    }
    if (o.contains("position")) {
      const json& pos = o["position"];
      r.expect_keys(pos, p + "/position", {"x", "y"}, {"layer"});
      Position at;
      at.x = r.num(pos["x"], p + "/position/x");
      at.y = r.num(pos["y"], p + "/position/y");
      if (pos.contains("layer")) {
        if (!pos["layer"].is_number_integer()) r.fail(p + "/position/layer", "expected an integer");
        at.layer = pos["layer"].get<int>();
      }
      obj.position = at;
    }
    scene.objects.push_back(std::move(obj));
  }

  const json& supports = r.arr(doc["supports"], "/supports");
  for (std::size_t i = 0; i < supports.size(); ++i) {
    const std::string p = "/supports/" + std::to_string(i);
    r.expect_keys(supports[i], p, {"above", "below"});
    scene.supports.push_back(
        {r.str(supports[i]["above"], p + "/above"), r.str(supports[i]["below"], p + "/below")});
  }

  const json& inquiries = r.arr(doc["inquiries"], "/inquiries");
  for (std::size_t i = 0; i < inquiries.size(); ++i) {
    const std::string p = "/inquiries/" + std::to_string(i);
    const json& q = inquiries[i];
    r.expect_keys(q, p, {"text", "predicate"});
    Inquiry inq;
    inq.text = r.str(q["text"], p + "/text");
    r.expect_keys(q["predicate"], p + "/predicate", {"kind", "value"});
    const std::string kind = r.str(q["predicate"]["kind"], p + "/predicate/kind");
    if (kind == "class") {
      inq.kind = PredicateKind::Class;
    } else if (kind == "tag") {
      inq.kind = PredicateKind::Tag;
    } else {
      r.fail(p + "/predicate/kind", "expected \"class\" or \"tag\"");
    }
    inq.value = r.str(q["predicate"]["value"], p + "/predicate/value");
    scene.inquiries.push_back(std::move(inq));
  }
  return scene;
}

nlohmann::ordered_json scene_to_json(const Scene& scene) {
  nlohmann::ordered_json doc;
  doc["id"] = scene.id;
  doc["description"] = scene.description;
  doc["features"] = nlohmann::ordered_json::array();
  for (const auto& f : scene.features) {
    nlohmann::ordered_json jf;
    jf["name"] = f.name;
    jf["values"] = f.values;
    jf["mentioned"] = f.mentioned;
    jf["surface_forms"] = nlohmann::ordered_json::object();
    for (const auto& [value, forms] : f.surface_forms) jf["surface_forms"][value] = forms;
    doc["features"].push_back(std::move(jf));
  }
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : scene.objects) {
    nlohmann::ordered_json jo;
    jo["id"] = o.id;
    jo["class"] = o.class_name;
    jo["display_name"] = o.display_name;
    jo["assignments"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : o.assignments) jo["assignments"][k] = v;
    jo["tags"] = std::vector<std::string>(o.tags.begin(), o.tags.end());
    if (o.position) {
      jo["position"] = {{"x", o.position->x}, {"y", o.position->y}, {"layer", o.position->layer}};
    }
    doc["objects"].push_back(std::move(jo));
  }
  doc["supports"] = nlohmann::ordered_json::array();
  for (const auto& rel : scene.supports) {
    doc["supports"].push_back({{"above", rel.above}, {"below", rel.below}});
  }
  doc["inquiries"] = nlohmann::ordered_json::array();
  for (const auto& q : scene.inquiries) {
    doc["inquiries"].push_back(
        {{"text", q.text},
         {"predicate",
          {{"kind", q.kind == PredicateKind::Class ? "class" : "tag"}, {"value", q.value}}}});
  }
  return doc;
}

SceneCorpus load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path manifest_path = path;
  if (fs::is_directory(path)) manifest_path = path / "corpus.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error("cannot read '" + manifest_path.string() + "'");
  }

  const json top = parse_json_file(manifest_path, "");
  SceneCorpus corpus;
  std::vector<json> docs;
  if (top.is_object() && top.contains("scenes")) {
    SceneReader r("");
    r.expect_keys(top, "", {"version", "scenes"});
    corpus.version = r.str(top["version"], "/version");
    if (corpus.version != kCorpusVersion) {
      throw CorpusError("", "/version",
                        "unsupported corpus version '" + corpus.version + "' (expected '" +
                            kCorpusVersion + "')");
    }
    const json& files = r.arr(top["scenes"], "/scenes");
    if (files.empty()) throw CorpusError("", "/scenes", "no scenes");
    for (std::size_t i = 0; i < files.size(); ++i) {
      const std::string name = r.str(files[i], "/scenes/" + std::to_string(i));
      docs.push_back(parse_json_file(manifest_path.parent_path() / name, ""));
    }
  } else {
    docs.push_back(top);
  }

  std::set<std::string> ids;
  for (const auto& doc : docs) {
    Scene scene = scene_from_json(doc);
    if (!ids.insert(scene.id).second) {
      throw CorpusError(scene.id, "/id", "duplicate scene id '" + scene.id + "'");
    }
    const auto violations = validate_scene(scene);
    if (!violations.empty()) {
      throw CorpusError(scene.id, "", to_string(violations.front().kind) + ": " +
                                          violations.front().message);
    }
    corpus.scenes.push_back(std::move(scene));
  }
  return corpus;
}

void save_corpus(const SceneCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["version"] = corpus.version;
  manifest["scenes"] = nlohmann::ordered_json::array();
  for (const auto& scene : corpus.scenes) {
    const std::string name = scene.id + ".json";
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    out << scene_to_json(scene).dump(2) << '\n';
    manifest["scenes"].push_back(name);
  }
  std::ofstream out(dir / "corpus.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + (dir / "corpus.json").string() + "'");
  out << manifest.dump(2) << '\n';
}

}  // namespace disambig
