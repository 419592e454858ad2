#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace disambig {

using ObjectId = std::string;
using CandidateSet = std::set<ObjectId>;

struct FeatureDef {
  std::string name;
  std::vector<std::string> values;
  // False for features that never appear in the scene description. Those are
  // hidden from the language model but answerable by the user.
  bool mentioned = true;
  std::map<std::string, std::vector<std::string>> surface_forms;

  bool has_value(const std::string& value) const;
  // Value label plus its authored synonyms.
  std::vector<std::string> forms_of(const std::string& value) const;

  friend bool operator==(const FeatureDef&, const FeatureDef&) = default;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  int layer = 0;  // 0 = resting on the table

  friend bool operator==(const Position&, const Position&) = default;
};

struct ObjectInstance {
  ObjectId id;
  std::string class_name;
  std::string display_name;
  std::map<std::string, std::string> assignments;
  std::set<std::string> tags;
  std::optional<Position> position;

  const std::string* value_of(const std::string& feature) const;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct SupportRelation {
  ObjectId above;
  ObjectId below;

  friend bool operator==(const SupportRelation&, const SupportRelation&) = default;
};

enum class PredicateKind { Class, Tag };

struct Inquiry {
  std::string text;
  PredicateKind kind = PredicateKind::Class;
  std::string value;

  bool matches(const ObjectInstance& object) const;

  friend bool operator==(const Inquiry&, const Inquiry&) = default;
};

struct Scene {
  std::string id;
  std::string description;
  std::vector<FeatureDef> features;
  std::vector<ObjectInstance> objects;
  std::vector<SupportRelation> supports;
  std::vector<Inquiry> inquiries;

  const ObjectInstance* find_object(const ObjectId& id) const;
  const FeatureDef* find_feature(const std::string& name) const;
  const ObjectInstance& object(const ObjectId& id) const;
  bool has_supports() const { return !supports.empty(); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct SceneCorpus {
  std::string version = "1";
  std::vector<Scene> scenes;

  const Scene* find_scene(const std::string& id) const;

  friend bool operator==(const SceneCorpus&, const SceneCorpus&) = default;
};

class UnknownObject : public std::out_of_range {
 public:
  explicit UnknownObject(const ObjectId& id)
      : std::out_of_range("unknown object '" + id + "'"), id_(id) {}
  const ObjectId& id() const noexcept { return id_; }

 private:
  ObjectId id_;
};

class UnknownInquiry : public std::out_of_range {
 public:
  explicit UnknownInquiry(const std::string& text)
      : std::out_of_range("inquiry '" + text + "' does not belong to the scene") {}
};

// Raised by partition_by_feature when a candidate has no value for the feature.
class UnusableFeature : public std::runtime_error {
 public:
  UnusableFeature(const std::string& feature, const ObjectId& object)
      : std::runtime_error("feature '" + feature + "' is not assigned on '" + object + "'"),
        feature_(feature),
        object_(object) {}
  const std::string& feature() const noexcept { return feature_; }
  const ObjectId& object() const noexcept { return object_; }

 private:
  std::string feature_;
  ObjectId object_;
};

enum class ViolationKind {
  DuplicateId,
  DanglingReference,
  SupportCycle,
  EmptyInquiry,
  InvalidFeature,
  InvalidPosition,
  EmptyDescription,
  NoObjects,
  DescriptionLeak,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::string to_string(ViolationKind kind);

std::vector<Violation> validate_scene(const Scene& scene);

CandidateSet candidates_for_inquiry(const Scene& scene, const Inquiry& inquiry);

// Objects resting (transitively) on `target`, topmost first. Removing them in
// this order never lifts an object that still carries another one.
std::vector<ObjectId> removal_order(const Scene& scene, const ObjectId& target);

// Ids of objects directly resting on `id`.
std::vector<ObjectId> objects_above(const Scene& scene, const ObjectId& id);

struct Block {
  std::string value;
  std::vector<ObjectId> members;  // sorted

  friend bool operator==(const Block&, const Block&) = default;
};

// Blocks are listed in the feature's declared value order; empty blocks are
// omitted. Throws UnusableFeature when any candidate lacks an assignment.
std::vector<Block> partition_by_feature(const Scene& scene, const CandidateSet& candidates,
                                        const std::string& feature);

// True when every candidate carries an assignment for `feature`.
bool feature_assigned_on(const Scene& scene, const CandidateSet& candidates,
                         const std::string& feature);

// Planar 3x3 cell of an object ("top left" .. "bottom right"). The table
// extent is the bounding box of every positioned object in the scene, split
// into equal thirds per axis; larger y is further from the viewer ("top").
// Empty when the object has no position.
std::optional<std::string> grid_cell(const Scene& scene, const ObjectId& id);

const std::vector<std::string>& grid_cell_labels();

}  // namespace disambig
