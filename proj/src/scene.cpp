#include "disambig/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "disambig/text.hpp"

namespace disambig {

bool FeatureDef::has_value(const std::string& value) const {
  return std::find(values.begin(), values.end(), value) != values.end();
}

std::vector<std::string> FeatureDef::forms_of(const std::string& value) const {
  std::vector<std::string> forms{value};
  if (auto it = surface_forms.find(value); it != surface_forms.end()) {
    forms.insert(forms.end(), it->second.begin(), it->second.end());
  }
  return forms;
}

const std::string* ObjectInstance::value_of(const std::string& feature) const {
  auto it = assignments.find(feature);
  return it == assignments.end() ? nullptr : &it->second;
}

bool Inquiry::matches(const ObjectInstance& object) const {
  switch (kind) {
    case PredicateKind::Class:
      return object.class_name == value;
    case PredicateKind::Tag:
      return object.tags.count(value) > 0;
  }
  return false;
}

const ObjectInstance* Scene::find_object(const ObjectId& id) const {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const ObjectInstance& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

const FeatureDef* Scene::find_feature(const std::string& name) const {
  auto it = std::find_if(features.begin(), features.end(),
                         [&](const FeatureDef& f) { return f.name == name; });
  return it == features.end() ? nullptr : &*it;
}

const ObjectInstance& Scene::object(const ObjectId& id) const {
  if (const auto* o = find_object(id)) return *o;
  throw UnknownObject(id);
}

const Scene* SceneCorpus::find_scene(const std::string& id) const {
  for (const auto& s : scenes) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::DanglingReference: return "dangling-reference";
    case ViolationKind::SupportCycle: return "support-cycle";
    case ViolationKind::EmptyInquiry: return "empty-inquiry";
    case ViolationKind::InvalidFeature: return "invalid-feature";
    case ViolationKind::InvalidPosition: return "invalid-position";
    case ViolationKind::EmptyDescription: return "empty-description";
    case ViolationKind::NoObjects: return "no-objects";
    case ViolationKind::DescriptionLeak: return "description-leak";
  }
  return "unknown";
}

namespace {

// Returns one object id on a cycle of the support graph, if any.
std::optional<ObjectId> find_support_cycle(const Scene& scene) {
  std::map<ObjectId, std::vector<ObjectId>> up;
  for (const auto& rel : scene.supports) up[rel.below].push_back(rel.above);

  enum class Mark { None, Active, Done };
  std::map<ObjectId, Mark> mark;
  std::optional<ObjectId> hit;
  std::function<void(const ObjectId&)> visit = [&](const ObjectId& id) {
    if (hit) return;
    mark[id] = Mark::Active;
    for (const auto& next : up[id]) {
      const Mark m = mark[next];
      if (m == Mark::Active) {
        hit = next;
        return;
      }
      if (m == Mark::None) visit(next);
      if (hit) return;
    }
    mark[id] = Mark::Done;
  };
  for (const auto& [id, _] : up) {
    if (mark[id] == Mark::None) visit(id);
    if (hit) break;
  }
  return hit;
}

void check_description_leaks(const Scene& scene, std::vector<Violation>& out) {
  std::set<std::string> mentioned_vocab;
  for (const auto& f : scene.features) {
    if (!f.mentioned) continue;
    mentioned_vocab.insert(text::normalize(f.name));
    for (const auto& v : f.values) {
      for (const auto& form : f.forms_of(v)) mentioned_vocab.insert(text::normalize(form));
    }
  }
  const std::string desc = text::normalize(scene.description);
  for (const auto& f : scene.features) {
    if (f.mentioned) continue;
    std::vector<std::string> vocab{f.name};
    for (const auto& v : f.values) {
      for (const auto& form : f.forms_of(v)) vocab.push_back(form);
    }
    for (const auto& word : vocab) {
      const std::string norm = text::normalize(word);
      if (norm.empty() || mentioned_vocab.count(norm)) continue;
      if (text::contains_phrase(desc, norm)) {
        out.push_back({ViolationKind::DescriptionLeak,
                       "unmentioned feature '" + f.name + "' vocabulary '" + word +
                           "' appears in the description"});
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate_scene(const Scene& scene) {
  std::vector<Violation> out;
  if (text::trim(scene.description).empty()) {
    out.push_back({ViolationKind::EmptyDescription, "scene description is empty"});
  }
  if (scene.objects.empty()) {
    out.push_back({ViolationKind::NoObjects, "scene has no objects"});
  }

  std::set<std::string> feature_names;
  for (const auto& f : scene.features) {
    if (!feature_names.insert(f.name).second) {
      out.push_back({ViolationKind::DuplicateId, "duplicate feature '" + f.name + "'"});
    }
    if (f.values.empty()) {
      out.push_back({ViolationKind::InvalidFeature, "feature '" + f.name + "' has no values"});
    }
    std::set<std::string> seen;
    for (const auto& v : f.values) {
      if (!seen.insert(v).second) {
        out.push_back({ViolationKind::InvalidFeature,
                       "feature '" + f.name + "' repeats value '" + v + "'"});
      }
    }
    for (const auto& [value, forms] : f.surface_forms) {
      if (!f.has_value(value)) {
        out.push_back({ViolationKind::DanglingReference,
                       "surface forms of '" + f.name + "' reference unknown value '" + value + "'"});
      }
      for (const auto& form : forms) {
        if (text::trim(form).empty()) {
          out.push_back({ViolationKind::InvalidFeature,
                         "feature '" + f.name + "' has an empty surface form for '" + value + "'"});
        }
      }
    }
  }

  std::set<ObjectId> ids;
  for (const auto& o : scene.objects) {
    if (o.id.empty()) {
      out.push_back({ViolationKind::InvalidFeature, "object with empty id"});
    } else if (!ids.insert(o.id).second) {
      out.push_back({ViolationKind::DuplicateId, "duplicate object id '" + o.id + "'"});
    }
    for (const auto& [feature, value] : o.assignments) {
      const FeatureDef* def = scene.find_feature(feature);
      if (!def) {
        out.push_back({ViolationKind::DanglingReference,
                       "object '" + o.id + "' assigns undeclared feature '" + feature + "'"});
      } else if (!def->has_value(value)) {
        out.push_back({ViolationKind::InvalidFeature,
                       "object '" + o.id + "' assigns unknown value '" + value + "' of '" +
                           feature + "'"});
      }
    }
    if (o.position && o.position->layer < 0) {
      out.push_back({ViolationKind::InvalidPosition, "object '" + o.id + "' has negative layer"});
    }
  }

  for (const auto& rel : scene.supports) {
    for (const auto* end : {&rel.above, &rel.below}) {
      if (!ids.count(*end)) {
        out.push_back({ViolationKind::DanglingReference,
                       "support relation references unknown object '" + *end + "'"});
      }
    }
  }
  if (auto cyc = find_support_cycle(scene)) {
    out.push_back({ViolationKind::SupportCycle, "support cycle through '" + *cyc + "'"});
  }

  for (const auto& inq : scene.inquiries) {
    const bool any = std::any_of(scene.objects.begin(), scene.objects.end(),
                                 [&](const ObjectInstance& o) { return inq.matches(o); });
    if (!any) {
      out.push_back({ViolationKind::EmptyInquiry, "inquiry '" + inq.text + "' matches no object"});
    }
  }

  check_description_leaks(scene, out);
  return out;
}

CandidateSet candidates_for_inquiry(const Scene& scene, const Inquiry& inquiry) {
  if (std::find(scene.inquiries.begin(), scene.inquiries.end(), inquiry) ==
      scene.inquiries.end()) {
    throw UnknownInquiry(inquiry.text);
  }
  CandidateSet out;
  for (const auto& o : scene.objects) {
    if (inquiry.matches(o)) out.insert(o.id);
  }
  return out;
}

std::vector<ObjectId> objects_above(const Scene& scene, const ObjectId& id) {
  std::vector<ObjectId> out;
  for (const auto& rel : scene.supports) {
    if (rel.below == id) out.push_back(rel.above);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ObjectId> removal_order(const Scene& scene, const ObjectId& target) {
  if (!scene.find_object(target)) throw UnknownObject(target);

  // Upward closure of the target.
  std::set<ObjectId> closure;
  std::vector<ObjectId> stack{target};
  while (!stack.empty()) {
    ObjectId cur = stack.back();
    stack.pop_back();
    for (const auto& a : objects_above(scene, cur)) {
      if (closure.insert(a).second) stack.push_back(a);
    }
  }

  // Kahn's algorithm restricted to the closure: an object may be removed once
  // nothing in the closure rests on it. Ties resolve lexicographically.
  std::map<ObjectId, int> carried;  // number of closure objects resting on it
  for (const auto& id : closure) carried[id] = 0;
  for (const auto& rel : scene.supports) {
    if (closure.count(rel.above) && closure.count(rel.below)) ++carried[rel.below];
  }
  std::priority_queue<ObjectId, std::vector<ObjectId>, std::greater<>> ready;
  for (const auto& [id, n] : carried) {
    if (n == 0) ready.push(id);
  }
  std::vector<ObjectId> order;
  while (!ready.empty()) {
    ObjectId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& rel : scene.supports) {
      if (rel.above == id && closure.count(rel.below) && --carried[rel.below] == 0) {
        ready.push(rel.below);
      }
    }
  }
  return order;
}

bool feature_assigned_on(const Scene& scene, const CandidateSet& candidates,
                         const std::string& feature) {
  return std::all_of(candidates.begin(), candidates.end(), [&](const ObjectId& id) {
    return scene.object(id).value_of(feature) != nullptr;
  });
}

std::vector<Block> partition_by_feature(const Scene& scene, const CandidateSet& candidates,
                                        const std::string& feature) {
  const FeatureDef* def = scene.find_feature(feature);
  if (!def) throw std::invalid_argument("undeclared feature '" + feature + "'");
  std::map<std::string, std::vector<ObjectId>> by_value;
  for (const auto& id : candidates) {
    const std::string* v = scene.object(id).value_of(feature);
    if (!v) throw UnusableFeature(feature, id);
    by_value[*v].push_back(id);
  }
  std::vector<Block> blocks;
  for (const auto& value : def->values) {
    auto it = by_value.find(value);
    if (it != by_value.end()) blocks.push_back({value, it->second});
  }
  return blocks;
}

const std::vector<std::string>& grid_cell_labels() {
  static const std::vector<std::string> labels{
      "top left",    "top middle",    "top right",
      "middle left", "center",        "middle right",
      "bottom left", "bottom middle", "bottom right"};
  return labels;
}

std::optional<std::string> grid_cell(const Scene& scene, const ObjectId& id) {
  const ObjectInstance& obj = scene.object(id);
  if (!obj.position) return std::nullopt;
  double min_x = obj.position->x, max_x = min_x;
  double min_y = obj.position->y, max_y = min_y;
  for (const auto& o : scene.objects) {
    if (!o.position) continue;
    min_x = std::min(min_x, o.position->x);
    max_x = std::max(max_x, o.position->x);
    min_y = std::min(min_y, o.position->y);
    max_y = std::max(max_y, o.position->y);
  }
  auto bin = [](double v, double lo, double hi) {
    const double width = hi - lo;
    if (width <= 0.0) return 1;  // degenerate extent: everything sits in the middle band
    const int b = static_cast<int>(std::floor((v - lo) / (width / 3.0)));
    return std::clamp(b, 0, 2);
  };
  const int col = bin(obj.position->x, min_x, max_x);
  const int row = 2 - bin(obj.position->y, min_y, max_y);
  return grid_cell_labels()[static_cast<std::size_t>(row * 3 + col)];
}

}  // namespace disambig
