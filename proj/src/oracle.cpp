#include "disambig/oracle.hpp"

#include <algorithm>

#include "disambig/planners.hpp"
#include "disambig/text.hpp"

namespace disambig {

UserOracle::UserOracle(const Scene& s, ObjectId target) : scene(&s), hidden_target(std::move(target)) {
  if (!s.find_object(hidden_target)) throw UnknownObject(hidden_target);
}

namespace {

struct Vocabulary {
  std::vector<std::string> own;
  std::vector<std::string> other;
};

void add_unique(std::vector<std::string>& out, const std::string& form) {
  const std::string n = text::normalize(form);
  if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
}

Vocabulary vocabulary(const Scene& scene, const ObjectInstance& object,
                      const std::optional<std::string>& feature) {
  Vocabulary v;
  if (feature && *feature == kGridFeature) {
    const auto cell = grid_cell(scene, object.id);
    if (cell) add_unique(v.own, *cell);
    for (const auto& label : grid_cell_labels()) {
      if (!cell || label != *cell) add_unique(v.other, label);
    }
    return v;
  }
  for (const auto& f : scene.features) {
    if (feature && f.name != *feature) continue;
    const std::string* value = object.value_of(f.name);
    if (!value) continue;
    for (const auto& form : f.forms_of(*value)) add_unique(v.own, form);
    for (const auto& other : f.values) {
      if (other == *value) continue;
      for (const auto& form : f.forms_of(other)) add_unique(v.other, form);
    }
  }
  if (!feature) {
    add_unique(v.own, object.display_name);
    add_unique(v.own, object.class_name);
  }
  std::erase_if(v.other, [&](const std::string& f) {
    return std::find(v.own.begin(), v.own.end(), f) != v.own.end();
  });
  return v;
}

}  // namespace

OptionMatch match_option(const Scene& scene, const ObjectId& object, const std::string& option,
                         const std::optional<std::string>& feature) {
  const ObjectInstance& obj = scene.object(object);
  const Vocabulary v = vocabulary(scene, obj, feature);
  const std::string o = text::normalize(option);

  OptionMatch m;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& form : v.own) {
    for (std::size_t at : text::find_phrase(o, form)) {
      spans.emplace_back(at, at + form.size());
      m.length = std::max(m.length, form.size());
    }
  }
  for (const auto& form : v.other) {
    for (std::size_t at : text::find_phrase(o, form)) {
      const bool inside = std::any_of(spans.begin(), spans.end(), [&](const auto& s) {
        return s.first <= at && at + form.size() <= s.second;
      });
      if (!inside) m.contradicted = true;
    }
  }
  return m;
}

std::vector<std::string> answer_options(const Ask& question) {
  if (!question.options.empty()) return question.options;
  if (question.pointed) return {"yes", "no"};
  return options_from_question(question.question);
}

std::string oracle_answer(const UserOracle& oracle, const Ask& question) {
  if (question.pointed) return *question.pointed == oracle.hidden_target ? "yes" : "no";
  const auto options = answer_options(question);
  std::optional<std::size_t> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const OptionMatch m = match_option(*oracle.scene, oracle.hidden_target, options[i], question.feature);
    if (m.accepted() && m.length > best_len) {
      best = i;
      best_len = m.length;
    }
  }
  return best ? options[*best] : std::string(kNoneOfThose);
}

namespace {

std::string without_article(const std::string& normalized) {
  for (std::string_view a : {"the ", "a ", "an "}) {
    if (normalized.starts_with(a)) return normalized.substr(a.size());
  }
  return normalized;
}

std::optional<ObjectId> lookup_strict(const Scene& scene, const std::string& phrase,
                                      const std::vector<ObjectId>& pool) {
  const std::string trimmed = text::trim(phrase);
  for (const auto& id : pool) {
    if (id == trimmed) return id;
  }
  const std::string n = without_article(text::normalize(phrase));
  std::optional<ObjectId> found;
  for (const auto& id : pool) {
    if (without_article(text::normalize(scene.object(id).display_name)) == n) {
      if (found) return std::nullopt;
      found = id;
    }
  }
  return found;
}

std::vector<ObjectId> all_ids(const Scene& scene) {
  std::vector<ObjectId> ids;
  for (const auto& o : scene.objects) ids.push_back(o.id);
  return ids;
}

}  // namespace

std::optional<ObjectId> resolve_object_strict(const Scene& scene, const std::string& phrase) {
  return lookup_strict(scene, phrase, all_ids(scene));
}

std::optional<ObjectId> resolve_object_phrase(const Scene& scene, const std::string& phrase,
                                              const std::vector<ObjectId>& pool) {
  if (auto id = lookup_strict(scene, phrase, pool)) return id;

  // Rank by how many features the phrase pins down, then by match length.
  std::optional<ObjectId> best;
  std::pair<std::size_t, std::size_t> best_key{0, 0};
  bool tie = false;
  for (const auto& id : pool) {
    const OptionMatch whole = match_option(scene, id, phrase);
    if (!whole.accepted()) continue;
    std::size_t features = 0;
    for (const auto& f : scene.features) {
      if (match_option(scene, id, phrase, f.name).accepted()) ++features;
    }
    const std::pair<std::size_t, std::size_t> key{features, whole.length};
    if (!best || key > best_key) {
      best = id;
      best_key = key;
      tie = false;
    } else if (key == best_key) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

bool free_question_holds(const Scene& scene, const ObjectId& target, const std::string& question) {
  return match_option(scene, target, question).accepted();
}

}  // namespace disambig
