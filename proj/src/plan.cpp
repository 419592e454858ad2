#include "disambig/plan.hpp"

#include <algorithm>
#include <sstream>

#include "disambig/text.hpp"

namespace disambig {

bool operator==(const ActionPlan& a, const ActionPlan& b) {
  return a.target_hypothesis == b.target_hypothesis && a.target_reason == b.target_reason &&
         a.steps == b.steps && a.options == b.options;
}

namespace {

const std::string& scalar_text(const LenientValue& v, const std::string& key) {
  if (!v.is_scalar()) throw PlanError("'" + key + "' must be a scalar");
  return v.text;
}

LenientValue scalar_for(const std::string& text) {
  const bool unsafe = text.find_first_of(",{}[]\n\r\"") != std::string::npos;
  if (!text.empty() && text.front() == '<') {
    // Angle text may hold delimiters as long as they sit inside brackets.
    bool ok = true;
    int depth = 0;
    for (char c : text) {
      if (c == '<') ++depth;
      else if (c == '>') depth = std::max(0, depth - 1);
      else if (depth == 0 && std::string_view(",{}[]\n\r\"").find(c) != std::string_view::npos) ok = false;
    }
    if (ok && text.back() == '>') return LenientValue::scalar(text, TokenStyle::Angle);
  }
  if (unsafe || text.empty() || text.front() == '<') {
    return LenientValue::scalar(text, TokenStyle::Quoted);
  }
  return LenientValue::scalar(text, TokenStyle::Bare);
}

LenientValue angle_wrapped(const std::string& text) {
  if (text.find_first_of("<>") == std::string::npos) {
    return LenientValue::scalar("<" + text + ">", TokenStyle::Angle);
  }
  return LenientValue::scalar(text, TokenStyle::Quoted);
}

LenientEntry entry(const std::string& key, LenientValue value) {
  return LenientEntry{LenientKey{key, TokenStyle::Bare}, std::move(value)};
}

}  // namespace

ActionPlan plan_from_doc(const LenientDoc& doc) {
  if (!doc.is_object()) throw PlanError("action plan must be an object");
  ActionPlan plan;
  bool saw_options = false;
  for (const auto& e : doc.items) {
    if (!e.key) continue;
    const std::string key = text::normalize(e.key->label());
    if (saw_options && key != "options") {
      throw PlanError("'" + e.key->text + "' follows the options list");
    }
    if (key == "target object" || key == "target") {
      plan.target_hypothesis = scalar_text(e.value, key);
    } else if (key == "reason") {
      std::string reason = unwrap_angle(scalar_text(e.value, key));
      if (plan.steps.empty()) {
        plan.target_reason = std::move(reason);
      } else {
        plan.steps.back().reason = std::move(reason);
      }
    } else if (key == "direction" || key == "action") {
      try {
        plan.steps.push_back({parse_action(scalar_text(e.value, key)), {}});
      } catch (const ParseError& err) {
        throw PlanError("bad direction '" + e.value.text + "': " + err.what());
      }
    } else if (key == "options") {
      if (!e.value.is_list()) throw PlanError("'options' must be a list");
      if (plan.steps.empty() || !std::holds_alternative<Ask>(plan.steps.back().action)) {
        throw PlanError("options without a preceding <ask>");
      }
      saw_options = true;
      for (const auto& item : e.value.items) {
        if (!item.key) throw PlanError("option entries need a label");
        if (!item.value.is_object()) {
          throw PlanError("option '" + item.key->label() + "' must hold a plan object");
        }
        const std::string label = item.key->label();
        const bool dup = std::any_of(plan.options.begin(), plan.options.end(),
                                     [&](const PlanOption& o) { return o.label == label; });
        if (dup) throw PlanError("duplicate option label '" + label + "'");
        plan.options.push_back({label, plan_from_doc(item.value)});
      }
      auto& ask = std::get<Ask>(plan.steps.back().action);
      ask.options.clear();
      for (const auto& o : plan.options) ask.options.push_back(o.label);
    }
  }
  return plan;
}

LenientDoc plan_to_doc(const ActionPlan& plan) {
  LenientValue doc = LenientValue::object();
  if (!plan.target_hypothesis.empty()) {
    doc.items.push_back(entry("target object", scalar_for(plan.target_hypothesis)));
  }
  if (!plan.target_reason.empty()) doc.items.push_back(entry("reason", angle_wrapped(plan.target_reason)));
  for (const auto& step : plan.steps) {
    doc.items.push_back(entry("direction", scalar_for(print_action(step.action))));
    if (!step.reason.empty()) doc.items.push_back(entry("reason", angle_wrapped(step.reason)));
  }
  if (!plan.options.empty()) {
    LenientValue list = LenientValue::list();
    for (const auto& o : plan.options) {
      LenientValue key_token = angle_wrapped(o.label);
      list.items.push_back(
          LenientEntry{LenientKey{key_token.text, key_token.style}, plan_to_doc(o.plan)});
    }
    doc.items.push_back(entry("options", std::move(list)));
  }
  return doc;
}

namespace {

TreeNode plan_node(const ActionPlan& plan, std::vector<std::string> moves) {
  if (!plan.options.empty() &&
      (plan.steps.empty() || !std::holds_alternative<Ask>(plan.steps.back().action))) {
    throw PlanError("options without a preceding <ask>");
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const Action& a = plan.steps[i].action;
    if (const auto* ask = std::get_if<Ask>(&a)) {
      if (i + 1 == plan.steps.size() && !plan.options.empty()) {
        std::vector<Branch> branches;
        for (const auto& o : plan.options) {
          branches.push_back({o.label, plan_node(o.plan, moves)});
        }
        return TreeNode::question(ask->question, std::move(branches));
      }
    } else if (const auto* mv = std::get_if<MoveAway>(&a)) {
      moves.push_back(mv->object_phrase);
    } else if (const auto* dl = std::get_if<Deliver>(&a)) {
      if (!plan.options.empty()) throw PlanError("plan delivers before its options");
      return TreeNode::leaf(dl->object_phrase, std::move(moves));
    }
  }
  throw PlanError("branch '" + plan.target_hypothesis + "' has no terminal <deliver>");
}

}  // namespace

DecisionTree plan_to_tree(const ActionPlan& plan) { return DecisionTree{plan_node(plan, {})}; }

std::size_t deliver_count(const ActionPlan& plan) {
  std::size_t n = 0;
  for (const auto& s : plan.steps) {
    if (std::holds_alternative<Deliver>(s.action)) ++n;
  }
  for (const auto& o : plan.options) n += deliver_count(o.plan);
  return n;
}

ExtractedDocuments extract_documents(std::string_view response) {
  const std::string lower = text::to_lower(response);
  const std::string planner_header = "action planner:";
  const std::string tree_header = "decision tree:";
  const std::size_t planner_at = lower.find(planner_header);
  const std::size_t tree_at = lower.find(tree_header);
  if (planner_at == std::string::npos) {
    throw ExtractionError(DocumentBlock::ActionPlanner, "missing 'Action Planner:' header", 0);
  }
  if (tree_at == std::string::npos) {
    throw ExtractionError(DocumentBlock::DecisionTree, "missing 'Decision Tree:' header", 0);
  }

  auto parse_block = [&](DocumentBlock block, std::size_t header_at, std::size_t header_len,
                         std::size_t other_at) {
    const std::size_t begin = header_at + header_len;
    const std::size_t end = other_at > header_at ? other_at : response.size();
    const std::string_view slice = response.substr(begin, end - begin);
    try {
      return parse_lenient_prefix(slice).doc;
    } catch (const ParseError& e) {
      const char* name = block == DocumentBlock::ActionPlanner ? "Action Planner" : "Decision Tree";
      throw ExtractionError(block, std::string(name) + " block: " + e.what(), begin + e.offset());
    }
  };

  ExtractedDocuments out;
  out.planner = parse_block(DocumentBlock::ActionPlanner, planner_at, planner_header.size(), tree_at);
  out.tree = parse_block(DocumentBlock::DecisionTree, tree_at, tree_header.size(), planner_at);
  return out;
}

namespace {

bool is_json_literal(const LenientValue& v) {
  if (v.style != TokenStyle::Bare) return false;
  if (v.text == "true" || v.text == "false" || v.text == "null") return true;
  std::istringstream in(v.text);
  double d = 0;
  in >> d;
  return !in.fail() && in.eof();
}

std::string leaf_text(const LenientValue& v) {
  if (is_json_literal(v)) throw TreeDocError("non-string leaf '" + v.text + "'");
  return v.style == TokenStyle::Angle ? unwrap_angle(v.text) : v.text;
}

bool has_exact_keys(const LenientValue& obj, std::initializer_list<std::string_view> keys) {
  if (obj.items.size() != keys.size()) return false;
  return std::all_of(keys.begin(), keys.end(), [&](std::string_view k) { return obj.first(k); });
}

TreeNode node_from(const LenientValue& v);

Branch branch_from(const LenientEntry& item) {
  if (item.key) return {item.key->label(), node_from(item.value)};
  const LenientValue& v = item.value;
  if (v.is_scalar()) {
    std::string t = leaf_text(v);
    return {t, TreeNode::leaf(t)};
  }
  if (v.is_list()) throw TreeDocError("nested list without a question key");
  if (has_exact_keys(v, {"label", "node"})) {
    const LenientValue* label = v.first("label");
    if (!label->is_scalar()) throw TreeDocError("branch label must be a string");
    return {label->text, node_from(*v.first("node"))};
  }
  TreeNode child = node_from(v);
  std::string label = child.is_question() ? child.text
                      : child.is_leaf()   ? child.text
                                          : text::join(child.covered, " or ");
  return {std::move(label), std::move(child)};
}

TreeNode node_from(const LenientValue& v) {
  if (v.is_scalar()) return TreeNode::leaf(leaf_text(v));
  if (v.is_list()) throw TreeDocError("list node without a question key");
  if (has_exact_keys(v, {"kind", "objects"})) {
    const LenientValue* kind = v.first("kind");
    const LenientValue* objects = v.first("objects");
    if (!kind->is_scalar() || kind->text != "ambiguous" || !objects->is_list()) {
      throw TreeDocError("malformed ambiguous node");
    }
    std::vector<ObjectId> covered;
    for (const auto& item : objects->items) {
      if (item.key || !item.value.is_scalar()) throw TreeDocError("ambiguous objects must be strings");
      covered.push_back(leaf_text(item.value));
    }
    return TreeNode::ambiguous(std::move(covered));
  }
  if (v.items.size() != 1) {
    throw TreeDocError("map node with " + std::to_string(v.items.size()) + " keys (expected one)");
  }
  const LenientEntry& only = v.items.front();
  const std::string question = only.key->label();
  if (only.value.is_scalar()) return TreeNode::leaf(leaf_text(only.value));
  if (!only.value.is_list()) throw TreeDocError("question '" + question + "' must map to a list");
  if (only.value.items.empty()) throw TreeDocError("question '" + question + "' has an empty list");
  std::vector<Branch> branches;
  for (const auto& item : only.value.items) branches.push_back(branch_from(item));
  return TreeNode::question(question, std::move(branches));
}

LenientValue quoted(const std::string& s) { return LenientValue::scalar(s, TokenStyle::Quoted); }

LenientEntry quoted_entry(const std::string& key, LenientValue value) {
  return LenientEntry{LenientKey{key, TokenStyle::Quoted}, std::move(value)};
}

LenientValue node_doc(const TreeNode& node);

LenientValue branch_doc(const Branch& b) {
  const TreeNode& n = b.node;
  if (n.is_leaf() && n.text == b.label) return quoted(b.label);
  if (n.is_question() && n.text == b.label) return node_doc(n);
  return LenientValue::object({quoted_entry("label", quoted(b.label)), quoted_entry("node", node_doc(n))});
}

LenientValue node_doc(const TreeNode& node) {
  switch (node.kind) {
    case NodeKind::Leaf:
      return LenientValue::object({quoted_entry("object", quoted(node.text))});
    case NodeKind::Ambiguous: {
      LenientValue objects = LenientValue::list();
      for (const auto& id : node.covered) objects.items.push_back({std::nullopt, quoted(id)});
      return LenientValue::object({quoted_entry("kind", quoted("ambiguous")),
                                   quoted_entry("objects", std::move(objects))});
    }
    case NodeKind::Question: {
      LenientValue list = LenientValue::list();
      for (const auto& b : node.branches) list.items.push_back({std::nullopt, branch_doc(b)});
      return LenientValue::object({quoted_entry(node.text, std::move(list))});
    }
  }
  return {};
}

}  // namespace

DecisionTree normalize_nested_tree(const LenientDoc& doc) {
  if (!doc.is_object()) throw TreeDocError("tree document must be an object");
  return DecisionTree{node_from(doc)};
}

LenientDoc tree_to_nested_doc(const DecisionTree& tree) { return node_doc(tree.root); }

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void dot_node(const TreeNode& n, int& counter, std::ostringstream& out) {
  const int id = counter;
  std::string label;
  std::string shape = "box";
  switch (n.kind) {
    case NodeKind::Question: label = n.text; shape = "ellipse"; break;
    case NodeKind::Leaf: label = n.text; break;
    case NodeKind::Ambiguous: label = "ambiguous: " + text::join(n.covered, ", "); shape = "octagon"; break;
  }
  out << "  n" << id << " [label=\"" << dot_escape(label) << "\", shape=" << shape << "];\n";
  for (const auto& b : n.branches) {
    const int child = ++counter;
    dot_node(b.node, counter, out);
    out << "  n" << id << " -> n" << child << " [label=\"" << dot_escape(b.label) << "\"];\n";
  }
}

}  // namespace

std::string tree_to_dot(const DecisionTree& tree) {
  std::ostringstream out;
  out << "digraph decision_tree {\n";
  int counter = 0;
  dot_node(tree.root, counter, out);
  out << "}\n";
  return out.str();
}

}  // namespace disambig
