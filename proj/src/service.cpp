#include "disambig/service.hpp"

#include <cstdio>
#include <fstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "disambig/text.hpp"

namespace disambig {

using nlohmann::json;
using nlohmann::ordered_json;

struct Service::Entry {
  std::mutex mutex;
  std::string scene_id;
  std::size_t inquiry_index = 0;
  std::string planner;
  std::string mode;
  std::string role;
  std::unique_ptr<Session> session;
  std::unique_ptr<QuestionerGame> game;
  std::vector<ordered_json> replies;  // response body per completed turn
  Clock::time_point last_used;
  std::size_t completions_seen = 0;
};

ApiResponse api_error(int status, const std::string& code, const std::string& message,
                      const ordered_json& detail) {
  return {status, ordered_json{{"code", code}, {"message", message}, {"detail", detail}}};
}

Service::Service(SceneCorpus corpus, ServiceConfig config)
    : corpus_(std::move(corpus)), config_(std::move(config)), rng_(config_.seed) {}

ApiResponse Service::list_scenes() const {
  ordered_json list = ordered_json::array();
  for (const auto& s : corpus_.scenes) {
    list.push_back({{"id", s.id}, {"description", s.description}, {"object_count", s.objects.size()}});
  }
  return {200, list};
}

ApiResponse Service::get_scene(const std::string& id) const {
  const Scene* s = corpus_.find_scene(id);
  if (!s) return api_error(404, "not_found", "no scene '" + id + "'");
  ordered_json j;
  j["id"] = s->id;
  j["description"] = s->description;
  j["object_count"] = s->objects.size();
  j["objects"] = ordered_json::array();
  for (const auto& o : s->objects) j["objects"].push_back({{"id", o.id}, {"display_name", o.display_name}});
  j["inquiries"] = ordered_json::array();
  for (std::size_t i = 0; i < s->inquiries.size(); ++i) {
    j["inquiries"].push_back({{"index", i},
                              {"text", s->inquiries[i].text},
                              {"candidate_count", candidates_for_inquiry(*s, s->inquiries[i]).size()}});
  }
  return {200, j};
}

namespace {

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                static_cast<unsigned long long>(gen()));
  return buf;
}

template <typename T>
std::optional<T> field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name) || j[name].is_null()) return std::nullopt;
  return j[name].get<T>();
}

}  // namespace

std::shared_ptr<Service::Entry> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ordered_json Service::view(const std::string& id, Entry& e) const {
  ordered_json j;
  j["session_id"] = id;
  j["scene_id"] = e.scene_id;
  j["inquiry_index"] = e.inquiry_index;
  j["role"] = e.role;
  j["planner"] = e.planner;
  if (!e.mode.empty()) j["mode"] = e.mode;
  if (e.session) {
    const Session& s = *e.session;
    j["state"] = to_string(s.state());
    j["turn"] = e.replies.size();
    j["question"] = s.pending() ? ordered_json(s.pending()->question) : ordered_json();
    j["options"] = s.pending_options();
    j["queries"] = s.query_count();
    j["budget"] = s.budget();
    j["transcript"] = ordered_json::array();
    for (const auto& ev : s.transcript()) j["transcript"].push_back(to_json(ev));
    j["partial_tree"] = s.policy().partial_tree();
    if (s.finished()) j["result"] = to_json(s.result());
  } else {
    const QuestionerGame& g = *e.game;
    j["state"] = g.finished() ? (g.result().delivered ? "delivered" : "failed") : "awaiting_question";
    j["turn"] = e.replies.size();
    j["candidate_count"] = g.candidates().size();
    j["queries"] = g.queries();
    j["budget"] = g.budget();
    j["transcript"] = ordered_json::array();
    for (const auto& ev : g.transcript()) j["transcript"].push_back(to_json(ev));
    if (g.finished()) {
      const SessionResult r = g.result();
      j["result"] = to_json(r);
    }
  }
  return j;
}

ApiResponse Service::create_session(const json& request) {
  std::string scene_id, planner, mode, role;
  std::size_t inquiry_index = 0;
  try {
    scene_id = field<std::string>(request, "scene_id").value_or("");
    planner = field<std::string>(request, "planner").value_or("exact");
    mode = field<std::string>(request, "mode").value_or("whole");
    role = field<std::string>(request, "role").value_or("answerer");
    inquiry_index = field<std::size_t>(request, "inquiry_index").value_or(0);
  } catch (const json::exception& e) {
    return api_error(400, "bad_request", "malformed session request", e.what());
  }
  const Scene* scene = corpus_.find_scene(scene_id);
  if (!scene) return api_error(404, "not_found", "no scene '" + scene_id + "'");
  if (inquiry_index >= scene->inquiries.size()) {
    return api_error(400, "bad_request", "inquiry_index out of range",
                     ordered_json{{"inquiry_count", scene->inquiries.size()}});
  }
  const Inquiry& inquiry = scene->inquiries[inquiry_index];

  auto entry = std::make_shared<Entry>();
  entry->scene_id = scene_id;
  entry->inquiry_index = inquiry_index;
  entry->role = role;
  entry->last_used = Clock::now();

  if (role == "questioner") {
    const CandidateSet cands = candidates_for_inquiry(*scene, inquiry);
    std::vector<ObjectId> ids(cands.begin(), cands.end());
    ObjectId target;
    {
      std::lock_guard lock(mutex_);
      target = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng_)];
    }
    entry->game = std::make_unique<QuestionerGame>(*scene, inquiry, target);
  } else if (role == "answerer") {
    PlannerKind kind;
    try {
      kind = planner_from_token(planner);
    } catch (const std::invalid_argument& e) {
      return api_error(400, "bad_request", e.what());
    }
    entry->planner = planner;
    PolicyOptions options = config_.policy;
    if (kind == PlannerKind::Llm) {
      try {
        options.mode = planner_mode_from_token(mode);
      } catch (const std::invalid_argument& e) {
        return api_error(400, "bad_request", e.what());
      }
      entry->mode = to_token(options.mode);
    }
    try {
      entry->session = std::make_unique<Session>(*scene, inquiry, make_policy(kind, options));
      entry->session->start();
    } catch (const ConfigurationError& e) {
      return api_error(503, "configuration_error", e.what(), ordered_json{{"variable", e.variable()}});
    } catch (const AuthenticationError& e) {
      return api_error(503, "authentication_error", e.what(), ordered_json{{"variable", e.variable()}});
    } catch (const std::invalid_argument& e) {
      return api_error(503, "configuration_error", e.what());
    }
    const std::size_t calls = entry->session->policy().completions();
    llm_calls_ += calls;
    entry->completions_seen = calls;
  } else {
    return api_error(400, "bad_request", "role must be answerer or questioner");
  }

  const std::string id = new_session_id();
  {
    std::lock_guard lock(mutex_);
    sessions_[id] = entry;
  }
  std::lock_guard lock(entry->mutex);
  return {201, view(id, *entry)};
}

ApiResponse Service::answer(const std::string& session_id, const json& request) {
  auto entry = find(session_id);
  if (!entry) return api_error(404, "not_found", "no session '" + session_id + "'");
  std::lock_guard lock(entry->mutex);
  entry->last_used = Clock::now();

  std::optional<std::size_t> turn;
  std::optional<std::string> answer, question, deliver;
  try {
    turn = field<std::size_t>(request, "turn");
    answer = field<std::string>(request, "answer");
    question = field<std::string>(request, "question");
    deliver = field<std::string>(request, "deliver");
  } catch (const json::exception& e) {
    return api_error(400, "bad_request", "malformed answer request", e.what());
  }
  const std::size_t current = entry->replies.size();
  if (turn && *turn < current) return {200, entry->replies[*turn]};
  if (turn && *turn > current) {
    return api_error(409, "conflict", "turn " + std::to_string(*turn) + " is ahead of the session",
                     ordered_json{{"turn", current}});
  }

  if (entry->session) {
    Session& s = *entry->session;
    if (s.state() != SessionState::AwaitingAnswer) {
      return api_error(409, "conflict", "session is not waiting for an answer",
                       ordered_json{{"state", to_string(s.state())}});
    }
    if (!answer) return api_error(400, "bad_request", "missing 'answer'");
    const auto options = s.pending_options();
    const auto matched = match_typed_answer(*answer, options);
    if (!matched) {
      return api_error(400, "invalid_answer", "answer matches none of the options",
                       ordered_json{{"options", options}});
    }
    try {
      s.answer(*matched);
    } catch (const ConfigurationError& e) {
      return api_error(503, "configuration_error", e.what(), ordered_json{{"variable", e.variable()}});
    } catch (const AuthenticationError& e) {
      return api_error(503, "authentication_error", e.what(), ordered_json{{"variable", e.variable()}});
    }
    const std::size_t calls = s.policy().completions();
    llm_calls_ += calls - entry->completions_seen;
    entry->completions_seen = calls;
  } else {
    QuestionerGame& g = *entry->game;
    if (g.finished()) return api_error(409, "conflict", "session is over");
    QuestionerGame::Reply reply;
    if (question) {
      reply = g.ask(*question);
    } else if (deliver) {
      reply = g.deliver(*deliver);
    } else {
      return api_error(400, "bad_request", "missing 'question' or 'deliver'");
    }
    ordered_json body = view(session_id, *entry);
    body["reply"] = reply.answer;
    entry->replies.push_back(body);
    return {200, body};
  }
  entry->replies.push_back(ordered_json());
  ordered_json body = view(session_id, *entry);
  entry->replies.back() = body;
  return {200, body};
}

ApiResponse Service::get_session(const std::string& session_id) {
  auto entry = find(session_id);
  if (!entry) return api_error(404, "not_found", "no session '" + session_id + "'");
  std::lock_guard lock(entry->mutex);
  entry->last_used = Clock::now();
  return {200, view(session_id, *entry)};
}

ApiResponse Service::latest_report() const {
  if (!config_.report_path) return api_error(404, "not_found", "no report configured");
  std::ifstream in(*config_.report_path);
  if (!in) return api_error(404, "not_found", "report " + config_.report_path->string() + " not found");
  try {
    return {200, ordered_json::parse(in)};
  } catch (const json::exception& e) {
    return api_error(500, "bad_report", "report is not valid JSON", e.what());
  }
}

std::size_t Service::expire_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard entry_lock(it->second->mutex);
      idle = now - it->second->last_used > config_.idle_timeout;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

ApiResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  expire_idle();
  json request = json::object();
  if (!text::trim(body).empty()) {
    try {
      request = json::parse(body);
    } catch (const json::exception& e) {
      return api_error(400, "invalid_json", "request body is not JSON", e.what());
    }
  }
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < path.size();) {
    const std::size_t j = path.find('/', i);
    const std::string part = path.substr(i, j == std::string::npos ? std::string::npos : j - i);
    if (!part.empty()) parts.push_back(part);
    if (j == std::string::npos) break;
    i = j + 1;
  }
  if (parts.empty() || parts[0] != "api") return api_error(404, "not_found", "no route " + path);
  parts.erase(parts.begin());

  try {
    if (parts.size() == 1 && parts[0] == "scenes" && method == "GET") return list_scenes();
    if (parts.size() == 2 && parts[0] == "scenes" && method == "GET") return get_scene(parts[1]);
    if (parts.size() == 1 && parts[0] == "sessions" && method == "POST") return create_session(request);
    if (parts.size() == 2 && parts[0] == "sessions" && method == "GET") return get_session(parts[1]);
    if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "answer" && method == "POST") {
      return answer(parts[1], request);
    }
    if (parts.size() == 2 && parts[0] == "reports" && parts[1] == "latest" && method == "GET") {
      return latest_report();
    }
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", method, path, e.what());
    return api_error(500, "internal_error", e.what());
  }
  return api_error(404, "not_found", "no route " + method + " " + path);
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  server.set_default_headers({{"Access-Control-Allow-Origin", service.config().cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", dispatch);
  server.Post(R"(/api/.*)", dispatch);
  if (!server.bind_to_port(host, port)) return false;
  spdlog::info("listening on {}:{}", host, port);
  return server.listen_after_bind();
}

}  // namespace disambig
