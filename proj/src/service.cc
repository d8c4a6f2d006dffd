// Copyright 2026 The DRAGGN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "draggn/service.h"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <optional>

#include "draggn/errors.h"
#include "draggn/harness.h"
#include "draggn/random.h"
#include "httplib.h"

namespace draggn {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Client-side error carrying its HTTP status.
struct HttpError {
  int status;
  std::string message;
};

struct ActiveTask {
  UnitArgPair pair;
  GroundedTask task;
  std::shared_ptr<const Policy> policy;  // goal tasks only
  int remaining = 0;                     // action tasks only
  int taken = 0;
};

struct Session {
  std::mutex mu;
  std::string id;
  std::string model_name;
  std::shared_ptr<const GroundingModel> model;
  std::shared_ptr<const GridMap> map;
  WorldState state;
  std::optional<ActiveTask> active;
  uint64_t executions = 0;
};

ordered_json MapToJson(const GridMap &map) {
  ordered_json j;
  j["height"] = map.height();
  j["width"] = map.width();
  j["text"] = RenderMap(map);
  ordered_json rooms = ordered_json::array();
  for (const Room &room : map.rooms()) {
    ordered_json r;
    r["id"] = room.id;
    r["color"] = std::string(ColorName(room.color));
    ordered_json cells = ordered_json::array();
    for (Cell c : room.cells) cells.push_back({c.row, c.col});
    r["cells"] = std::move(cells);
    rooms.push_back(std::move(r));
  }
  j["rooms"] = std::move(rooms);
  return j;
}

json ParseBody(const httplib::Request &request) {
  if (request.body.empty()) return json::object();
  json body = json::parse(request.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw HttpError{400, "request body must be a JSON object"};
  }
  return body;
}

// Positive step budget from "steps", or unlimited when absent.
int StepBudget(const json &body) {
  if (!body.contains("steps") || body["steps"].is_null()) {
    return std::numeric_limits<int>::max();
  }
  const json &steps = body["steps"];
  if (!steps.is_number_integer() || steps.get<int64_t>() < 1) {
    throw HttpError{400, "'steps' must be a positive integer"};
  }
  return static_cast<int>(std::min<int64_t>(steps.get<int64_t>(),
                                            std::numeric_limits<int>::max()));
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    default_map = std::make_shared<const GridMap>(LoadMap(config.map_path));
    Routes();
  }

  ServiceConfig config;
  httplib::Server server;
  std::shared_ptr<const GridMap> default_map;

  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  uint64_t next_session = 1;

  std::mutex models_mu;
  std::map<std::string, std::shared_ptr<const GroundingModel>> models;

  std::vector<std::string> ModelNames() const {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto &entry : fs::directory_iterator(config.model_dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ckpt") {
        names.push_back(entry.path().stem().string());
      }
    }
    std::sort(names.begin(), names.end());
    return names;
  }

  std::shared_ptr<const GroundingModel> Model(const std::string &name) {
    std::lock_guard<std::mutex> lock(models_mu);
    auto it = models.find(name);
    if (it != models.end()) return it->second;
    std::vector<std::string> names = ModelNames();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw HttpError{404, "unknown model '" + name + "'"};
    }
    std::shared_ptr<const GroundingModel> model =
        LoadModel((fs::path(config.model_dir) / (name + ".ckpt")).string());
    models[name] = model;
    return model;
  }

  std::shared_ptr<Session> FindSession(const std::string &id) {
    std::lock_guard<std::mutex> lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError{404, "no session '" + id + "'"};
    return it->second;
  }

  ordered_json StateResponse(const Session &session) const {
    ordered_json j = StateToJson(session.state);
    j["session_id"] = session.id;
    j["model"] = session.model_name;
    j["map"] = MapToJson(*session.map);
    j["active_task"] = session.active
                           ? ordered_json(ToString(session.active->task))
                           : ordered_json(nullptr);
    return j;
  }

  // Runs at most |budget| actions of the session's active task.
  ordered_json Advance(Session &session, int budget) {
    ActiveTask &active = *session.active;
    ExecutionOptions options;
    options.slip = config.slip;
    options.seed = MixSeed(config.seed, session.executions++);
    Trajectory trajectory;
    std::optional<Termination> termination;
    if (const auto *goal = std::get_if<GoalTask>(&active.task)) {
      int run = std::min(budget, config.max_steps - active.taken);
      trajectory = ExecutePolicy(*session.map, session.state, *active.policy,
                                 goal->reward, run, options);
      active.taken += trajectory.length();
      if (trajectory.termination == Termination::kGoal) {
        termination = Termination::kGoal;
      } else if (active.taken >= config.max_steps) {
        termination = Termination::kStepLimit;
      }
    } else {
      const auto &seq = std::get<ActionSequence>(active.task);
      int run = std::min(budget, active.remaining);
      std::vector<Action> actions(run, seq.action);
      trajectory = ExecuteActions(*session.map, session.state, actions, options);
      active.remaining -= run;
      active.taken += run;
      if (active.remaining == 0) termination = Termination::kCompletedActions;
    }
    session.state = trajectory.final_state;

    ordered_json j;
    j["pair"] = PairToJson(active.pair);
    j["category"] =
        active.pair.category() == UnitCategory::kAction ? "action" : "goal";
    j["task"] = ToString(active.task);
    j["trajectory"] = TrajectoryToJson(trajectory);
    j["termination"] = termination
                           ? ordered_json(std::string(TerminationName(*termination)))
                           : ordered_json(nullptr);
    j["done"] = termination.has_value();
    j["steps_taken"] = active.taken;
    j["state"] = StateToJson(session.state);
    if (termination) session.active.reset();
    return j;
  }

  void CreateSession(const httplib::Request &request, httplib::Response &response) {
    json body = ParseBody(request);
    if (!body.contains("model") || !body["model"].is_string()) {
      throw HttpError{400, "'model' (string) is required"};
    }
    auto session = std::make_shared<Session>();
    session->model_name = body["model"].get<std::string>();
    session->model = Model(session->model_name);
    session->map = default_map;
    if (body.contains("map") && !body["map"].is_null()) {
      if (!body["map"].is_string()) throw HttpError{400, "'map' must be map text"};
      session->map =
          std::make_shared<const GridMap>(ParseMap(body["map"].get<std::string>()));
    }
    session->state = session->map->start();
    {
      std::lock_guard<std::mutex> lock(sessions_mu);
      session->id = "s" + std::to_string(next_session++);
      sessions[session->id] = session;
    }
    Reply(response, 201, StateResponse(*session));
  }

  void Command(Session &session, const httplib::Request &request,
               httplib::Response &response) {
    json body = ParseBody(request);
    if (!body.contains("text") || !body["text"].is_string()) {
      throw HttpError{400, "'text' (string) is required"};
    }
    int budget = StepBudget(body);
    GroundResult grounding = [&] {
      try {
        return GroundText(*session.model, body["text"].get<std::string>(),
                          *session.map);
      } catch (const GroundingError &e) {
        throw HttpError{422, e.what()};
      }
    }();
    ActiveTask active{grounding.pair, grounding.task, nullptr, 0, 0};
    if (const auto *goal = std::get_if<GoalTask>(&grounding.task)) {
      PlannerOptions planner;
      planner.slip = config.slip;
      active.policy = std::make_shared<const Policy>(
          ValueIteration(*session.map, goal->reward, planner));
    } else {
      active.remaining = std::get<ActionSequence>(grounding.task).count;
    }
    session.active = std::move(active);
    Reply(response, 200, Advance(session, budget));
  }

  void Resume(Session &session, const httplib::Request &request,
              httplib::Response &response) {
    int budget = StepBudget(ParseBody(request));
    if (!session.active) throw HttpError{409, "no active task to resume"};
    Reply(response, 200, Advance(session, budget));
  }

  void Perturb(Session &session, const httplib::Request &request,
               httplib::Response &response) {
    json body = ParseBody(request);
    WorldState next = session.state;
    auto cell = [&](const char *key, Cell &out) {
      if (!body.contains(key) || body[key].is_null()) return;
      const json &c = body[key];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer()) {
        throw HttpError{400, std::string("'") + key + "' must be [row, col]"};
      }
      out = {c[0].get<int>(), c[1].get<int>()};
    };
    cell("agent", next.agent);
    cell("block", next.block);
    if (!session.map->IsValidState(next)) {
      throw HttpError{422, "perturbed state is not valid on this map"};
    }
    session.state = next;
    Reply(response, 200, StateResponse(session));
  }

  static void Reply(httplib::Response &response, int status,
                    const ordered_json &body) {
    response.status = status;
    response.set_content(body.dump(), "application/json");
  }

  static void ReplyError(httplib::Response &response, int status,
                         const std::string &message) {
    ordered_json j;
    j["error"] = message;
    Reply(response, status, j);
  }

  // Maps exceptions to status codes: malformed input 4xx, everything else
  // 500 with the diagnostic.
  template <typename Fn>
  httplib::Server::Handler Guard(Fn fn) {
    return [fn](const httplib::Request &request, httplib::Response &response) {
      try {
        fn(request, response);
      } catch (const HttpError &e) {
        ReplyError(response, e.status, e.message);
      } catch (const ParseError &e) {
        ReplyError(response, 400, e.what());
      } catch (const LookupError &e) {
        ReplyError(response, 404, e.what());
      } catch (const ConvergenceError &e) {
        ReplyError(response, 500, std::string("planner: ") + e.what());
      } catch (const std::exception &e) {
        ReplyError(response, 500, e.what());
      }
    };
  }

  // Handler on an existing session, serialized by the session lock.
  template <typename Fn>
  httplib::Server::Handler OnSession(Fn fn) {
    return Guard([this, fn](const httplib::Request &request,
                            httplib::Response &response) {
      std::shared_ptr<Session> session = FindSession(request.matches[1]);
      std::lock_guard<std::mutex> lock(session->mu);
      fn(*session, request, response);
    });
  }

  void Routes() {
    server.Get("/models", Guard([this](const httplib::Request &,
                                       httplib::Response &response) {
      ordered_json j;
      j["models"] = ModelNames();
      Reply(response, 200, j);
    }));
    server.Post("/sessions", Guard([this](const httplib::Request &request,
                                          httplib::Response &response) {
      CreateSession(request, response);
    }));
    server.Get(R"(/sessions/([^/]+)/state)",
               OnSession([this](Session &session, const httplib::Request &,
                                httplib::Response &response) {
                 Reply(response, 200, StateResponse(session));
               }));
    server.Post(R"(/sessions/([^/]+)/command)",
                OnSession([this](Session &session,
                                 const httplib::Request &request,
                                 httplib::Response &response) {
                  Command(session, request, response);
                }));
    server.Post(R"(/sessions/([^/]+)/resume)",
                OnSession([this](Session &session,
                                 const httplib::Request &request,
                                 httplib::Response &response) {
                  Resume(session, request, response);
                }));
    server.Post(R"(/sessions/([^/]+)/perturb)",
                OnSession([this](Session &session,
                                 const httplib::Request &request,
                                 httplib::Response &response) {
                  Perturb(session, request, response);
                }));
    server.Post(R"(/sessions/([^/]+)/reset)",
                OnSession([this](Session &session, const httplib::Request &,
                                 httplib::Response &response) {
                  session.state = session.map->start();
                  session.active.reset();
                  Reply(response, 200, StateResponse(session));
                }));
  }
};

Service::Service(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { Stop(); }

int Service::Bind(const std::string &host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void Service::Run() { impl_->server.listen_after_bind(); }

void Service::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace draggn
