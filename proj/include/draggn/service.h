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

// HTTP session service. JSON bodies throughout.
//
//   POST /sessions                {model, map?}         -> {session_id, ...}
//   GET  /sessions/{id}/state                           -> {agent, block, map}
//   POST /sessions/{id}/command   {text, steps?}        -> grounding + trajectory
//   POST /sessions/{id}/resume    {steps?}              -> more trajectory
//   POST /sessions/{id}/perturb   {agent?, block?}      -> new state
//   POST /sessions/{id}/reset                           -> start state
//   GET  /models                                        -> {models: [...]}
//
// Without "steps" a command runs to termination in one response. With
// "steps" at most that many actions are executed and the task stays active
// for /resume; a perturbation in between is picked up by the remaining
// execution (goal tasks re-plan through their universal policy, action
// tasks keep replaying their action).

#ifndef DRAGGN_SERVICE_H_
#define DRAGGN_SERVICE_H_

#include <cstdint>
#include <memory>
#include <string>

namespace draggn {

struct ServiceConfig {
  // Directory scanned for *.ckpt files; a model's name is the file stem.
  std::string model_dir = ".";
  // Map used when a session does not supply one ("" = built-in default).
  std::string map_path;
  double slip = 0.0;
  uint64_t seed = 0;
  int max_steps = 200;
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // Binds to |port| (0 picks a free one) and returns the bound port, or -1.
  int Bind(const std::string &host, int port);
  // Serves on the bound socket until Stop().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace draggn

#endif  // DRAGGN_SERVICE_H_
