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

// Tabular value iteration over the full (agent, block) product space and
// closed-loop / open-loop execution.

#ifndef DRAGGN_PLANNER_H_
#define DRAGGN_PLANNER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "draggn/cleanup_world.h"

namespace draggn {

// A propositional goal. Goal states are terminal and keep value
// goal_reward; every other transition earns step_reward.
struct GroundedReward {
  PropositionalFunction proposition;
  double goal_reward = 1.0;
  double step_reward = 0.0;
  double discount = 0.95;

  bool operator==(const GroundedReward &other) const = default;
};

struct PlannerOptions {
  double slip = 0.0;
  double tolerance = 1e-6;
  int max_iterations = 10000;
};

// Greedy policy over every (agent, block) placement of one map. Immutable
// once built.
class Policy {
 public:
  Action ActionAt(const WorldState &state) const;
  double Value(const WorldState &state) const;
  bool IsGoal(const WorldState &state) const;

  // Max |V_k - V_{k-1}| after each sweep.
  const std::vector<double> &residuals() const { return residuals_; }
  int iterations() const { return static_cast<int>(residuals_.size()); }
  double final_residual() const {
    return residuals_.empty() ? 0.0 : residuals_.back();
  }

 private:
  friend Policy ValueIteration(const GridMap &, const GroundedReward &,
                               const PlannerOptions &);

  int Index(const WorldState &state) const;

  int free_count_ = 0;
  std::vector<int> free_index_;  // copied from the map, row-major
  int width_ = 0;
  std::vector<double> values_;
  std::vector<Action> actions_;
  std::vector<uint8_t> goal_;
  std::vector<double> residuals_;
};

// Jacobi value iteration until the Bellman residual drops below
// options.tolerance. Greedy ties go to the earliest action in kAllActions.
// Throws ConvergenceError at the iteration cap, ContractViolation for a
// non-positive tolerance or a discount outside (0, 1).
Policy ValueIteration(const GridMap &map, const GroundedReward &reward,
                      const PlannerOptions &options = {});

enum class Termination : uint8_t { kGoal, kStepLimit, kCompletedActions };

std::string_view TerminationName(Termination reason);

struct TrajectoryStep {
  WorldState state;  // state the action was taken from
  Action action;

  bool operator==(const TrajectoryStep &other) const = default;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  WorldState final_state;
  Termination termination = Termination::kCompletedActions;

  int length() const { return static_cast<int>(steps.size()); }
};

// Called before each step with the step index and the current state; a
// returned state replaces the current one (exogenous perturbation).
using Perturbation =
    std::function<std::optional<WorldState>(int step, const WorldState &)>;

struct ExecutionOptions {
  double slip = 0.0;
  uint64_t seed = 0;  // drives slip sampling only
  Perturbation perturb;
};

// Follows |policy| from |start| until the proposition holds or |max_steps|
// actions have been taken. The policy covers every state, so perturbed
// states need no re-solve.
Trajectory ExecutePolicy(const GridMap &map, const WorldState &start,
                         const Policy &policy, const GroundedReward &reward,
                         int max_steps,
                         const ExecutionOptions &options = {});

// Executes |actions| verbatim. Blocked moves still consume a step.
Trajectory ExecuteActions(const GridMap &map, const WorldState &start,
                          std::span<const Action> actions,
                          const ExecutionOptions &options = {});

}  // namespace draggn

#endif  // DRAGGN_PLANNER_H_
