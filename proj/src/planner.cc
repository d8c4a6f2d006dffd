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

#include "draggn/planner.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "draggn/errors.h"

namespace draggn {

namespace {

struct Successor {
  int index;
  double probability;
};

WorldState Sample(const std::vector<Outcome> &outcomes, std::mt19937_64 &rng) {
  if (outcomes.size() == 1) return outcomes[0].state;
  // 53-bit uniform in [0, 1).
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  for (const Outcome &outcome : outcomes) {
    acc += outcome.probability;
    if (u < acc) return outcome.state;
  }
  return outcomes.back().state;
}

}  // namespace

int Policy::Index(const WorldState &state) const {
  auto free_at = [&](Cell cell) {
    if (cell.row < 0 || cell.col < 0 || cell.col >= width_) return -1;
    size_t i = static_cast<size_t>(cell.row) * width_ + cell.col;
    return i < free_index_.size() ? free_index_[i] : -1;
  };
  int a = free_at(state.agent), b = free_at(state.block);
  if (a < 0 || b < 0 || a == b) {
    throw ContractViolation("state is not valid for the policy's map");
  }
  return a * free_count_ + b;
}

Action Policy::ActionAt(const WorldState &state) const {
  return actions_[Index(state)];
}

double Policy::Value(const WorldState &state) const {
  return values_[Index(state)];
}

bool Policy::IsGoal(const WorldState &state) const {
  return goal_[Index(state)] != 0;
}

Policy ValueIteration(const GridMap &map, const GroundedReward &reward,
                      const PlannerOptions &options) {
  if (!(options.tolerance > 0.0)) {
    throw ContractViolation("tolerance must be positive");
  }
  if (!(reward.discount > 0.0 && reward.discount < 1.0)) {
    throw ContractViolation("discount must lie in (0, 1)");
  }
  map.FindRoom(reward.proposition.room);  // throws on unknown room

  Policy policy;
  const auto &free = map.free_cells();
  const int f = static_cast<int>(free.size());
  policy.free_count_ = f;
  policy.width_ = map.width();
  policy.free_index_.resize(map.height() * map.width());
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      policy.free_index_[r * map.width() + c] = map.FreeIndex({r, c});
    }
  }
  const int n = f * f;
  policy.values_.assign(n, 0.0);
  policy.actions_.assign(n, Action::kNorth);
  policy.goal_.assign(n, 0);

  // Successor lists for every valid state and action.
  std::vector<std::vector<Successor>> successors(n * 4);
  std::vector<uint8_t> valid(n, 0);
  for (const WorldState &state : EnumerateStates(map)) {
    int i = policy.Index(state);
    valid[i] = 1;
    if (Evaluate(reward.proposition, map, state)) {
      policy.goal_[i] = 1;
      policy.values_[i] = reward.goal_reward;
      continue;
    }
    for (int a = 0; a < 4; ++a) {
      for (const Outcome &outcome :
           Transition(map, state, kAllActions[a], options.slip)) {
        successors[i * 4 + a].push_back(
            {policy.Index(outcome.state), outcome.probability});
      }
    }
  }

  std::vector<double> next = policy.values_;
  auto q_value = [&](int i, int a) {
    double q = 0.0;
    for (const Successor &s : successors[i * 4 + a]) {
      q += s.probability *
           (reward.step_reward + reward.discount * policy.values_[s.index]);
    }
    return q;
  };
  bool converged = false;
  while (policy.iterations() < options.max_iterations) {
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!valid[i] || policy.goal_[i]) continue;
      double best = q_value(i, 0);
      for (int a = 1; a < 4; ++a) best = std::max(best, q_value(i, a));
      next[i] = best;
      residual = std::max(residual, std::abs(best - policy.values_[i]));
    }
    policy.values_.swap(next);
    policy.residuals_.push_back(residual);
    if (residual < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError(
        "value iteration did not converge in " +
            std::to_string(options.max_iterations) +
            " sweeps (residual " + std::to_string(policy.final_residual()) +
            ")",
        policy.final_residual());
  }

  for (int i = 0; i < n; ++i) {
    if (!valid[i] || policy.goal_[i]) continue;
    int best_action = 0;
    double best = q_value(i, 0);
    for (int a = 1; a < 4; ++a) {
      double q = q_value(i, a);
      if (q > best) {
        best = q;
        best_action = a;
      }
    }
    policy.actions_[i] = kAllActions[best_action];
  }
  return policy;
}

std::string_view TerminationName(Termination reason) {
  switch (reason) {
    case Termination::kGoal: return "goal";
    case Termination::kStepLimit: return "step-limit";
    case Termination::kCompletedActions: return "completed-actions";
  }
  return "?";
}

Trajectory ExecutePolicy(const GridMap &map, const WorldState &start,
                         const Policy &policy, const GroundedReward &reward,
                         int max_steps, const ExecutionOptions &options) {
  if (max_steps <= 0) throw ContractViolation("max_steps must be positive");
  if (!map.IsValidState(start)) {
    throw ContractViolation("start state is not valid for this map");
  }
  std::mt19937_64 rng(options.seed);
  Trajectory trajectory;
  WorldState state = start;
  for (int step = 0;; ++step) {
    if (options.perturb) {
      if (std::optional<WorldState> moved = options.perturb(step, state)) {
        if (!map.IsValidState(*moved)) {
          throw ContractViolation("perturbed state is not valid");
        }
        state = *moved;
      }
    }
    if (Evaluate(reward.proposition, map, state)) {
      trajectory.termination = Termination::kGoal;
      break;
    }
    if (step == max_steps) {
      trajectory.termination = Termination::kStepLimit;
      break;
    }
    Action action = policy.ActionAt(state);
    trajectory.steps.push_back({state, action});
    state = Sample(Transition(map, state, action, options.slip), rng);
  }
  trajectory.final_state = state;
  return trajectory;
}

Trajectory ExecuteActions(const GridMap &map, const WorldState &start,
                          std::span<const Action> actions,
                          const ExecutionOptions &options) {
  if (!map.IsValidState(start)) {
    throw ContractViolation("start state is not valid for this map");
  }
  std::mt19937_64 rng(options.seed);
  Trajectory trajectory;
  WorldState state = start;
  for (size_t step = 0; step < actions.size(); ++step) {
    if (options.perturb) {
      if (std::optional<WorldState> moved =
              options.perturb(static_cast<int>(step), state)) {
        if (!map.IsValidState(*moved)) {
          throw ContractViolation("perturbed state is not valid");
        }
        state = *moved;
      }
    }
    trajectory.steps.push_back({state, actions[step]});
    state = Sample(Transition(map, state, actions[step], options.slip), rng);
  }
  trajectory.final_state = state;
  trajectory.termination = Termination::kCompletedActions;
  return trajectory;
}

}  // namespace draggn
