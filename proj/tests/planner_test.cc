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

#include <gtest/gtest.h>

#include <random>

#include "draggn/errors.h"
#include "oracles.h"

namespace draggn {
namespace {

GroundedReward Goal(PropositionKind kind, const std::string &room) {
  GroundedReward reward;
  reward.proposition = {kind, room};
  return reward;
}

TEST(ValueIterationTest, GreedyRolloutMatchesBfs) {
  const GridMap &map = DefaultMap();
  std::vector<WorldState> states = EnumerateStates(map);
  std::mt19937_64 rng(11);
  int checked = 0;
  for (PropositionKind kind :
       {PropositionKind::kAgentInRoom, PropositionKind::kBlockInRoom}) {
    for (const Room &room : map.rooms()) {
      GroundedReward reward = Goal(kind, room.id);
      Policy policy = ValueIteration(map, reward);
      EXPECT_LT(policy.final_residual(), 1e-6);
      for (int k = 0; k < 15; ++k) {
        WorldState start = states[rng() % states.size()];
        int bfs = testing::BfsDistance(map, start, reward.proposition);
        if (bfs < 0) continue;  // block wedged where no push can free it
        Trajectory t = ExecutePolicy(map, start, policy, reward, 500);
        ASSERT_EQ(t.termination, Termination::kGoal);
        EXPECT_EQ(t.length(), bfs) << ToString(reward.proposition);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 60);
}

TEST(ValueIterationTest, GreedyTieBreakFollowsActionOrder) {
  const GridMap &map = DefaultMap();
  GroundedReward reward = Goal(PropositionKind::kAgentInRoom, "room2");
  Policy policy = ValueIteration(map, reward);
  int ties = 0;
  for (const WorldState &s : EnumerateStates(map)) {
    if (policy.IsGoal(s)) continue;
    double q[4];
    for (int a = 0; a < 4; ++a) {
      q[a] = reward.step_reward +
             reward.discount * policy.Value(NextState(map, s, kAllActions[a]));
    }
    int first_best = 0;
    for (int a = 1; a < 4; ++a) {
      if (q[a] > q[first_best]) first_best = a;
    }
    for (int a = first_best + 1; a < 4; ++a) ties += q[a] == q[first_best];
    ASSERT_EQ(policy.ActionAt(s), kAllActions[first_best]);
  }
  EXPECT_GT(ties, 0);
}

TEST(ValueIterationTest, GoalStatesAreTerminal) {
  const GridMap &map = DefaultMap();
  GroundedReward reward = Goal(PropositionKind::kAgentInRoom, "room0");
  Policy policy = ValueIteration(map, reward);
  WorldState inside{{2, 2}, {6, 3}};
  EXPECT_TRUE(policy.IsGoal(inside));
  EXPECT_EQ(policy.Value(inside), reward.goal_reward);
  Trajectory t = ExecutePolicy(map, inside, policy, reward, 10);
  EXPECT_EQ(t.length(), 0);
  EXPECT_EQ(t.termination, Termination::kGoal);
  EXPECT_EQ(t.final_state, inside);
}

TEST(ValueIterationTest, ResidualsNonIncreasingAfterFirstSweep) {
  const GridMap &map = DefaultMap();
  for (double slip : {0.0, 0.2}) {
    PlannerOptions options;
    options.slip = slip;
    Policy policy = ValueIteration(
        map, Goal(PropositionKind::kBlockInRoom, "room1"), options);
    const auto &res = policy.residuals();
    ASSERT_GE(res.size(), 2u);
    for (size_t i = 2; i < res.size(); ++i) {
      EXPECT_LE(res[i], res[i - 1] + 1e-15) << "sweep " << i;
    }
  }
}

TEST(ValueIterationTest, PolicyInvariantUnderPositiveRewardScaling) {
  const GridMap &map = DefaultMap();
  GroundedReward base = Goal(PropositionKind::kBlockInRoom, "room2");
  base.step_reward = -0.01;
  GroundedReward scaled = base;
  scaled.goal_reward *= 4.0;
  scaled.step_reward *= 4.0;
  Policy a = ValueIteration(map, base);
  Policy b = ValueIteration(map, scaled);
  int differ = 0;
  for (const WorldState &s : EnumerateStates(map)) {
    if (a.IsGoal(s)) continue;
    differ += a.ActionAt(s) != b.ActionAt(s);
  }
  EXPECT_EQ(differ, 0);
}

TEST(ValueIterationTest, IterationCapRaisesWithResidual) {
  PlannerOptions options;
  options.max_iterations = 2;
  try {
    ValueIteration(DefaultMap(), Goal(PropositionKind::kAgentInRoom, "room1"),
                   options);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError &e) {
    EXPECT_GT(e.residual(), 1e-6);
  }
  EXPECT_THROW(ValueIteration(DefaultMap(),
                              Goal(PropositionKind::kAgentInRoom, "room7")),
               LookupError);
}

TEST(ExecutePolicyTest, StepLimitIsReported) {
  const GridMap &map = DefaultMap();
  GroundedReward reward = Goal(PropositionKind::kBlockInRoom, "room1");
  Policy policy = ValueIteration(map, reward);
  Trajectory t = ExecutePolicy(map, map.start(), policy, reward, 1);
  EXPECT_EQ(t.termination, Termination::kStepLimit);
  EXPECT_EQ(t.length(), 1);
}

TEST(ExecutePolicyTest, BlockTeleportMidTaskStillReachesGoal) {
  const GridMap &map = DefaultMap();
  GroundedReward reward = Goal(PropositionKind::kBlockInRoom, "room1");
  Policy policy = ValueIteration(map, reward);
  ExecutionOptions options;
  options.perturb = [](int step, const WorldState &s) -> std::optional<WorldState> {
    if (step != 4) return std::nullopt;
    return WorldState{s.agent, {8, 5}};  // into the blue room
  };
  Trajectory t = ExecutePolicy(map, map.start(), policy, reward, 200, options);
  EXPECT_EQ(t.termination, Termination::kGoal);
  EXPECT_TRUE(Evaluate(reward.proposition, map, t.final_state));
}

TEST(ExecutePolicyTest, SlipIsSeededAndStillSolves) {
  const GridMap &map = DefaultMap();
  GroundedReward reward = Goal(PropositionKind::kAgentInRoom, "room1");
  PlannerOptions planner;
  planner.slip = 0.2;
  Policy policy = ValueIteration(map, reward, planner);
  ExecutionOptions options;
  options.slip = 0.2;
  options.seed = 5;
  Trajectory a = ExecutePolicy(map, map.start(), policy, reward, 200, options);
  Trajectory b = ExecutePolicy(map, map.start(), policy, reward, 200, options);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.termination, Termination::kGoal);
}

TEST(ExecuteActionsTest, VerbatimExecution) {
  const GridMap &map = DefaultMap();
  Trajectory empty = ExecuteActions(map, map.start(), {});
  EXPECT_EQ(empty.length(), 0);
  EXPECT_EQ(empty.final_state, map.start());
  EXPECT_EQ(empty.termination, Termination::kCompletedActions);

  // South into the corridor wall is a consumed no-op; the last west step
  // pushes the block.
  std::vector<Action> actions = {Action::kSouth, Action::kSouth,
                                 Action::kSouth, Action::kWest, Action::kWest};
  Trajectory t = ExecuteActions(map, map.start(), actions);
  ASSERT_EQ(t.length(), 5);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(t.steps[i].action, actions[i]);
  EXPECT_EQ(t.steps[2].state, t.steps[1].state);
  EXPECT_EQ(t.final_state.agent, (Cell{6, 3}));
  EXPECT_EQ(t.final_state.block, (Cell{6, 2}));
}

}  // namespace
}  // namespace draggn
