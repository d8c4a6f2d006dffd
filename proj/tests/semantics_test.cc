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


#include "draggn/semantics.h"

#include <gtest/gtest.h>

#include <set>

#include "draggn/errors.h"

namespace draggn {
namespace {

TEST(SemanticsTest, ValidityTable) {
  EXPECT_EQ(ValidArguments(CallableUnit::kGoUp).size(), 8u);
  EXPECT_EQ(ValidArguments(CallableUnit::kBlockInRoom).size(), 4u);
  EXPECT_EQ(ValidArguments(CallableUnit::kGoLeft).size() +
                ValidArguments(CallableUnit::kAgentInRoom).size(),
            static_cast<size_t>(kNumArguments));
  for (CallableUnit unit : kAllUnits) {
    for (int i = 0; i < kNumArguments; ++i) {
      BindingArgument arg = BindingArgument::FromIndex(i);
      bool action = CategoryOf(unit) == UnitCategory::kAction;
      EXPECT_EQ(IsValid(unit, arg), action == arg.is_steps());
    }
  }
  EXPECT_THROW(UnitArgPair(CallableUnit::kGoUp,
                           BindingArgument::Room(Color::kRed)),
               ContractViolation);
}

TEST(SemanticsTest, PairSpaceHasFortyMembers) {
  std::vector<UnitArgPair> pairs = AllPairs();
  EXPECT_EQ(pairs.size(), 40u);
  EXPECT_EQ(std::set<UnitArgPair>(pairs.begin(), pairs.end()).size(), 40u);
  for (const UnitArgPair &pair : pairs) {
    EXPECT_EQ(ParsePair(ToString(pair)), pair);
  }
  EXPECT_EQ(ToString(ParsePair("goUp 3")), "goUp 3");
  EXPECT_EQ(ToString(ParsePair("agentInRoom roomIsRed")),
            "agentInRoom roomIsRed");
  EXPECT_THROW(ParsePair("goUp roomIsRed"), ParseError);
  EXPECT_THROW(ParsePair("goUp 9"), ParseError);
  EXPECT_THROW(ParsePair("fly 3"), ParseError);
}

TEST(GroundTest, TableExamples) {
  const GridMap &map = DefaultMap();
  GroundedTask up = Ground(ParsePair("goUp 3"), map);
  EXPECT_EQ(std::get<ActionSequence>(up), (ActionSequence{Action::kNorth, 3}));
  GroundedTask red = Ground(ParsePair("agentInRoom roomIsRed"), map);
  EXPECT_EQ(std::get<GoalTask>(red).reward.proposition,
            (PropositionalFunction{PropositionKind::kAgentInRoom, "room0"}));
  GroundedTask green = Ground(ParsePair("blockInRoom roomIsGreen"), map);
  EXPECT_EQ(ToString(green), "goal blockInRoom block0 room1");
  EXPECT_THROW(Ground(ParsePair("blockInRoom roomIsYellow"), map),
               GroundingError);
}

TEST(GroundTest, CategoryConsistentAndPure) {
  const GridMap &map = DefaultMap();
  for (const UnitArgPair &pair : AllPairs()) {
    if (pair.arg().is_steps() == false &&
        pair.arg().color() == Color::kYellow) {
      continue;  // the default map has no yellow room
    }
    GroundedTask task = Ground(pair, map);
    EXPECT_EQ(std::holds_alternative<ActionSequence>(task),
              pair.category() == UnitCategory::kAction);
    EXPECT_EQ(task, Ground(pair, map));
  }
  EXPECT_EQ(PrimitiveActionOf(CallableUnit::kGoLeft), Action::kWest);
  EXPECT_EQ(PrimitiveActionOf(CallableUnit::kGoRight), Action::kEast);
  EXPECT_EQ(PrimitiveActionOf(CallableUnit::kGoDown), Action::kSouth);
}

TEST(DispatchTest, SegmentedTraceDownUpLeft) {
  const GridMap &map = DefaultMap();
  WorldState state = map.start();
  std::vector<int> lengths;
  for (const char *text : {"goDown 3", "goUp 2", "goLeft 4"}) {
    Trajectory t = Dispatch(Ground(ParsePair(text), map), map, state);
    EXPECT_EQ(t.termination, Termination::kCompletedActions);
    lengths.push_back(t.length());
    state = t.final_state;
  }
  EXPECT_EQ(lengths, (std::vector<int>{3, 2, 4}));
  EXPECT_EQ(state.agent, (Cell{5, 1}));
  EXPECT_EQ(state.block, map.start().block);
}

TEST(DispatchTest, GoalAlreadySatisfied) {
  const GridMap &map = DefaultMap();
  WorldState inside{{1, 1}, {6, 3}};
  Trajectory t =
      Dispatch(Ground(ParsePair("agentInRoom roomIsRed"), map), map, inside);
  EXPECT_EQ(t.length(), 0);
  EXPECT_EQ(t.termination, Termination::kGoal);
}

TEST(DispatchTest, GoalTaskReplansAfterTeleportActionTaskDoesNot) {
  const GridMap &map = DefaultMap();
  DispatchOptions options;
  options.perturb = [](int step, const WorldState &s) -> std::optional<WorldState> {
    if (step != 2) return std::nullopt;
    return WorldState{s.agent, {8, 5}};
  };
  GroundedTask goal = Ground(ParsePair("blockInRoom roomIsGreen"), map);
  Trajectory planned = Dispatch(goal, map, map.start(), options);
  EXPECT_EQ(planned.termination, Termination::kGoal);

  // Replay the unperturbed plan as verbatim actions under the same teleport.
  Trajectory clean = Dispatch(goal, map, map.start());
  std::vector<Action> actions;
  for (const TrajectoryStep &step : clean.steps) actions.push_back(step.action);
  ExecutionOptions exec;
  exec.perturb = options.perturb;
  Trajectory replay = ExecuteActions(map, map.start(), actions, exec);
  EXPECT_FALSE(Evaluate(std::get<GoalTask>(goal).reward.proposition, map,
                        replay.final_state));
}

}  // namespace
}  // namespace draggn
