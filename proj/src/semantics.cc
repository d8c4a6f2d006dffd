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

#include "draggn/errors.h"

namespace draggn {

namespace {

constexpr std::array<std::string_view, 4> kRoomArgumentNames = {
    "roomIsRed", "roomIsGreen", "roomIsBlue", "roomIsYellow"};

}  // namespace

UnitCategory CategoryOf(CallableUnit unit) {
  return unit == CallableUnit::kAgentInRoom ||
                 unit == CallableUnit::kBlockInRoom
             ? UnitCategory::kGoal
             : UnitCategory::kAction;
}

std::string_view UnitName(CallableUnit unit) {
  switch (unit) {
    case CallableUnit::kGoUp: return "goUp";
    case CallableUnit::kGoDown: return "goDown";
    case CallableUnit::kGoLeft: return "goLeft";
    case CallableUnit::kGoRight: return "goRight";
    case CallableUnit::kAgentInRoom: return "agentInRoom";
    case CallableUnit::kBlockInRoom: return "blockInRoom";
  }
  return "?";
}

CallableUnit ParseUnit(std::string_view name) {
  for (CallableUnit unit : kAllUnits) {
    if (UnitName(unit) == name) return unit;
  }
  throw ParseError("unknown callable unit '" + std::string(name) + "'");
}

BindingArgument BindingArgument::Steps(int count) {
  if (count < 1 || count > kMaxSteps) {
    throw ContractViolation("step count must lie in [1, 8]");
  }
  return BindingArgument(count - 1);
}

BindingArgument BindingArgument::Room(Color color) {
  return BindingArgument(kMaxSteps + static_cast<int>(color));
}

BindingArgument BindingArgument::FromIndex(int index) {
  if (index < 0 || index >= kNumArguments) {
    throw ContractViolation("binding argument index out of range");
  }
  return BindingArgument(index);
}

int BindingArgument::steps() const {
  if (!is_steps()) throw ContractViolation("argument is not a step count");
  return index_ + 1;
}

Color BindingArgument::color() const {
  if (is_steps()) throw ContractViolation("argument is not a room attribute");
  return static_cast<Color>(index_ - kMaxSteps);
}

std::string ArgumentName(BindingArgument arg) {
  if (arg.is_steps()) return std::to_string(arg.steps());
  return std::string(kRoomArgumentNames[arg.index() - kMaxSteps]);
}

BindingArgument ParseArgument(std::string_view name) {
  if (name.size() == 1 && name[0] >= '1' && name[0] <= '8') {
    return BindingArgument::Steps(name[0] - '0');
  }
  for (int i = 0; i < 4; ++i) {
    if (kRoomArgumentNames[i] == name) {
      return BindingArgument::Room(static_cast<Color>(i));
    }
  }
  throw ParseError("unknown binding argument '" + std::string(name) + "'");
}

std::vector<BindingArgument> ValidArguments(CallableUnit unit) {
  std::vector<BindingArgument> args;
  if (CategoryOf(unit) == UnitCategory::kAction) {
    for (int n = 1; n <= kMaxSteps; ++n) {
      args.push_back(BindingArgument::Steps(n));
    }
  } else {
    for (Color color : kAllColors) args.push_back(BindingArgument::Room(color));
  }
  return args;
}

bool IsValid(CallableUnit unit, BindingArgument arg) {
  return (CategoryOf(unit) == UnitCategory::kAction) == arg.is_steps();
}

UnitArgPair::UnitArgPair(CallableUnit unit, BindingArgument arg)
    : unit_(unit), arg_(arg) {
  if (!IsValid(unit, arg)) {
    throw ContractViolation("argument " + ArgumentName(arg) +
                            " is not valid for " +
                            std::string(UnitName(unit)));
  }
}

std::string ToString(const UnitArgPair &pair) {
  return std::string(UnitName(pair.unit())) + " " + ArgumentName(pair.arg());
}

UnitArgPair ParsePair(std::string_view text) {
  size_t space = text.find(' ');
  if (space == std::string_view::npos ||
      text.find(' ', space + 1) != std::string_view::npos) {
    throw ParseError("expected '<unit> <argument>', got '" +
                     std::string(text) + "'");
  }
  CallableUnit unit = ParseUnit(text.substr(0, space));
  BindingArgument arg = ParseArgument(text.substr(space + 1));
  if (!IsValid(unit, arg)) {
    throw ParseError("argument '" + ArgumentName(arg) + "' is not valid for " +
                     std::string(UnitName(unit)));
  }
  return UnitArgPair(unit, arg);
}

std::vector<UnitArgPair> AllPairs() {
  std::vector<UnitArgPair> pairs;
  for (CallableUnit unit : kAllUnits) {
    for (BindingArgument arg : ValidArguments(unit)) {
      pairs.emplace_back(unit, arg);
    }
  }
  return pairs;
}

std::string ToString(const GroundedTask &task) {
  if (const auto *seq = std::get_if<ActionSequence>(&task)) {
    return "actions " + std::string(ActionName(seq->action)) + " x" +
           std::to_string(seq->count);
  }
  return "goal " + ToString(std::get<GoalTask>(task).reward.proposition);
}

Action PrimitiveActionOf(CallableUnit unit) {
  switch (unit) {
    case CallableUnit::kGoUp: return Action::kNorth;
    case CallableUnit::kGoDown: return Action::kSouth;
    case CallableUnit::kGoLeft: return Action::kWest;
    case CallableUnit::kGoRight: return Action::kEast;
    default:
      throw ContractViolation(std::string(UnitName(unit)) +
                              " is not an action-oriented unit");
  }
}

GroundedTask Ground(const UnitArgPair &pair, const GridMap &map,
                    const GroundedReward &reward_template) {
  if (pair.category() == UnitCategory::kAction) {
    return ActionSequence{PrimitiveActionOf(pair.unit()), pair.arg().steps()};
  }
  Color color = pair.arg().color();
  const Room *match = nullptr;
  for (const Room &room : map.rooms()) {
    if (room.color != color) continue;
    if (match != nullptr) {
      throw GroundingError("more than one " + std::string(ColorName(color)) +
                           " room");
    }
    match = &room;
  }
  if (match == nullptr) {
    throw GroundingError("no " + std::string(ColorName(color)) +
                         " room in this map");
  }
  GroundedReward reward = reward_template;
  reward.proposition = {pair.unit() == CallableUnit::kAgentInRoom
                            ? PropositionKind::kAgentInRoom
                            : PropositionKind::kBlockInRoom,
                        match->id};
  return GoalTask{reward};
}

Trajectory Dispatch(const GroundedTask &task, const GridMap &map,
                    const WorldState &start, const DispatchOptions &options) {
  ExecutionOptions exec{options.slip, options.seed, options.perturb};
  if (const auto *seq = std::get_if<ActionSequence>(&task)) {
    if (seq->count < 1) throw ContractViolation("action count must be >= 1");
    std::vector<Action> actions(seq->count, seq->action);
    return ExecuteActions(map, start, actions, exec);
  }
  const GroundedReward &reward = std::get<GoalTask>(task).reward;
  PlannerOptions planner = options.planner;
  planner.slip = options.slip;
  Policy policy = ValueIteration(map, reward, planner);
  return ExecutePolicy(map, start, policy, reward, options.max_steps, exec);
}

}  // namespace draggn
