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

// Callable units, binding arguments, validity, the grounding lookup and
// dispatch of grounded tasks to the planner or the open-loop executor.

#ifndef DRAGGN_SEMANTICS_H_
#define DRAGGN_SEMANTICS_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "draggn/cleanup_world.h"
#include "draggn/planner.h"

namespace draggn {

enum class CallableUnit : uint8_t {
  kGoUp,
  kGoDown,
  kGoLeft,
  kGoRight,
  kAgentInRoom,
  kBlockInRoom,
};

inline constexpr int kNumUnits = 6;
inline constexpr int kMaxSteps = 8;
inline constexpr int kNumArguments = kMaxSteps + 4;

inline constexpr std::array<CallableUnit, kNumUnits> kAllUnits = {
    CallableUnit::kGoUp,        CallableUnit::kGoDown,
    CallableUnit::kGoLeft,      CallableUnit::kGoRight,
    CallableUnit::kAgentInRoom, CallableUnit::kBlockInRoom};

enum class UnitCategory : uint8_t { kAction, kGoal };

UnitCategory CategoryOf(CallableUnit unit);
std::string_view UnitName(CallableUnit unit);
CallableUnit ParseUnit(std::string_view name);  // throws ParseError

// Binding argument, a dense index in [0, kNumArguments): 0..7 are the step
// counts 1..8, 8..11 are roomIsRed, roomIsGreen, roomIsBlue, roomIsYellow.
class BindingArgument {
 public:
  static BindingArgument Steps(int count);  // 1..8
  static BindingArgument Room(Color color);
  static BindingArgument FromIndex(int index);

  int index() const { return index_; }
  bool is_steps() const { return index_ < kMaxSteps; }
  int steps() const;   // requires is_steps()
  Color color() const;  // requires !is_steps()

  auto operator<=>(const BindingArgument &other) const = default;

 private:
  explicit BindingArgument(int index) : index_(index) {}
  int index_ = 0;
};

std::string ArgumentName(BindingArgument arg);  // "3", "roomIsRed"
BindingArgument ParseArgument(std::string_view name);

// Arguments legal for |unit|, in index order. Never empty.
std::vector<BindingArgument> ValidArguments(CallableUnit unit);
bool IsValid(CallableUnit unit, BindingArgument arg);

// A unit with one binding argument. Construction enforces validity.
class UnitArgPair {
 public:
  // Throws ContractViolation if |arg| is not valid for |unit|.
  UnitArgPair(CallableUnit unit, BindingArgument arg);

  CallableUnit unit() const { return unit_; }
  BindingArgument arg() const { return arg_; }
  UnitCategory category() const { return CategoryOf(unit_); }

  auto operator<=>(const UnitArgPair &other) const = default;

 private:
  CallableUnit unit_;
  BindingArgument arg_;
};

// Canonical text form "goUp 3" / "agentInRoom roomIsRed".
std::string ToString(const UnitArgPair &pair);
UnitArgPair ParsePair(std::string_view text);

// Every valid pair: 4*8 action pairs then 2*4 goal pairs.
std::vector<UnitArgPair> AllPairs();

struct ActionSequence {
  Action action;
  int count;

  bool operator==(const ActionSequence &other) const = default;
};

struct GoalTask {
  GroundedReward reward;

  bool operator==(const GoalTask &other) const = default;
};

using GroundedTask = std::variant<ActionSequence, GoalTask>;

std::string ToString(const GroundedTask &task);

// goUp/goDown/goLeft/goRight map to north/south/west/east.
Action PrimitiveActionOf(CallableUnit unit);

// Resolves a lifted pair against |map|. Goal units look up the unique room
// of the argument's color. Throws GroundingError when no room (or more than
// one) has that color.
GroundedTask Ground(const UnitArgPair &pair, const GridMap &map,
                    const GroundedReward &reward_template = {});

struct DispatchOptions {
  double slip = 0.0;
  uint64_t seed = 0;
  int max_steps = 200;
  PlannerOptions planner;  // planner.slip is overridden by slip
  Perturbation perturb;
};

// ActionSequence runs open loop; GoalTask is solved with value iteration
// and executed closed loop.
Trajectory Dispatch(const GroundedTask &task, const GridMap &map,
                    const WorldState &start,
                    const DispatchOptions &options = {});

}  // namespace draggn

#endif  // DRAGGN_SEMANTICS_H_
