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

// Cleanup World: a grid of uniquely colored rooms joined by corridors and
// doors, one agent and one pushable block (block0).
//
// Coordinates are (row, col). North decreases the row index, east increases
// the column index.

#ifndef DRAGGN_CLEANUP_WORLD_H_
#define DRAGGN_CLEANUP_WORLD_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace draggn {

enum class CellKind : uint8_t { kWall, kFloor, kDoor };

enum class Color : uint8_t { kRed, kGreen, kBlue, kYellow };

inline constexpr std::array<Color, 4> kAllColors = {
    Color::kRed, Color::kGreen, Color::kBlue, Color::kYellow};

// "red", "green", ...
std::string_view ColorName(Color color);

struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell &other) const = default;
};

struct Room {
  std::string id;  // room0, room1, ... in row-major order of first cell
  Color color;
  std::vector<Cell> cells;  // row-major order
};

struct WorldState {
  Cell agent;
  Cell block;

  auto operator<=>(const WorldState &other) const = default;
};

enum class Action : uint8_t { kNorth, kSouth, kEast, kWest };

// Fixed order; also the greedy tie-break order of the planner.
inline constexpr std::array<Action, 4> kAllActions = {
    Action::kNorth, Action::kSouth, Action::kEast, Action::kWest};

std::string_view ActionName(Action action);
Action ParseAction(std::string_view name);

// The neighbouring cell in the direction of |action|, ignoring walls.
Cell Shift(Cell cell, Action action);

class GridMap {
 public:
  int height() const { return height_; }
  int width() const { return width_; }
  bool InBounds(Cell cell) const;
  CellKind kind(Cell cell) const;

  // Floor or door.
  bool IsFree(Cell cell) const;

  const std::vector<Room> &rooms() const { return rooms_; }

  // Throws LookupError for an unknown id.
  const Room &FindRoom(std::string_view id) const;

  // Index into rooms() for the room containing |cell|, or -1 for corridor,
  // doors and walls.
  int RoomIndexAt(Cell cell) const;

  // Free cells in row-major order, and the inverse mapping (-1 if not free).
  const std::vector<Cell> &free_cells() const { return free_cells_; }
  int FreeIndex(Cell cell) const;

  // Agent and block on distinct free cells.
  bool IsValidState(const WorldState &state) const;

  const WorldState &start() const { return start_; }

 private:
  friend GridMap ParseMap(std::string_view text);

  GridMap() = default;

  int height_ = 0;
  int width_ = 0;
  std::vector<CellKind> kinds_;
  std::vector<int> room_index_;
  std::vector<int> free_index_;
  std::vector<Cell> free_cells_;
  std::vector<Room> rooms_;
  WorldState start_;
};

// Parses the ASCII map format:
//
//   #########       one line per row
//   #rr#..A.#       # wall  . corridor  d door  r/g/b/y room floor
//   ...             A agent start  B block start
//   under A=. B=g   glyph beneath A and B
//
// Blank lines and lines starting with ';' are ignored. Rooms are maximal
// 4-connected regions of one color glyph. Throws ParseError naming the
// offending line/column.
GridMap ParseMap(std::string_view text);

// Inverse of ParseMap for |state| (canonical form, no comments).
std::string RenderMap(const GridMap &map, const WorldState &state);
inline std::string RenderMap(const GridMap &map) {
  return RenderMap(map, map.start());
}

// The shipped 11x11 fixture with red, green and blue rooms.
std::string_view DefaultMapText();
const GridMap &DefaultMap();

struct Outcome {
  WorldState state;
  double probability;
};

// Successor distribution. With probability 1-slip the intended action
// applies, otherwise one of the other three uniformly. Identical successors
// are merged; the intended outcome comes first. Throws ContractViolation
// for an invalid state or slip outside [0, 1).
std::vector<Outcome> Transition(const GridMap &map, const WorldState &state,
                                Action action, double slip);

// Deterministic successor (slip = 0). Walls block; moving into the block
// pushes it if the cell beyond is free, otherwise nothing moves.
WorldState NextState(const GridMap &map, const WorldState &state,
                     Action action);

enum class PropositionKind : uint8_t { kAgentInRoom, kBlockInRoom };

struct PropositionalFunction {
  PropositionKind kind;
  std::string room;

  bool operator==(const PropositionalFunction &other) const = default;
};

// "agentInRoom room0", "blockInRoom block0 room1".
std::string ToString(const PropositionalFunction &prop);

// Throws LookupError if the room id does not exist.
bool Evaluate(const PropositionalFunction &prop, const GridMap &map,
              const WorldState &state);

// All (agent, block) placements on distinct free cells, agent-major in
// free-cell order. Size F*(F-1).
std::vector<WorldState> EnumerateStates(const GridMap &map);

}  // namespace draggn

#endif  // DRAGGN_CLEANUP_WORLD_H_
