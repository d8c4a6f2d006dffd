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

#include "draggn/cleanup_world.h"

#include <algorithm>
#include <deque>
#include <sstream>

#include "draggn/errors.h"

namespace draggn {

namespace {

// Default fixture. Doors connect each room to the two-row corridor.
constexpr std::string_view kDefaultMap =
    "###########\n"
    "#rrrr#gggg#\n"
    "#rrrr#gggg#\n"
    "#rrrr#gggg#\n"
    "##d####d###\n"
    "#....A....#\n"
    "#..B......#\n"
    "####d######\n"
    "#bbbbbbbbb#\n"
    "#bbbbbbbbb#\n"
    "###########\n"
    "under A=. B=.\n";

std::optional<Color> ColorOfGlyph(char glyph) {
  switch (glyph) {
    case 'r': return Color::kRed;
    case 'g': return Color::kGreen;
    case 'b': return Color::kBlue;
    case 'y': return Color::kYellow;
    default: return std::nullopt;
  }
}

char GlyphOfColor(Color color) {
  switch (color) {
    case Color::kRed: return 'r';
    case Color::kGreen: return 'g';
    case Color::kBlue: return 'b';
    case Color::kYellow: return 'y';
  }
  return '?';
}

bool IsCellGlyph(char glyph) {
  return glyph == '#' || glyph == '.' || glyph == 'd' ||
         ColorOfGlyph(glyph).has_value();
}

struct Line {
  int number;
  std::string text;
};

}  // namespace

std::string_view ColorName(Color color) {
  switch (color) {
    case Color::kRed: return "red";
    case Color::kGreen: return "green";
    case Color::kBlue: return "blue";
    case Color::kYellow: return "yellow";
  }
  return "?";
}

std::string_view ActionName(Action action) {
  switch (action) {
    case Action::kNorth: return "north";
    case Action::kSouth: return "south";
    case Action::kEast: return "east";
    case Action::kWest: return "west";
  }
  return "?";
}

Action ParseAction(std::string_view name) {
  for (Action action : kAllActions) {
    if (ActionName(action) == name) return action;
  }
  throw ParseError("unknown action '" + std::string(name) + "'");
}

Cell Shift(Cell cell, Action action) {
  switch (action) {
    case Action::kNorth: return {cell.row - 1, cell.col};
    case Action::kSouth: return {cell.row + 1, cell.col};
    case Action::kEast: return {cell.row, cell.col + 1};
    case Action::kWest: return {cell.row, cell.col - 1};
  }
  return cell;
}

bool GridMap::InBounds(Cell cell) const {
  return cell.row >= 0 && cell.row < height_ && cell.col >= 0 &&
         cell.col < width_;
}

CellKind GridMap::kind(Cell cell) const {
  if (!InBounds(cell)) return CellKind::kWall;
  return kinds_[cell.row * width_ + cell.col];
}

bool GridMap::IsFree(Cell cell) const {
  return kind(cell) != CellKind::kWall;
}

const Room &GridMap::FindRoom(std::string_view id) const {
  for (const Room &room : rooms_) {
    if (room.id == id) return room;
  }
  throw LookupError("unknown room '" + std::string(id) + "'");
}

int GridMap::RoomIndexAt(Cell cell) const {
  if (!InBounds(cell)) return -1;
  return room_index_[cell.row * width_ + cell.col];
}

int GridMap::FreeIndex(Cell cell) const {
  if (!InBounds(cell)) return -1;
  return free_index_[cell.row * width_ + cell.col];
}

bool GridMap::IsValidState(const WorldState &state) const {
  return IsFree(state.agent) && IsFree(state.block) &&
         state.agent != state.block;
}

GridMap ParseMap(std::string_view text) {
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.empty() || raw[0] == ';') continue;
      lines.push_back({number, raw});
    }
  }
  if (lines.empty()) throw ParseError("empty map");

  // Metadata line.
  const Line meta = lines.back();
  if (meta.text.rfind("under", 0) != 0) {
    throw ParseError("missing 'under A=<glyph> B=<glyph>' line",
                     meta.number, 1);
  }
  lines.pop_back();
  char under_agent = 0, under_block = 0;
  {
    std::istringstream in(meta.text.substr(5));
    std::string item;
    while (in >> item) {
      if (item.size() != 3 || item[1] != '=' ||
          (item[0] != 'A' && item[0] != 'B')) {
        throw ParseError("bad metadata item '" + item + "'", meta.number,
                         static_cast<int>(meta.text.find(item)) + 1);
      }
      char glyph = item[2];
      if (!IsCellGlyph(glyph) || glyph == '#') {
        throw ParseError(std::string("invalid underlying glyph '") + glyph +
                             "'",
                         meta.number,
                         static_cast<int>(meta.text.find(item)) + 3);
      }
      (item[0] == 'A' ? under_agent : under_block) = glyph;
    }
  }
  if (lines.empty()) throw ParseError("map has no rows", meta.number, 1);

  GridMap map;
  map.height_ = static_cast<int>(lines.size());
  map.width_ = static_cast<int>(lines[0].text.size());
  const int h = map.height_, w = map.width_;
  std::vector<char> glyphs(h * w);
  std::optional<Cell> agent, block;
  for (int r = 0; r < h; ++r) {
    const Line &line = lines[r];
    if (static_cast<int>(line.text.size()) != w) {
      throw ParseError("row has " + std::to_string(line.text.size()) +
                           " cells, expected " + std::to_string(w),
                       line.number, static_cast<int>(line.text.size()) + 1);
    }
    for (int c = 0; c < w; ++c) {
      char glyph = line.text[c];
      if (glyph == 'A' || glyph == 'B') {
        std::optional<Cell> &slot = glyph == 'A' ? agent : block;
        if (slot) {
          throw ParseError(std::string("duplicate '") + glyph + "'",
                           line.number, c + 1);
        }
        slot = Cell{r, c};
        char under = glyph == 'A' ? under_agent : under_block;
        if (under == 0) {
          throw ParseError(std::string("no underlying glyph given for '") +
                               glyph + "'",
                           meta.number, 1);
        }
        glyph = under;
      } else if (!IsCellGlyph(glyph)) {
        throw ParseError(std::string("unknown glyph '") + glyph + "'",
                         line.number, c + 1);
      }
      bool border = r == 0 || c == 0 || r == h - 1 || c == w - 1;
      if (border && glyph != '#') {
        throw ParseError("border cell is not a wall", line.number, c + 1);
      }
      glyphs[r * w + c] = glyph;
    }
  }
  if (!agent) throw ParseError("map has no agent 'A'");
  if (!block) throw ParseError("map has no block 'B'");

  map.kinds_.resize(h * w);
  map.room_index_.assign(h * w, -1);
  map.free_index_.assign(h * w, -1);
  for (int i = 0; i < h * w; ++i) {
    char glyph = glyphs[i];
    map.kinds_[i] = glyph == '#'   ? CellKind::kWall
                    : glyph == 'd' ? CellKind::kDoor
                                   : CellKind::kFloor;
    if (glyph != '#') {
      map.free_index_[i] = static_cast<int>(map.free_cells_.size());
      map.free_cells_.push_back({i / w, i % w});
    }
  }

  // Rooms: flood fill same-color regions.
  for (int i = 0; i < h * w; ++i) {
    std::optional<Color> color = ColorOfGlyph(glyphs[i]);
    if (!color || map.room_index_[i] != -1) continue;
    for (const Room &room : map.rooms_) {
      if (room.color == *color) {
        throw ParseError(
            "duplicate room color '" + std::string(ColorName(*color)) + "'",
            lines[i / w].number, i % w + 1);
      }
    }
    Room room{"room" + std::to_string(map.rooms_.size()), *color, {}};
    int index = static_cast<int>(map.rooms_.size());
    std::deque<int> queue{i};
    map.room_index_[i] = index;
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      room.cells.push_back({cur / w, cur % w});
      for (Action action : kAllActions) {
        Cell next = Shift({cur / w, cur % w}, action);
        if (!map.InBounds(next)) continue;
        int j = next.row * w + next.col;
        if (glyphs[j] == glyphs[i] && map.room_index_[j] == -1) {
          map.room_index_[j] = index;
          queue.push_back(j);
        }
      }
    }
    std::sort(room.cells.begin(), room.cells.end());
    map.rooms_.push_back(std::move(room));
  }
  if (map.rooms_.size() < 2) {
    throw ParseError("map needs at least two rooms");
  }

  map.start_ = {*agent, *block};
  return map;
}

std::string RenderMap(const GridMap &map, const WorldState &state) {
  auto glyph_at = [&](Cell cell) {
    switch (map.kind(cell)) {
      case CellKind::kWall: return '#';
      case CellKind::kDoor: return 'd';
      case CellKind::kFloor: break;
    }
    int room = map.RoomIndexAt(cell);
    return room < 0 ? '.' : GlyphOfColor(map.rooms()[room].color);
  };
  std::string out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      Cell cell{r, c};
      if (cell == state.agent) {
        out += 'A';
      } else if (cell == state.block) {
        out += 'B';
      } else {
        out += glyph_at(cell);
      }
    }
    out += '\n';
  }
  out += "under A=";
  out += glyph_at(state.agent);
  out += " B=";
  out += glyph_at(state.block);
  out += '\n';
  return out;
}

std::string_view DefaultMapText() { return kDefaultMap; }

const GridMap &DefaultMap() {
  static const GridMap map = ParseMap(kDefaultMap);
  return map;
}

WorldState NextState(const GridMap &map, const WorldState &state,
                     Action action) {
  Cell target = Shift(state.agent, action);
  if (!map.IsFree(target)) return state;
  if (target == state.block) {
    Cell pushed = Shift(state.block, action);
    if (!map.IsFree(pushed)) return state;
    return {target, pushed};
  }
  return {target, state.block};
}

std::vector<Outcome> Transition(const GridMap &map, const WorldState &state,
                                Action action, double slip) {
  if (!map.IsValidState(state)) {
    throw ContractViolation("state is not valid for this map");
  }
  if (!(slip >= 0.0 && slip < 1.0)) {
    throw ContractViolation("slip must lie in [0, 1)");
  }
  std::vector<Outcome> outcomes;
  auto add = [&](const WorldState &next, double p) {
    for (Outcome &outcome : outcomes) {
      if (outcome.state == next) {
        outcome.probability += p;
        return;
      }
    }
    outcomes.push_back({next, p});
  };
  add(NextState(map, state, action), 1.0 - slip);
  if (slip > 0.0) {
    for (Action other : kAllActions) {
      if (other != action) add(NextState(map, state, other), slip / 3.0);
    }
  }
  return outcomes;
}

std::string ToString(const PropositionalFunction &prop) {
  return prop.kind == PropositionKind::kAgentInRoom
             ? "agentInRoom " + prop.room
             : "blockInRoom block0 " + prop.room;
}

bool Evaluate(const PropositionalFunction &prop, const GridMap &map,
              const WorldState &state) {
  const Room &room = map.FindRoom(prop.room);
  Cell cell =
      prop.kind == PropositionKind::kAgentInRoom ? state.agent : state.block;
  int index = map.RoomIndexAt(cell);
  return index >= 0 && map.rooms()[index].id == room.id;
}

std::vector<WorldState> EnumerateStates(const GridMap &map) {
  const auto &free = map.free_cells();
  std::vector<WorldState> states;
  states.reserve(free.size() * (free.size() - 1));
  for (const Cell &agent : free) {
    for (const Cell &block : free) {
      if (agent != block) states.push_back({agent, block});
    }
  }
  return states;
}

}  // namespace draggn
