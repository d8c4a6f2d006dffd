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


#include "oracles.h"

#include <cmath>
#include <deque>
#include <map>

namespace draggn::testing {

namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};  // north, south, east, west
constexpr int kDc[4] = {0, 0, 1, -1};

bool Open(const GridMap &map, int r, int c) {
  if (r < 0 || c < 0 || r >= map.height() || c >= map.width()) return false;
  return map.kind({r, c}) != CellKind::kWall;
}

bool Holds(const GridMap &map, const PropositionalFunction &goal,
           const WorldState &s) {
  const Cell who = goal.kind == PropositionKind::kAgentInRoom ? s.agent : s.block;
  for (const Room &room : map.rooms()) {
    if (room.id != goal.room) continue;
    for (Cell c : room.cells) {
      if (c.row == who.row && c.col == who.col) return true;
    }
  }
  return false;
}

}  // namespace

WorldState OracleStep(const GridMap &map, const WorldState &state, int dir) {
  int ar = state.agent.row + kDr[dir], ac = state.agent.col + kDc[dir];
  if (!Open(map, ar, ac)) return state;
  if (ar == state.block.row && ac == state.block.col) {
    int br = ar + kDr[dir], bc = ac + kDc[dir];
    if (!Open(map, br, bc)) return state;
    return {{ar, ac}, {br, bc}};
  }
  return {{ar, ac}, state.block};
}

int BfsDistance(const GridMap &map, const WorldState &start,
                const PropositionalFunction &goal) {
  std::map<WorldState, int> dist;
  std::deque<WorldState> queue;
  dist[start] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    WorldState s = queue.front();
    queue.pop_front();
    if (Holds(map, goal, s)) return dist[s];
    for (int dir = 0; dir < 4; ++dir) {
      WorldState t = OracleStep(map, s, dir);
      if (dist.emplace(t, dist[s] + 1).second) queue.push_back(t);
    }
  }
  return -1;
}

std::vector<double> ReferenceGruStep(const neural::Matrix &w,
                                     const neural::Matrix &u,
                                     const neural::Matrix &b,
                                     const std::vector<double> &x,
                                     const std::vector<double> &h) {
  const size_t n = h.size();
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  auto affine = [&](size_t row, const std::vector<double> &hh) {
    double acc = b(row, 0);
    for (size_t j = 0; j < x.size(); ++j) acc += w(row, j) * x[j];
    for (size_t j = 0; j < n; ++j) acc += u(row, j) * hh[j];
    return acc;
  };
  std::vector<double> z(n), r(n), rh(n), out(n);
  for (size_t i = 0; i < n; ++i) {
    z[i] = sigmoid(affine(i, h));
    r[i] = sigmoid(affine(n + i, h));
  }
  for (size_t i = 0; i < n; ++i) rh[i] = r[i] * h[i];
  for (size_t i = 0; i < n; ++i) {
    double cand = std::tanh(affine(2 * n + i, rh));
    out[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
  }
  return out;
}

}  // namespace draggn::testing
