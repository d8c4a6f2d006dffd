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


// Independent reference implementations used as test oracles. Nothing here
// calls into the library's dynamics or layers.

#ifndef DRAGGN_TESTS_ORACLES_H_
#define DRAGGN_TESTS_ORACLES_H_

#include <vector>

#include "draggn/cleanup_world.h"
#include "draggn/neural.h"

namespace draggn::testing {

// Push-rule successor written directly against the cell grid.
WorldState OracleStep(const GridMap &map, const WorldState &state, int dir);

// Shortest number of moves from |start| to any state satisfying |goal|
// under the push rule, by breadth-first search. -1 if unreachable.
int BfsDistance(const GridMap &map, const WorldState &start,
                const PropositionalFunction &goal);

// Element-by-element GRU step with gates stacked [z; r; candidate].
std::vector<double> ReferenceGruStep(const neural::Matrix &w,
                                     const neural::Matrix &u,
                                     const neural::Matrix &b,
                                     const std::vector<double> &x,
                                     const std::vector<double> &h);

}  // namespace draggn::testing

#endif  // DRAGGN_TESTS_ORACLES_H_
