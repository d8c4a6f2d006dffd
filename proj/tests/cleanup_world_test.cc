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

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "draggn/errors.h"
#include "oracles.h"

namespace draggn {
namespace {

const char kTinyMap[] =
    "######\n"
    "#rAgB#\n"
    "######\n"
    "under A=r B=g\n";

TEST(ParseMapTest, DefaultMapHasThreeColoredRooms) {
  const GridMap &map = DefaultMap();
  EXPECT_EQ(map.height(), 11);
  EXPECT_EQ(map.width(), 11);
  ASSERT_EQ(map.rooms().size(), 3u);
  EXPECT_EQ(map.rooms()[0].color, Color::kRed);
  EXPECT_EQ(map.rooms()[1].color, Color::kGreen);
  EXPECT_EQ(map.rooms()[2].color, Color::kBlue);
  EXPECT_EQ(map.rooms()[1].id, "room1");
  EXPECT_EQ(map.start().agent, (Cell{5, 5}));
  EXPECT_EQ(map.start().block, (Cell{6, 3}));
}

TEST(ParseMapTest, RoundTripsThroughRender) {
  std::string text = RenderMap(DefaultMap());
  EXPECT_EQ(text, DefaultMapText());
  GridMap again = ParseMap(text);
  EXPECT_EQ(RenderMap(again), text);
}

TEST(ParseMapTest, CommentsAndBlankLinesIgnored) {
  GridMap map = ParseMap(std::string("; tiny\n\n") + kTinyMap);
  EXPECT_EQ(map.rooms().size(), 2u);
  EXPECT_EQ(map.RoomIndexAt(map.start().agent), 0);
  EXPECT_EQ(map.RoomIndexAt(map.start().block), 1);
}

TEST(ParseMapTest, RejectsDuplicateColor) {
  const char text[] =
      "#######\n"
      "#rA#rB#\n"
      "#######\n"
      "under A=r B=r\n";
  try {
    ParseMap(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("red"), std::string::npos) << e.what();
  }
}

TEST(ParseMapTest, RejectsRaggedRows) {
  const char text[] =
      "######\n"
      "#rAgB#\n"
      "#####\n"
      "under A=r B=g\n";
  try {
    ParseMap(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseMapTest, RejectsUnknownGlyphWithPosition) {
  const char text[] =
      "######\n"
      "#rAgB#\n"
      "#r?gg#\n"
      "######\n"
      "under A=r B=g\n";
  try {
    ParseMap(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 3);
  }
}

TEST(ParseMapTest, RejectsMissingAgentOrBlock) {
  EXPECT_THROW(ParseMap("#######\n#rr.gB#\n#######\nunder A=. B=g\n"),
               ParseError);
  EXPECT_THROW(ParseMap("######\n#rAgg#\n######\nunder A=r B=g\n"),
               ParseError);
}

TEST(ParseMapTest, RejectsOpenBorderAndSingleRoom) {
  EXPECT_THROW(ParseMap("######\n.rAgB#\n######\nunder A=r B=g\n"),
               ParseError);
  EXPECT_THROW(ParseMap("######\n#rArB#\n######\nunder A=r B=r\n"),
               ParseError);
}

TEST(TransitionTest, WallMoveIsNoOp) {
  const GridMap &map = DefaultMap();
  WorldState s{{1, 1}, {6, 3}};
  auto outcomes = Transition(map, s, Action::kNorth, 0.0);
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_EQ(outcomes[0].state, s);
  EXPECT_EQ(outcomes[0].probability, 1.0);
  EXPECT_EQ(NextState(map, s, Action::kWest), s);
}

TEST(TransitionTest, PushMovesBlockOneCell) {
  const GridMap &map = DefaultMap();
  WorldState s{{2, 2}, {2, 3}};
  WorldState t = NextState(map, s, Action::kEast);
  EXPECT_EQ(t.agent, (Cell{2, 3}));
  EXPECT_EQ(t.block, (Cell{2, 4}));
  // Block against the wall: nothing moves.
  EXPECT_EQ(NextState(map, t, Action::kEast), t);
}

TEST(TransitionTest, SlipSplitsMassOverOtherActions) {
  const GridMap &map = DefaultMap();
  WorldState s{{5, 7}, {8, 5}};  // door above, corridor on the other sides
  auto outcomes = Transition(map, s, Action::kNorth, 0.1);
  ASSERT_EQ(outcomes.size(), 4u);
  EXPECT_EQ(outcomes[0].state.agent, (Cell{4, 7}));
  EXPECT_NEAR(outcomes[0].probability, 0.9, 1e-15);
  for (size_t i = 1; i < outcomes.size(); ++i) {
    EXPECT_NEAR(outcomes[i].probability, 0.1 / 3, 1e-15);
  }
}

TEST(TransitionTest, DistributionsSumToOneEverywhere) {
  const GridMap &map = DefaultMap();
  for (const WorldState &s : EnumerateStates(map)) {
    for (Action a : kAllActions) {
      double total = 0.0;
      for (const Outcome &o : Transition(map, s, a, 0.25)) {
        total += o.probability;
        EXPECT_TRUE(map.IsValidState(o.state));
      }
      ASSERT_NEAR(total, 1.0, 1e-12);
      auto det = Transition(map, s, a, 0.0);
      ASSERT_EQ(det.size(), 1u);
    }
  }
}

TEST(TransitionTest, MatchesOraclePushRule) {
  const GridMap &map = DefaultMap();
  for (const WorldState &s : EnumerateStates(map)) {
    for (int dir = 0; dir < 4; ++dir) {
      ASSERT_EQ(NextState(map, s, kAllActions[dir]),
                testing::OracleStep(map, s, dir));
    }
  }
}

TEST(TransitionTest, RejectsInvalidStateAndSlip) {
  const GridMap &map = DefaultMap();
  EXPECT_THROW(Transition(map, {{0, 0}, {6, 3}}, Action::kNorth, 0.0),
               ContractViolation);
  EXPECT_THROW(Transition(map, {{6, 3}, {6, 3}}, Action::kNorth, 0.0),
               ContractViolation);
  EXPECT_THROW(Transition(map, map.start(), Action::kNorth, 1.0),
               ContractViolation);
}

TEST(EvaluateTest, RoomMembership) {
  const GridMap &map = DefaultMap();
  PropositionalFunction in_green{PropositionKind::kBlockInRoom, "room1"};
  EXPECT_FALSE(Evaluate(in_green, map, map.start()));
  EXPECT_TRUE(Evaluate(in_green, map, {{5, 5}, {2, 7}}));
  PropositionalFunction agent_red{PropositionKind::kAgentInRoom, "room0"};
  EXPECT_TRUE(Evaluate(agent_red, map, {{1, 1}, {6, 3}}));
  EXPECT_EQ(ToString(in_green), "blockInRoom block0 room1");
  EXPECT_EQ(ToString(agent_red), "agentInRoom room0");
  EXPECT_THROW(Evaluate({PropositionKind::kAgentInRoom, "room9"}, map,
                        map.start()),
               LookupError);
}

TEST(EvaluateTest, RoomsAreDisjoint) {
  const GridMap &map = DefaultMap();
  for (const WorldState &s : EnumerateStates(map)) {
    int hits = 0;
    for (const Room &room : map.rooms()) {
      hits += Evaluate({PropositionKind::kAgentInRoom, room.id}, map, s);
    }
    ASSERT_LE(hits, 1);
  }
}

TEST(EnumerateStatesTest, CountMatchesBruteForce) {
  const GridMap &map = DefaultMap();
  int free = 0;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) free += map.IsFree({r, c});
  }
  int pairs = 0;
  for (int a = 0; a < map.height() * map.width(); ++a) {
    for (int b = 0; b < map.height() * map.width(); ++b) {
      Cell ca{a / map.width(), a % map.width()};
      Cell cb{b / map.width(), b % map.width()};
      pairs += a != b && map.IsFree(ca) && map.IsFree(cb);
    }
  }
  std::vector<WorldState> states = EnumerateStates(map);
  EXPECT_EQ(static_cast<int>(states.size()), pairs);
  EXPECT_EQ(pairs, free * (free - 1));
  EXPECT_EQ(std::set<WorldState>(states.begin(), states.end()).size(),
            states.size());
  EXPECT_EQ(EnumerateStates(ParseMap(DefaultMapText())), states);
}

TEST(EnumerateStatesTest, FourFreeCellsGiveTwelve) {
  EXPECT_EQ(EnumerateStates(ParseMap(kTinyMap)).size(), 12u);
}

}  // namespace
}  // namespace draggn
