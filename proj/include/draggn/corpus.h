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

// Synthetic instruction corpus: templated paraphrases of single-segment
// action and goal commands, labeled with their unit-argument pair, plus the
// standard and unseen-combination train/test partitions.

#ifndef DRAGGN_CORPUS_H_
#define DRAGGN_CORPUS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "draggn/cleanup_world.h"
#include "draggn/key_value.h"
#include "draggn/semantics.h"

namespace draggn {

enum class Split : uint8_t { kTrain, kTest, kTestUnseen };

std::string_view SplitName(Split split);  // "train", "test", "test-unseen"
Split ParseSplit(std::string_view name);

enum class SplitMode : uint8_t { kStandard, kUnseen };

std::string_view SplitModeName(SplitMode mode);
SplitMode ParseSplitMode(std::string_view name);

// Lowercases, deletes ASCII punctuation and splits on whitespace. Throws
// ParseError when nothing is left.
std::vector<std::string> Tokenize(std::string_view text);

struct InstructionRecord {
  std::string text;
  std::vector<std::string> tokens;
  UnitArgPair label;
  Split split;

  UnitCategory category() const { return label.category(); }
};

InstructionRecord MakeRecord(std::string text, UnitArgPair label,
                             Split split = Split::kTrain);

// goUp 1-5, goDown 1-4, goLeft 1-4, goRight 1,2,3,5: 17 pairs.
std::vector<UnitArgPair> DefaultActionPairs();
// {goUp 4, goDown 3, goLeft 2, goRight 5}
std::vector<UnitArgPair> DefaultHoldout();

struct CorpusSpec {
  int action_train = 2660;
  int action_test = 295;
  int goal_train = 693;
  int goal_test = 86;
  std::string template_set = "default";
  // Probability of adding a filler word to a generated sentence.
  double noise_rate = 0.1;
  uint64_t seed = 7;
  SplitMode mode = SplitMode::kStandard;
  std::vector<UnitArgPair> action_pairs = DefaultActionPairs();
  // Goal pairs are both goal units over these colors.
  std::vector<Color> room_colors = {Color::kRed, Color::kGreen, Color::kBlue};
  std::vector<UnitArgPair> holdout = DefaultHoldout();
};

// Keys: action_train, action_test, goal_train, goal_test, template_set,
// noise_rate, seed, mode (standard|unseen), action_pairs, room_colors,
// holdout. Lists are comma separated ("goUp 4, goDown 3"). Missing keys keep
// their defaults.
CorpusSpec CorpusSpecFromKeyValues(const KeyValues &values);
KeyValues CorpusSpecToKeyValues(const CorpusSpec &spec);

// Throws SpecError. Unseen holdout pairs must be action pairs of the corpus,
// and every unit and step count they use must still occur in some other
// corpus pair.
void ValidateCorpusSpec(const CorpusSpec &spec);

// Deterministic under spec.seed. Records are tagged train/test with the
// exact per-category counts of |spec|; in unseen mode the result is then
// re-partitioned with SplitRecords.
std::vector<InstructionRecord> GenerateCorpus(const CorpusSpec &spec);

// Re-tags |records|. Standard: per category, floor(n / 10) records chosen by
// a seeded shuffle become test, the rest train. Unseen: records labeled with
// a holdout pair become test-unseen, the remainder is split 90/10 as above.
std::vector<InstructionRecord> SplitRecords(
    std::span<const InstructionRecord> records, SplitMode mode,
    std::span<const UnitArgPair> holdout, uint64_t seed);

// Every phrasing the default templates can produce for |pair| (without
// filler noise). Empty if the pair cannot be realized.
std::vector<std::string> Realizations(const UnitArgPair &pair);

// The three pre-segmented clauses of "Down three paces, then up two paces,
// finally left four paces" with labels goDown 3, goUp 2, goLeft 4.
std::vector<InstructionRecord> SegmentationFixture();

// One JSON object per line: {"text","unit","arg","category","split"}.
std::string SerializeRecord(const InstructionRecord &record);
InstructionRecord ParseRecord(std::string_view line);  // throws ParseError
std::string SerializeCorpus(std::span<const InstructionRecord> records);
std::vector<InstructionRecord> ParseCorpus(std::string_view text);

void WriteCorpus(const std::string &path,
                 std::span<const InstructionRecord> records);
std::vector<InstructionRecord> ReadCorpus(const std::string &path);

std::vector<InstructionRecord> Filter(std::span<const InstructionRecord> records,
                                      Split split);

}  // namespace draggn

#endif  // DRAGGN_CORPUS_H_
