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

#include "draggn/corpus.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "draggn/errors.h"
#include "draggn/random.h"
#include "json.hpp"

namespace draggn {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 8> kNumberWords = {
    "one", "two", "three", "four", "five", "six", "seven", "eight"};

const std::vector<std::string> &Verbs() {
  static const std::vector<std::string> verbs = {"go", "move", "walk", "head",
                                                 "travel"};
  return verbs;
}

// Plain direction words for each action unit.
std::vector<std::string> DirectionWords(CallableUnit unit) {
  switch (unit) {
    case CallableUnit::kGoUp: return {"up", "north", "upward"};
    case CallableUnit::kGoDown: return {"down", "south", "downward"};
    case CallableUnit::kGoLeft: return {"left", "west"};
    case CallableUnit::kGoRight: return {"right", "east"};
    default: return {};
  }
}

// Words that can follow "to the".
std::vector<std::string> SideWords(CallableUnit unit) {
  switch (unit) {
    case CallableUnit::kGoUp: return {"north"};
    case CallableUnit::kGoDown: return {"south"};
    case CallableUnit::kGoLeft: return {"left", "west"};
    case CallableUnit::kGoRight: return {"right", "east"};
    default: return {};
  }
}

std::vector<std::string> DistanceWords(int count) {
  if (count == 1) return {"step", "space", "pace", "square"};
  return {"steps", "spaces", "paces", "squares"};
}

std::vector<std::string> NumberForms(int count) {
  return {std::string(kNumberWords[count - 1]), std::to_string(count)};
}

const std::vector<std::string> &Objects() {
  static const std::vector<std::string> objects = {"block", "chair", "box",
                                                   "basket"};
  return objects;
}

const std::vector<std::string> &Fillers() {
  static const std::vector<std::string> fillers = {
      "please", "now", "robot", "okay", "quickly", "just"};
  return fillers;
}

// Expands "{a}" slots left to right over the given alternatives.
void Expand(const std::string &frame,
            const std::map<std::string, std::vector<std::string>> &slots,
            std::vector<std::string> &out) {
  size_t open = frame.find('{');
  if (open == std::string::npos) {
    out.push_back(frame);
    return;
  }
  size_t close = frame.find('}', open);
  std::string name = frame.substr(open + 1, close - open - 1);
  for (const std::string &choice : slots.at(name)) {
    Expand(frame.substr(0, open) + choice + frame.substr(close + 1), slots,
           out);
  }
}

std::vector<std::string> ActionRealizations(CallableUnit unit, int count) {
  static const std::vector<std::string> frames = {
      "{verb} {dir} {num} {dist}",
      "{verb} {num} {dist} {dir}",
      "{dir} {num} {dist}",
      "then {dir} {num} {dist}",
      "finally {dir} {num} {dist}",
      "{num} {dist} {dir}",
      "take {num} {dist} {dir}",
      "{verb} {num} {dist} to the {side}",
      "{num} {dist} to the {side}",
  };
  std::map<std::string, std::vector<std::string>> slots = {
      {"verb", Verbs()},
      {"dir", DirectionWords(unit)},
      {"side", SideWords(unit)},
      {"num", NumberForms(count)},
      {"dist", DistanceWords(count)},
  };
  std::vector<std::string> out;
  for (const std::string &frame : frames) Expand(frame, slots, out);
  return out;
}

std::vector<std::string> GoalRealizations(CallableUnit unit, Color color) {
  static const std::vector<std::string> agent_frames = {
      "go to the {color} room",    "move into the {color} room",
      "walk to the {color} room",  "head into the {color} room",
      "enter the {color} room",    "navigate to the {color} room",
      "go into the {color} room",
  };
  static const std::vector<std::string> block_frames = {
      "put the {obj} in the {color} room",
      "take the {obj} to the {color} room",
      "push the {obj} into the {color} room",
      "move the {obj} to the {color} room",
      "bring the {obj} to the {color} room",
      "place the {obj} in the {color} room",
  };
  std::map<std::string, std::vector<std::string>> slots = {
      {"color", {std::string(ColorName(color))}},
      {"obj", Objects()},
  };
  std::vector<std::string> out;
  const auto &frames =
      unit == CallableUnit::kAgentInRoom ? agent_frames : block_frames;
  for (const std::string &frame : frames) Expand(frame, slots, out);
  return out;
}

// Optional filler word and sentence-style surface form.
std::string Decorate(std::string text, double noise_rate, Rng &rng) {
  if (rng.Bernoulli(noise_rate)) {
    const std::string &filler = Fillers()[rng.Below(Fillers().size())];
    text = rng.Bernoulli(0.5) ? filler + " " + text : text + " " + filler;
  }
  if (rng.Bernoulli(0.5)) text[0] = static_cast<char>(std::toupper(text[0]));
  if (rng.Bernoulli(0.5)) text += ".";
  return text;
}

std::string PairListText(const std::vector<UnitArgPair> &pairs) {
  std::string out;
  for (const UnitArgPair &pair : pairs) {
    if (!out.empty()) out += ", ";
    out += ToString(pair);
  }
  return out;
}

std::vector<UnitArgPair> ParsePairList(const std::string &text) {
  std::vector<UnitArgPair> pairs;
  for (const std::string &item : SplitList(text)) {
    try {
      pairs.push_back(ParsePair(item));
    } catch (const ParseError &e) {
      throw SpecError(e.what());
    }
  }
  return pairs;
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kTestUnseen: return "test-unseen";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  for (Split split : {Split::kTrain, Split::kTest, Split::kTestUnseen}) {
    if (SplitName(split) == name) return split;
  }
  throw ParseError("unknown split '" + std::string(name) + "'");
}

std::string_view SplitModeName(SplitMode mode) {
  return mode == SplitMode::kStandard ? "standard" : "unseen";
}

SplitMode ParseSplitMode(std::string_view name) {
  if (name == "standard") return SplitMode::kStandard;
  if (name == "unseen") return SplitMode::kUnseen;
  throw ParseError("unknown split mode '" + std::string(name) + "'");
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(c)) {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.empty()) {
    throw ParseError("no tokens in '" + std::string(text) + "'");
  }
  return tokens;
}

InstructionRecord MakeRecord(std::string text, UnitArgPair label,
                             Split split) {
  std::vector<std::string> tokens = Tokenize(text);
  return {std::move(text), std::move(tokens), label, split};
}

std::vector<UnitArgPair> DefaultActionPairs() {
  std::vector<UnitArgPair> pairs;
  auto add = [&](CallableUnit unit, std::initializer_list<int> counts) {
    for (int n : counts) pairs.emplace_back(unit, BindingArgument::Steps(n));
  };
  add(CallableUnit::kGoUp, {1, 2, 3, 4, 5});
  add(CallableUnit::kGoDown, {1, 2, 3, 4});
  add(CallableUnit::kGoLeft, {1, 2, 3, 4});
  add(CallableUnit::kGoRight, {1, 2, 3, 5});
  return pairs;
}

std::vector<UnitArgPair> DefaultHoldout() {
  return {
      {CallableUnit::kGoUp, BindingArgument::Steps(4)},
      {CallableUnit::kGoDown, BindingArgument::Steps(3)},
      {CallableUnit::kGoLeft, BindingArgument::Steps(2)},
      {CallableUnit::kGoRight, BindingArgument::Steps(5)},
  };
}

CorpusSpec CorpusSpecFromKeyValues(const KeyValues &values) {
  static const std::set<std::string> known = {
      "action_train", "action_test", "goal_train",   "goal_test",
      "template_set", "noise_rate",  "seed",         "mode",
      "action_pairs", "room_colors", "holdout"};
  for (const auto &[key, value] : values) {
    if (!known.count(key)) throw SpecError("unknown corpus spec key '" + key + "'");
  }
  CorpusSpec spec;
  spec.action_train = GetInt(values, "action_train", spec.action_train);
  spec.action_test = GetInt(values, "action_test", spec.action_test);
  spec.goal_train = GetInt(values, "goal_train", spec.goal_train);
  spec.goal_test = GetInt(values, "goal_test", spec.goal_test);
  spec.template_set = GetString(values, "template_set", spec.template_set);
  spec.noise_rate = GetDouble(values, "noise_rate", spec.noise_rate);
  spec.seed = GetUint64(values, "seed", spec.seed);
  try {
    spec.mode = ParseSplitMode(GetString(values, "mode", "standard"));
  } catch (const ParseError &e) {
    throw SpecError(e.what());
  }
  if (values.count("action_pairs")) {
    spec.action_pairs = ParsePairList(values.at("action_pairs"));
  }
  if (values.count("holdout")) {
    spec.holdout = ParsePairList(values.at("holdout"));
  }
  if (values.count("room_colors")) {
    spec.room_colors.clear();
    for (const std::string &name : SplitList(values.at("room_colors"))) {
      auto it = std::find_if(kAllColors.begin(), kAllColors.end(),
                             [&](Color c) { return ColorName(c) == name; });
      if (it == kAllColors.end()) {
        throw SpecError("unknown room color '" + name + "'");
      }
      spec.room_colors.push_back(*it);
    }
  }
  return spec;
}

KeyValues CorpusSpecToKeyValues(const CorpusSpec &spec) {
  KeyValues values;
  values["action_train"] = std::to_string(spec.action_train);
  values["action_test"] = std::to_string(spec.action_test);
  values["goal_train"] = std::to_string(spec.goal_train);
  values["goal_test"] = std::to_string(spec.goal_test);
  values["template_set"] = spec.template_set;
  std::ostringstream noise;
  noise << spec.noise_rate;
  values["noise_rate"] = noise.str();
  values["seed"] = std::to_string(spec.seed);
  values["mode"] = std::string(SplitModeName(spec.mode));
  values["action_pairs"] = PairListText(spec.action_pairs);
  values["holdout"] = PairListText(spec.holdout);
  std::string colors;
  for (Color c : spec.room_colors) {
    if (!colors.empty()) colors += ", ";
    colors += ColorName(c);
  }
  values["room_colors"] = colors;
  return values;
}

void ValidateCorpusSpec(const CorpusSpec &spec) {
  if (spec.template_set != "default") {
    throw SpecError("unknown template set '" + spec.template_set + "'");
  }
  if (spec.action_train < 0 || spec.action_test < 0 || spec.goal_train < 0 ||
      spec.goal_test < 0) {
    throw SpecError("record counts must be non-negative");
  }
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0)) {
    throw SpecError("noise_rate must lie in [0, 1]");
  }
  if (spec.action_pairs.empty() && spec.action_train + spec.action_test > 0) {
    throw SpecError("action records requested but no action pairs given");
  }
  if (spec.room_colors.empty() && spec.goal_train + spec.goal_test > 0) {
    throw SpecError("goal records requested but no room colors given");
  }
  std::set<UnitArgPair> pairs;
  for (const UnitArgPair &pair : spec.action_pairs) {
    if (pair.category() != UnitCategory::kAction) {
      throw SpecError("action_pairs may only hold action-oriented pairs, got " +
                      ToString(pair));
    }
    if (!pairs.insert(pair).second) {
      throw SpecError("duplicate action pair " + ToString(pair));
    }
  }
  std::set<UnitArgPair> holdout(spec.holdout.begin(), spec.holdout.end());
  for (const UnitArgPair &pair : spec.holdout) {
    if (pair.category() != UnitCategory::kAction) {
      throw SpecError("holdout pair " + ToString(pair) +
                      " is not action-oriented");
    }
    if (!pairs.count(pair)) {
      throw SpecError("holdout pair " + ToString(pair) +
                      " is not one of the corpus action pairs");
    }
    bool unit_covered = false, count_covered = false;
    for (const UnitArgPair &other : spec.action_pairs) {
      if (holdout.count(other)) continue;
      unit_covered |= other.unit() == pair.unit();
      count_covered |= other.arg() == pair.arg();
    }
    if (!unit_covered) {
      throw SpecError("holdout pair " + ToString(pair) + ": unit " +
                      std::string(UnitName(pair.unit())) +
                      " has no other training partner");
    }
    if (!count_covered) {
      throw SpecError("holdout pair " + ToString(pair) + ": count " +
                      ArgumentName(pair.arg()) +
                      " has no other training partner");
    }
  }
}

std::vector<std::string> Realizations(const UnitArgPair &pair) {
  if (pair.category() == UnitCategory::kAction) {
    return ActionRealizations(pair.unit(), pair.arg().steps());
  }
  return GoalRealizations(pair.unit(), pair.arg().color());
}

std::vector<InstructionRecord> GenerateCorpus(const CorpusSpec &spec) {
  ValidateCorpusSpec(spec);
  Rng rng(spec.seed);

  std::vector<UnitArgPair> goal_pairs;
  for (CallableUnit unit :
       {CallableUnit::kAgentInRoom, CallableUnit::kBlockInRoom}) {
    for (Color color : spec.room_colors) {
      goal_pairs.emplace_back(unit, BindingArgument::Room(color));
    }
  }
  std::map<UnitArgPair, std::vector<std::string>> phrasings;
  for (const std::vector<UnitArgPair> *list :
       {&spec.action_pairs, &std::as_const(goal_pairs)}) {
    for (const UnitArgPair &pair : *list) phrasings[pair] = Realizations(pair);
  }

  // Labels cycle through the pair list so every pair gets an equal share;
  // shuffling then decides which records are held out for test.
  auto make = [&](const std::vector<UnitArgPair> &pairs, int train,
                  int test) {
    std::vector<InstructionRecord> records;
    for (int i = 0; i < train + test; ++i) {
      const UnitArgPair &pair = pairs[i % pairs.size()];
      const auto &options = phrasings.at(pair);
      std::string text = Decorate(options[rng.Below(options.size())],
                                  spec.noise_rate, rng);
      records.push_back(MakeRecord(std::move(text), pair));
    }
    rng.Shuffle(std::span(records));
    for (int i = 0; i < test; ++i) records[i].split = Split::kTest;
    return records;
  };
  std::vector<InstructionRecord> records;
  if (spec.action_train + spec.action_test > 0) {
    records = make(spec.action_pairs, spec.action_train, spec.action_test);
  }
  if (spec.goal_train + spec.goal_test > 0) {
    auto goals = make(goal_pairs, spec.goal_train, spec.goal_test);
    records.insert(records.end(), goals.begin(), goals.end());
  }
  rng.Shuffle(std::span(records));

  if (spec.mode == SplitMode::kUnseen) {
    return SplitRecords(records, SplitMode::kUnseen, spec.holdout,
                        MixSeed(spec.seed, 1));
  }
  return records;
}

std::vector<InstructionRecord> SplitRecords(
    std::span<const InstructionRecord> records, SplitMode mode,
    std::span<const UnitArgPair> holdout, uint64_t seed) {
  std::vector<InstructionRecord> out(records.begin(), records.end());
  Rng rng(seed);
  std::set<UnitArgPair> held;
  if (mode == SplitMode::kUnseen) held.insert(holdout.begin(), holdout.end());
  for (UnitCategory category : {UnitCategory::kAction, UnitCategory::kGoal}) {
    std::vector<size_t> members;
    for (size_t i = 0; i < out.size(); ++i) {
      if (out[i].category() != category) continue;
      if (held.count(out[i].label)) {
        out[i].split = Split::kTestUnseen;
      } else {
        members.push_back(i);
      }
    }
    rng.Shuffle(std::span(members));
    const size_t test = members.size() / 10;
    for (size_t k = 0; k < members.size(); ++k) {
      out[members[k]].split = k < test ? Split::kTest : Split::kTrain;
    }
  }
  return out;
}

std::vector<InstructionRecord> SegmentationFixture() {
  return {
      MakeRecord("down three spaces",
                 {CallableUnit::kGoDown, BindingArgument::Steps(3)}),
      MakeRecord("then up two paces",
                 {CallableUnit::kGoUp, BindingArgument::Steps(2)}),
      MakeRecord("finally left four paces",
                 {CallableUnit::kGoLeft, BindingArgument::Steps(4)}),
  };
}

std::string SerializeRecord(const InstructionRecord &record) {
  Json j;
  j["text"] = record.text;
  j["unit"] = UnitName(record.label.unit());
  j["arg"] = ArgumentName(record.label.arg());
  j["category"] =
      record.category() == UnitCategory::kAction ? "action" : "goal";
  j["split"] = SplitName(record.split);
  return j.dump();
}

InstructionRecord ParseRecord(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
    CallableUnit unit = ParseUnit(j.at("unit").get<std::string>());
    BindingArgument arg = ParseArgument(j.at("arg").get<std::string>());
    if (!IsValid(unit, arg)) {
      throw ParseError("invalid pair " + std::string(UnitName(unit)) + " " +
                       ArgumentName(arg));
    }
    UnitArgPair label(unit, arg);
    std::string category = j.at("category").get<std::string>();
    std::string expected =
        label.category() == UnitCategory::kAction ? "action" : "goal";
    if (category != expected) {
      throw ParseError("category '" + category + "' does not match unit " +
                       std::string(UnitName(unit)));
    }
    return MakeRecord(j.at("text").get<std::string>(), label,
                      ParseSplit(j.at("split").get<std::string>()));
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("bad corpus record: ") + e.what());
  }
}

std::string SerializeCorpus(std::span<const InstructionRecord> records) {
  std::string out;
  for (const InstructionRecord &record : records) {
    out += SerializeRecord(record);
    out += '\n';
  }
  return out;
}

std::vector<InstructionRecord> ParseCorpus(std::string_view text) {
  std::vector<InstructionRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    try {
      records.push_back(ParseRecord(line));
    } catch (const ParseError &e) {
      throw ParseError(e.what(), number, 1);
    }
  }
  return records;
}

void WriteCorpus(const std::string &path,
                 std::span<const InstructionRecord> records) {
  WriteFile(path, SerializeCorpus(records));
}

std::vector<InstructionRecord> ReadCorpus(const std::string &path) {
  return ParseCorpus(ReadFile(path));
}

std::vector<InstructionRecord> Filter(std::span<const InstructionRecord> records,
                                      Split split) {
  std::vector<InstructionRecord> out;
  for (const InstructionRecord &record : records) {
    if (record.split == split) out.push_back(record);
  }
  return out;
}

}  // namespace draggn
