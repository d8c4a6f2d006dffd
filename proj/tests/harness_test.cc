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


#include "draggn/harness.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "draggn/errors.h"

namespace draggn {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / ("draggn_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A 60-record corpus file, small enough to train in well under a second.
std::string WriteSmallCorpus(const fs::path &dir) {
  CorpusSpec spec;
  spec.action_train = 40;
  spec.action_test = 8;
  spec.goal_train = 10;
  spec.goal_test = 2;
  std::string path = (dir / "corpus.jsonl").string();
  GenerateCorpusFile(spec, path);
  return path;
}

TEST(RunConfigTest, ParsesListsAndRejectsBadValues) {
  RunConfig config = RunConfigFromKeyValues(ParseKeyValues(
      "model = i-draggn, single-rnn\nseeds = 4,5\nepochs = 3\nsplit = unseen\n"));
  ASSERT_EQ(config.models.size(), 2u);
  EXPECT_EQ(config.models[0], Architecture::kIDraggn);
  EXPECT_EQ(config.seeds, (std::vector<uint64_t>{4, 5}));
  EXPECT_EQ(config.epochs, 3);
  EXPECT_EQ(config.batch, 16);
  EXPECT_EQ(config.split, SplitMode::kUnseen);

  RunConfig back = RunConfigFromKeyValues(RunConfigToKeyValues(config));
  EXPECT_EQ(RenderKeyValues(RunConfigToKeyValues(back)),
            RenderKeyValues(RunConfigToKeyValues(config)));

  EXPECT_THROW(RunConfigFromKeyValues({{"modle", "x"}}), SpecError);
  EXPECT_THROW(RunConfigFromKeyValues({{"model", "lstm"}}), SpecError);
  EXPECT_THROW(RunConfigFromKeyValues({{"seeds", "1,x"}}), SpecError);
  EXPECT_THROW(RunConfigFromKeyValues({{"batch", "0"}}), SpecError);
  EXPECT_THROW(ParseKeyValues("a = 1\na = 2\n"), ParseError);

  RunConfig missing;
  missing.corpus = "/nonexistent/corpus.jsonl";
  EXPECT_THROW(ValidateRunConfig(missing), SpecError);
}

TEST(MetricsReportTest, WeightedOverallAndMeanStdev) {
  MetricsReport report;
  EvalMetrics a, b;
  a.action = {9, 10};
  a.goal = {1, 2};
  b.action = {10, 10};
  b.goal = {2, 2};
  b.unseen = {0, 4};
  report.rows = {{Architecture::kJDraggn, 0, a}, {Architecture::kJDraggn, 1, b}};
  EXPECT_DOUBLE_EQ(a.overall(), 10.0 / 12.0);
  EXPECT_DOUBLE_EQ(b.overall(), 12.0 / 16.0);
  std::string text = report.Render();
  EXPECT_NE(text.find("j-draggn\t0\t9/10\t1/2\t-\t83.3%"), std::string::npos)
      << text;
  EXPECT_NE(text.find("Action-Oriented (Unseen)"), std::string::npos);
  EXPECT_NE(text.find("95.0 ± 7.1%"), std::string::npos) << text;
  EXPECT_NE(text.find("0.0 ± 0.0%"), std::string::npos) << text;
  EXPECT_EQ(text, report.Render());
}

TEST(PipelineTest, TrainEvaluateAndManifests) {
  fs::path dir = TempDir("pipeline");
  RunConfig config;
  config.corpus = WriteSmallCorpus(dir);
  config.models = {Architecture::kSingleRnn, Architecture::kIDraggn};
  config.seeds = {0, 1};
  config.epochs = 2;
  config.out_dir = (dir / "out").string();
  int epochs_seen = 0;
  auto paths = TrainModels(config, [&](Architecture, uint64_t, int, double loss) {
    EXPECT_TRUE(std::isfinite(loss));
    ++epochs_seen;
  });
  EXPECT_EQ(paths.size(), 4u);
  EXPECT_EQ(epochs_seen, 8);
  for (const std::string &p : paths) EXPECT_TRUE(fs::is_regular_file(p));
  EXPECT_TRUE(fs::is_regular_file(
      LossLogPath(config, Architecture::kIDraggn, 1)));

  KeyValues manifest = ReadKeyValueFile((fs::path(config.out_dir) /
                                         "train.manifest").string());
  EXPECT_EQ(manifest.at("seeds"), "0,1");
  EXPECT_EQ(manifest.at("corpus_hash"),
            Fnv1aHex(SerializeCorpus(ReadCorpus(config.corpus))));
  EXPECT_EQ(manifest.at("config_hash").size(), 16u);

  MetricsReport report = EvaluateModels(config);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].metrics.action.total, 8);
  EXPECT_EQ(report.rows[0].metrics.goal.total, 2);
  EXPECT_EQ(report.Render(), EvaluateModels(config).Render());

  config.seeds = {7};
  EXPECT_THROW(EvaluateModels(config), IoError);
}

TEST(PipelineTest, LabelsThatCannotGroundStopTraining) {
  fs::path dir = TempDir("labels");
  std::vector<InstructionRecord> records = {
      MakeRecord("go to the yellow room", ParsePair("agentInRoom roomIsYellow"))};
  WriteCorpus((dir / "c.jsonl").string(), records);
  RunConfig config;
  config.corpus = (dir / "c.jsonl").string();
  config.out_dir = (dir / "out").string();
  EXPECT_THROW(TrainModels(config), SpecError);
}

TEST(ExecuteSegmentsTest, ChainsStatesAndWritesLog) {
  std::vector<InstructionRecord> records = SegmentationFixture();
  TrainConfig train;
  train.epochs = 80;
  train.batch_size = 3;
  train.learning_rate = 0.02;
  ModelConfig small;
  small.embedding_dim = small.hidden_dim = small.feedforward_dim = 16;
  small.init_scale = 0.3;
  auto model = BuildAndTrain(Architecture::kIDraggn, records, small, train);
  const GridMap &map = DefaultMap();
  std::vector<std::string> texts = {"down three spaces", "then up two paces",
                                    "finally left four paces"};
  auto segments = ExecuteSegments(*model, texts, map, map.start());
  ASSERT_EQ(segments.size(), 3u);
  EXPECT_EQ(ToString(segments[0].grounding.pair), "goDown 3");
  EXPECT_EQ(ToString(segments[1].grounding.pair), "goUp 2");
  EXPECT_EQ(ToString(segments[2].grounding.pair), "goLeft 4");
  EXPECT_EQ(segments[1].trajectory.steps[0].state,
            segments[0].trajectory.final_state);
  EXPECT_EQ(segments[2].trajectory.final_state.agent, (Cell{5, 1}));

  nlohmann::json log =
      nlohmann::json::parse(RenderRunLog(map, map.start(), segments));
  EXPECT_EQ(log["segments"].size(), 3u);
  EXPECT_EQ(log["segments"][0]["pair"]["unit"], "goDown");
  EXPECT_EQ(log["segments"][0]["trajectory"].size(), 3u);
  EXPECT_EQ(log["segments"][2]["termination"], "completed-actions");
  EXPECT_EQ(StateFromJson(log["final_state"]),
            segments[2].trajectory.final_state);
  EXPECT_THROW(StateFromJson(nlohmann::json::parse(R"({"agent":[1]})")),
               ParseError);
}

}  // namespace
}  // namespace draggn
