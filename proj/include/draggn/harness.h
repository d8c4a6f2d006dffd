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

// End-to-end driver: run configuration, corpus generation, training,
// evaluation reports, grounding, execution and run logs. The CLI and the
// HTTP service are thin layers over these functions.

#ifndef DRAGGN_HARNESS_H_
#define DRAGGN_HARNESS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "draggn/cleanup_world.h"
#include "draggn/corpus.h"
#include "draggn/key_value.h"
#include "draggn/models.h"
#include "draggn/planner.h"
#include "draggn/semantics.h"
#include "json.hpp"

namespace draggn {

// Keys of the flat config file (all optional):
//   map          ASCII map path ("" = built-in default map)
//   corpus       JSONL corpus path; when empty the corpus is generated
//   corpus_spec  key=value corpus spec path ("" = defaults)
//   model        comma list of single-rnn, j-draggn, i-draggn
//   seeds        comma list of unsigned integers
//   epochs, batch, lr
//   split        standard | unseen (applies to generated corpora)
//   out_dir      directory for checkpoints, logs, reports and manifests
struct RunConfig {
  std::string map;
  std::string corpus;
  std::string corpus_spec;
  std::vector<Architecture> models = {kAllArchitectures.begin(),
                                      kAllArchitectures.end()};
  std::vector<uint64_t> seeds = {0, 1, 2};
  int epochs = 125;
  int batch = 16;
  double lr = 1e-4;
  SplitMode split = SplitMode::kStandard;
  std::string out_dir = "runs";
};

// Throws SpecError for bad values or unknown keys.
RunConfig RunConfigFromKeyValues(const KeyValues &values);
KeyValues RunConfigToKeyValues(const RunConfig &config);
// Referenced files must exist and lists must be non-empty.
void ValidateRunConfig(const RunConfig &config);

// Empty path selects DefaultMap().
GridMap LoadMap(const std::string &path);

// The corpus named by |config| (read from file, or generated from the spec
// with config.split as its mode).
std::vector<InstructionRecord> LoadCorpus(const RunConfig &config);

// Artifact paths inside out_dir.
std::string CheckpointPath(const RunConfig &config, Architecture arch,
                           uint64_t seed);
std::string LossLogPath(const RunConfig &config, Architecture arch,
                        uint64_t seed);

// Reproducibility manifest: command, seeds, FNV-1a hashes of the rendered
// config and of the corpus bytes, plus any extra entries.
KeyValues MakeManifest(const std::string &command, const RunConfig &config,
                       std::span<const InstructionRecord> corpus);
void WriteManifest(const std::string &path, const KeyValues &manifest);

// Generates the corpus of |spec| and writes it as JSONL. Returns the
// records.
std::vector<InstructionRecord> GenerateCorpusFile(const CorpusSpec &spec,
                                                  const std::string &out_path);

// Label consistency checked before any training: every goal label must
// ground on |map| and the training split must be non-empty. Throws
// SpecError.
void CheckTrainable(std::span<const InstructionRecord> corpus,
                    const GridMap &map);

using ProgressFn = std::function<void(Architecture arch, uint64_t seed,
                                      int epoch, double loss)>;

// Trains every (model, seed) of |config| on the train split and writes a
// checkpoint, a per-epoch loss log and train.manifest. Returns the
// checkpoint paths in (model, seed) order.
std::vector<std::string> TrainModels(const RunConfig &config,
                                     const ProgressFn &progress = {});

struct SeedMetrics {
  Architecture arch;
  uint64_t seed;
  EvalMetrics metrics;
};

struct MetricsReport {
  std::vector<SeedMetrics> rows;

  // Per-seed lines followed by a table with one row per model and the
  // columns Action-Oriented, Goal-Oriented, Action-Oriented (Unseen) and
  // Overall, each as mean ± sample stdev in percent. Byte-stable.
  std::string Render() const;
};

// Evaluates the checkpoints of |config| on its test and test-unseen
// records. Throws IoError when a checkpoint is missing.
MetricsReport EvaluateModels(const RunConfig &config);

struct GroundResult {
  UnitArgPair pair;
  GroundedTask task;
};

// Tokenize + predict + ground. Throws ParseError for text with no tokens
// and GroundingError when the predicted goal has no room on |map|.
GroundResult GroundText(const GroundingModel &model, std::string_view text,
                        const GridMap &map);

std::unique_ptr<GroundingModel> LoadModel(const std::string &checkpoint_path);

// JSON forms shared by the run log and the service.
nlohmann::ordered_json StateToJson(const WorldState &state);
WorldState StateFromJson(const nlohmann::json &value);  // throws ParseError
nlohmann::ordered_json PairToJson(const UnitArgPair &pair);
nlohmann::ordered_json TrajectoryToJson(const Trajectory &trajectory);

// One executed segment of an exec run.
struct ExecutedSegment {
  std::string text;
  GroundResult grounding;
  Trajectory trajectory;
};

// Grounds and dispatches each segment in order, starting each from the
// previous final state. options.perturb sees step indices counted across
// all segments.
std::vector<ExecutedSegment> ExecuteSegments(
    const GroundingModel &model, std::span<const std::string> texts,
    const GridMap &map, const WorldState &start,
    const DispatchOptions &options = {});

// Run log: {"map": text, "start": state, "segments": [{"text", "pair",
// "category", "task", "trajectory", "termination", "final_state"}],
// "final_state": state}.
std::string RenderRunLog(const GridMap &map, const WorldState &start,
                         std::span<const ExecutedSegment> segments);

}  // namespace draggn

#endif  // DRAGGN_HARNESS_H_
