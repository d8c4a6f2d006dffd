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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "draggn/checkpoint.h"
#include "draggn/errors.h"

namespace draggn {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kRunConfigKeys = {
    "map",  "corpus", "corpus_spec", "model", "seeds",  "epochs",
    "batch", "lr",    "split",       "out_dir"};

std::string Percent(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", 100.0 * x);
  return buffer;
}

// Mean and sample standard deviation of the buckets that have examples.
std::string MeanStdev(const std::vector<Accuracy> &values) {
  std::vector<double> xs;
  for (const Accuracy &a : values) {
    if (a.total > 0) xs.push_back(a.value());
  }
  if (xs.empty()) return "-";
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  double sd = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
  return Percent(mean) + " ± " + Percent(sd) + "%";
}

// Column widths count code points so "±" lines up.
size_t CodePoints(const std::string &text) {
  size_t len = 0;
  for (unsigned char c : text) len += (c & 0xC0) != 0x80;
  return len;
}

std::string Pad(const std::string &text, size_t width) {
  size_t len = CodePoints(text);
  return text + std::string(width > len ? width - len : 0, ' ');
}

}  // namespace

RunConfig RunConfigFromKeyValues(const KeyValues &values) {
  for (const auto &[key, value] : values) {
    if (!kRunConfigKeys.count(key)) {
      throw SpecError("unknown config key '" + key + "'");
    }
  }
  RunConfig config;
  config.map = GetString(values, "map", config.map);
  config.corpus = GetString(values, "corpus", config.corpus);
  config.corpus_spec = GetString(values, "corpus_spec", config.corpus_spec);
  config.out_dir = GetString(values, "out_dir", config.out_dir);
  config.epochs = GetInt(values, "epochs", config.epochs);
  config.batch = GetInt(values, "batch", config.batch);
  config.lr = GetDouble(values, "lr", config.lr);
  try {
    if (values.count("model")) {
      config.models.clear();
      for (const std::string &name : SplitList(values.at("model"))) {
        config.models.push_back(ParseArchitecture(name));
      }
    }
    if (values.count("split")) config.split = ParseSplitMode(values.at("split"));
  } catch (const ParseError &e) {
    throw SpecError(e.what());
  }
  if (values.count("seeds")) {
    config.seeds.clear();
    for (const std::string &item : SplitList(values.at("seeds"))) {
      KeyValues one{{"seeds", item}};
      config.seeds.push_back(GetUint64(one, "seeds", 0));
    }
  }
  if (config.epochs < 0) throw SpecError("epochs must be >= 0");
  if (config.batch <= 0) throw SpecError("batch must be positive");
  if (!(config.lr > 0.0)) throw SpecError("lr must be positive");
  return config;
}

KeyValues RunConfigToKeyValues(const RunConfig &config) {
  KeyValues values;
  values["map"] = config.map;
  values["corpus"] = config.corpus;
  values["corpus_spec"] = config.corpus_spec;
  std::string models, seeds;
  for (Architecture arch : config.models) {
    models += (models.empty() ? "" : ",") + std::string(ArchitectureName(arch));
  }
  for (uint64_t seed : config.seeds) {
    seeds += (seeds.empty() ? "" : ",") + std::to_string(seed);
  }
  values["model"] = models;
  values["seeds"] = seeds;
  values["epochs"] = std::to_string(config.epochs);
  values["batch"] = std::to_string(config.batch);
  char lr[32];
  std::snprintf(lr, sizeof(lr), "%.17g", config.lr);
  values["lr"] = lr;
  values["split"] = std::string(SplitModeName(config.split));
  values["out_dir"] = config.out_dir;
  return values;
}

void ValidateRunConfig(const RunConfig &config) {
  for (const std::string *path : {&config.map, &config.corpus,
                                  &config.corpus_spec}) {
    if (!path->empty() && !fs::is_regular_file(*path)) {
      throw SpecError("file not found: '" + *path + "'");
    }
  }
  if (config.models.empty()) throw SpecError("no model selected");
  if (config.seeds.empty()) throw SpecError("no seeds given");
}

GridMap LoadMap(const std::string &path) {
  if (path.empty()) return DefaultMap();
  return ParseMap(ReadFile(path));
}

std::vector<InstructionRecord> LoadCorpus(const RunConfig &config) {
  if (!config.corpus.empty()) return ReadCorpus(config.corpus);
  CorpusSpec spec;
  if (!config.corpus_spec.empty()) {
    spec = CorpusSpecFromKeyValues(ReadKeyValueFile(config.corpus_spec));
  }
  spec.mode = config.split;
  return GenerateCorpus(spec);
}

std::string CheckpointPath(const RunConfig &config, Architecture arch,
                           uint64_t seed) {
  return (fs::path(config.out_dir) / (std::string(ArchitectureName(arch)) +
                                      "-seed" + std::to_string(seed) + ".ckpt"))
      .string();
}

std::string LossLogPath(const RunConfig &config, Architecture arch,
                        uint64_t seed) {
  return (fs::path(config.out_dir) / (std::string(ArchitectureName(arch)) +
                                      "-seed" + std::to_string(seed) +
                                      ".loss.tsv"))
      .string();
}

KeyValues MakeManifest(const std::string &command, const RunConfig &config,
                       std::span<const InstructionRecord> corpus) {
  KeyValues manifest;
  manifest["command"] = command;
  manifest["seeds"] = RunConfigToKeyValues(config).at("seeds");
  manifest["config_hash"] = Fnv1aHex(RenderKeyValues(RunConfigToKeyValues(config)));
  manifest["corpus_hash"] = Fnv1aHex(SerializeCorpus(corpus));
  manifest["corpus_records"] = std::to_string(corpus.size());
  return manifest;
}

void WriteManifest(const std::string &path, const KeyValues &manifest) {
  WriteFile(path, RenderKeyValues(manifest));
}

std::vector<InstructionRecord> GenerateCorpusFile(const CorpusSpec &spec,
                                                  const std::string &out_path) {
  std::vector<InstructionRecord> records = GenerateCorpus(spec);
  WriteCorpus(out_path, records);
  return records;
}

void CheckTrainable(std::span<const InstructionRecord> corpus,
                    const GridMap &map) {
  bool any_train = false;
  for (const InstructionRecord &record : corpus) {
    any_train = any_train || record.split == Split::kTrain;
    if (record.category() != UnitCategory::kGoal) continue;
    try {
      Ground(record.label, map);
    } catch (const GroundingError &e) {
      throw SpecError("corpus label '" + ToString(record.label) +
                      "' does not ground on the map: " + e.what());
    }
  }
  if (!any_train) throw SpecError("corpus has no training records");
}

std::vector<std::string> TrainModels(const RunConfig &config,
                                     const ProgressFn &progress) {
  ValidateRunConfig(config);
  GridMap map = LoadMap(config.map);
  std::vector<InstructionRecord> corpus = LoadCorpus(config);
  CheckTrainable(corpus, map);
  std::vector<InstructionRecord> train = Filter(corpus, Split::kTrain);

  fs::create_directories(config.out_dir);
  std::vector<std::string> paths;
  for (Architecture arch : config.models) {
    for (uint64_t seed : config.seeds) {
      ModelConfig model_config;
      model_config.seed = seed;
      TrainConfig train_config;
      train_config.epochs = config.epochs;
      train_config.batch_size = config.batch;
      train_config.learning_rate = config.lr;
      train_config.seed = seed;
      if (progress) {
        train_config.on_epoch = [&](int epoch, double loss) {
          progress(arch, seed, epoch, loss);
        };
      }
      TrainingHistory history;
      auto model =
          BuildAndTrain(arch, train, model_config, train_config, &history);
      std::string path = CheckpointPath(config, arch, seed);
      neural::WriteCheckpoint(model->ToCheckpoint(), path);
      std::ostringstream log;
      log << "epoch\tloss\n";
      for (size_t i = 0; i < history.epoch_loss.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof(line), "%zu\t%.17g\n", i + 1,
                      history.epoch_loss[i]);
        log << line;
      }
      WriteFile(LossLogPath(config, arch, seed), log.str());
      paths.push_back(path);
    }
  }
  WriteManifest((fs::path(config.out_dir) / "train.manifest").string(),
                MakeManifest("train", config, corpus));
  return paths;
}

std::string MetricsReport::Render() const {
  std::ostringstream out;
  out << "model\tseed\taction\tgoal\tunseen\toverall\n";
  auto cell = [](const Accuracy &a) {
    if (a.total == 0) return std::string("-");
    return std::to_string(a.correct) + "/" + std::to_string(a.total);
  };
  for (const SeedMetrics &row : rows) {
    out << ArchitectureName(row.arch) << '\t' << row.seed << '\t'
        << cell(row.metrics.action) << '\t' << cell(row.metrics.goal) << '\t'
        << cell(row.metrics.unseen) << '\t' << Percent(row.metrics.overall())
        << "%\n";
  }
  out << '\n';

  const std::vector<std::string> header = {
      "Model", "Action-Oriented", "Goal-Oriented", "Action-Oriented (Unseen)",
      "Overall"};
  std::vector<std::vector<std::string>> table = {header};
  for (Architecture arch : kAllArchitectures) {
    std::vector<Accuracy> action, goal, unseen, overall;
    for (const SeedMetrics &row : rows) {
      if (row.arch != arch) continue;
      action.push_back(row.metrics.action);
      goal.push_back(row.metrics.goal);
      unseen.push_back(row.metrics.unseen);
      const EvalMetrics &m = row.metrics;
      overall.push_back({m.action.correct + m.goal.correct + m.unseen.correct,
                         m.action.total + m.goal.total + m.unseen.total});
    }
    if (action.empty()) continue;
    table.push_back({std::string(ArchitectureName(arch)), MeanStdev(action),
                     MeanStdev(goal), MeanStdev(unseen), MeanStdev(overall)});
  }
  std::vector<size_t> widths(header.size(), 0);
  for (const auto &line : table) {
    for (size_t i = 0; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], CodePoints(line[i]));
    }
  }
  for (const auto &line : table) {
    std::string text;
    for (size_t i = 0; i < line.size(); ++i) {
      text += i + 1 < line.size() ? Pad(line[i], widths[i] + 2) : line[i];
    }
    out << text << '\n';
  }
  return out.str();
}

MetricsReport EvaluateModels(const RunConfig &config) {
  ValidateRunConfig(config);
  GridMap map = LoadMap(config.map);
  std::vector<InstructionRecord> corpus = LoadCorpus(config);
  std::vector<InstructionRecord> test;
  for (const InstructionRecord &record : corpus) {
    if (record.split != Split::kTrain) test.push_back(record);
  }
  MetricsReport report;
  for (Architecture arch : config.models) {
    for (uint64_t seed : config.seeds) {
      std::string path = CheckpointPath(config, arch, seed);
      if (!fs::is_regular_file(path)) {
        throw IoError("missing checkpoint '" + path + "'");
      }
      auto model = LoadModel(path);
      if (model->architecture() != arch) {
        throw SpecError("checkpoint '" + path + "' holds a " +
                        std::string(ArchitectureName(model->architecture())) +
                        " model");
      }
      report.rows.push_back({arch, seed, Evaluate(*model, test, map)});
    }
  }
  return report;
}

std::unique_ptr<GroundingModel> LoadModel(const std::string &checkpoint_path) {
  return ModelFromCheckpoint(neural::ReadCheckpoint(checkpoint_path));
}

GroundResult GroundText(const GroundingModel &model, std::string_view text,
                        const GridMap &map) {
  UnitArgPair pair = model.PredictText(text);
  return {pair, Ground(pair, map)};
}

ordered_json StateToJson(const WorldState &state) {
  ordered_json j;
  j["agent"] = {state.agent.row, state.agent.col};
  j["block"] = {state.block.row, state.block.col};
  return j;
}

WorldState StateFromJson(const json &value) {
  auto cell = [&](const char *key) {
    if (!value.is_object() || !value.contains(key)) {
      throw ParseError(std::string("state lacks '") + key + "'");
    }
    const json &c = value.at(key);
    if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
        !c[1].is_number_integer()) {
      throw ParseError(std::string("'") + key + "' must be [row, col]");
    }
    return Cell{c[0].get<int>(), c[1].get<int>()};
  };
  return {cell("agent"), cell("block")};
}

ordered_json PairToJson(const UnitArgPair &pair) {
  ordered_json j;
  j["unit"] = std::string(UnitName(pair.unit()));
  j["arg"] = ArgumentName(pair.arg());
  return j;
}

ordered_json TrajectoryToJson(const Trajectory &trajectory) {
  ordered_json steps = ordered_json::array();
  for (const TrajectoryStep &step : trajectory.steps) {
    ordered_json s;
    s["state"] = StateToJson(step.state);
    s["action"] = std::string(ActionName(step.action));
    steps.push_back(std::move(s));
  }
  return steps;
}

std::vector<ExecutedSegment> ExecuteSegments(
    const GroundingModel &model, std::span<const std::string> texts,
    const GridMap &map, const WorldState &start,
    const DispatchOptions &options) {
  std::vector<ExecutedSegment> segments;
  WorldState state = start;
  int offset = 0;
  for (size_t i = 0; i < texts.size(); ++i) {
    GroundResult grounding = GroundText(model, texts[i], map);
    DispatchOptions segment_options = options;
    segment_options.seed = MixSeed(options.seed, i);
    if (options.perturb) {
      segment_options.perturb = [&options, offset](int step,
                                                   const WorldState &s) {
        return options.perturb(offset + step, s);
      };
    }
    Trajectory trajectory =
        Dispatch(grounding.task, map, state, segment_options);
    offset += trajectory.length();
    state = trajectory.final_state;
    segments.push_back({texts[i], grounding, std::move(trajectory)});
  }
  return segments;
}

std::string RenderRunLog(const GridMap &map, const WorldState &start,
                         std::span<const ExecutedSegment> segments) {
  ordered_json log;
  log["map"] = RenderMap(map);
  log["start"] = StateToJson(start);
  ordered_json list = ordered_json::array();
  WorldState final_state = start;
  for (const ExecutedSegment &segment : segments) {
    ordered_json s;
    s["text"] = segment.text;
    s["pair"] = PairToJson(segment.grounding.pair);
    s["category"] = segment.grounding.pair.category() == UnitCategory::kAction
                        ? "action"
                        : "goal";
    s["task"] = ToString(segment.grounding.task);
    s["trajectory"] = TrajectoryToJson(segment.trajectory);
    s["termination"] =
        std::string(TerminationName(segment.trajectory.termination));
    s["final_state"] = StateToJson(segment.trajectory.final_state);
    final_state = segment.trajectory.final_state;
    list.push_back(std::move(s));
  }
  log["segments"] = std::move(list);
  log["final_state"] = StateToJson(final_state);
  return log.dump(2) + "\n";
}

}  // namespace draggn
