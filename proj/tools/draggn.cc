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

// draggn command-line driver.
//
// Exit codes: 0 success, 1 user error (bad input, missing file, bad
// config), 2 internal error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "draggn/errors.h"
#include "draggn/harness.h"
#include "draggn/service.h"

namespace {

namespace fs = std::filesystem;
using namespace draggn;

constexpr int kUserError = 1;
constexpr int kInternalError = 2;

// Run-config keys, each settable in --config and overridable by a flag of
// the same name.
const char *const kConfigKeys[] = {"map",    "corpus", "corpus_spec",
                                   "model",  "seeds",  "epochs",
                                   "batch",  "lr",     "split",
                                   "out_dir"};

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option *> options;

  void Attach(CLI::App *app) {
    app->add_option("--config", config_path, "key=value run config file");
    for (const char *key : kConfigKeys) {
      options[key] = app->add_option(std::string("--") + key, values[key],
                                     "overrides config key '" +
                                         std::string(key) + "'");
    }
  }

  RunConfig Resolve() const {
    KeyValues kv;
    if (!config_path.empty()) kv = ReadKeyValueFile(config_path);
    for (const auto &[key, option] : options) {
      if (option->count() > 0) kv[key] = values.at(key);
    }
    return RunConfigFromKeyValues(kv);
  }
};

Cell ParseCell(const std::string &text) {
  std::vector<std::string> parts = SplitList(text);
  try {
    if (parts.size() == 2) return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::logic_error &) {
  }
  throw ParseError("expected a cell as 'row,col', got '" + text + "'");
}

std::string PairLine(const GroundResult &result) {
  return "pair: " + ToString(result.pair) + "\ncategory: " +
         (result.pair.category() == UnitCategory::kAction ? "action" : "goal") +
         "\ntask: " + ToString(result.task) + "\n";
}

Service *g_service = nullptr;

void HandleSignal(int) {
  if (g_service != nullptr) g_service->Stop();
}

int Main(int argc, char **argv) {
  CLI::App app{"DRAGGN language grounding pipeline"};
  app.require_subcommand(1);

  // gen-corpus
  auto *gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  std::string gen_spec, gen_out, gen_split;
  gen->add_option("--spec", gen_spec, "key=value corpus spec file");
  gen->add_option("--out", gen_out, "output JSONL path")->required();
  gen->add_option("--split", gen_split, "standard | unseen (overrides spec)");

  // train / eval
  auto *train = app.add_subcommand("train", "train models per seed");
  ConfigFlags train_flags;
  train_flags.Attach(train);
  bool quiet = false;
  train->add_flag("--quiet", quiet, "no per-epoch progress");

  auto *eval = app.add_subcommand("eval", "evaluate trained checkpoints");
  ConfigFlags eval_flags;
  eval_flags.Attach(eval);

  // ground
  auto *ground = app.add_subcommand("ground", "ground one segment");
  std::string ground_ckpt, ground_text, ground_map;
  ground->add_option("--checkpoint", ground_ckpt, "model checkpoint")
      ->required();
  ground->add_option("--text", ground_text, "command segment")->required();
  ground->add_option("--map", ground_map, "ASCII map (default: built-in)");

  // exec
  auto *exec = app.add_subcommand("exec", "ground and execute segments");
  std::string exec_ckpt, exec_map, exec_log, perturb_agent, perturb_block;
  std::vector<std::string> exec_texts;
  double exec_slip = 0.0;
  uint64_t exec_seed = 0;
  int exec_max_steps = 200;
  int perturb_step = -1;
  exec->add_option("--checkpoint", exec_ckpt, "model checkpoint")->required();
  exec->add_option("--text", exec_texts, "segment (repeat for a sequence)")
      ->required();
  exec->add_option("--map", exec_map, "ASCII map (default: built-in)");
  exec->add_option("--slip", exec_slip, "slip probability");
  exec->add_option("--seed", exec_seed, "slip sampling seed");
  exec->add_option("--max-steps", exec_max_steps, "goal task step limit");
  exec->add_option("--perturb-step", perturb_step,
                   "step index at which to apply the perturbation");
  exec->add_option("--perturb-agent", perturb_agent, "teleport agent to r,c");
  exec->add_option("--perturb-block", perturb_block, "teleport block to r,c");
  exec->add_option("--log", exec_log, "write the JSON run log here");

  // serve
  auto *serve = app.add_subcommand("serve", "run the HTTP session service");
  ServiceConfig service_config;
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--models", service_config.model_dir,
                    "directory of *.ckpt files");
  serve->add_option("--map", service_config.map_path,
                    "default ASCII map (default: built-in)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)");
  serve->add_option("--slip", service_config.slip, "slip probability");
  serve->add_option("--seed", service_config.seed, "slip sampling seed");
  serve->add_option("--max-steps", service_config.max_steps,
                    "goal task step limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUserError;
  }

  if (gen->parsed()) {
    CorpusSpec spec;
    if (!gen_spec.empty()) {
      spec = CorpusSpecFromKeyValues(ReadKeyValueFile(gen_spec));
    }
    if (!gen_split.empty()) spec.mode = ParseSplitMode(gen_split);
    std::vector<InstructionRecord> records = GenerateCorpusFile(spec, gen_out);
    KeyValues manifest;
    manifest["command"] = "gen-corpus";
    manifest["seed"] = std::to_string(spec.seed);
    manifest["config_hash"] =
        Fnv1aHex(RenderKeyValues(CorpusSpecToKeyValues(spec)));
    manifest["corpus_hash"] = Fnv1aHex(SerializeCorpus(records));
    manifest["corpus_records"] = std::to_string(records.size());
    WriteManifest(gen_out + ".manifest", manifest);
    std::cout << "wrote " << records.size() << " records to " << gen_out
              << "\n";
    return 0;
  }

  if (train->parsed()) {
    RunConfig config = train_flags.Resolve();
    ProgressFn progress;
    if (!quiet) {
      progress = [&](Architecture arch, uint64_t seed, int epoch, double loss) {
        if (epoch == 1 || epoch % 25 == 0 || epoch == config.epochs) {
          std::fprintf(stderr, "%s seed %llu epoch %d loss %.6f\n",
                       std::string(ArchitectureName(arch)).c_str(),
                       static_cast<unsigned long long>(seed), epoch, loss);
        }
      };
    }
    for (const std::string &path : TrainModels(config, progress)) {
      std::cout << path << "\n";
    }
    return 0;
  }

  if (eval->parsed()) {
    RunConfig config = eval_flags.Resolve();
    MetricsReport report = EvaluateModels(config);
    std::string text = report.Render();
    fs::create_directories(config.out_dir);
    WriteFile((fs::path(config.out_dir) / "report.txt").string(), text);
    WriteManifest((fs::path(config.out_dir) / "eval.manifest").string(),
                  MakeManifest("eval", config, LoadCorpus(config)));
    std::cout << text;
    return 0;
  }

  if (ground->parsed()) {
    auto model = LoadModel(ground_ckpt);
    GridMap map = LoadMap(ground_map);
    std::cout << PairLine(GroundText(*model, ground_text, map));
    return 0;
  }

  if (exec->parsed()) {
    auto model = LoadModel(exec_ckpt);
    GridMap map = LoadMap(exec_map);
    DispatchOptions options;
    options.slip = exec_slip;
    options.seed = exec_seed;
    options.max_steps = exec_max_steps;
    if (perturb_step >= 0) {
      std::optional<Cell> agent, block;
      if (!perturb_agent.empty()) agent = ParseCell(perturb_agent);
      if (!perturb_block.empty()) block = ParseCell(perturb_block);
      options.perturb = [=, &map](int step, const WorldState &state)
          -> std::optional<WorldState> {
        if (step != perturb_step) return std::nullopt;
        WorldState next{agent.value_or(state.agent), block.value_or(state.block)};
        if (!map.IsValidState(next)) {
          throw SpecError("perturbation leads to an invalid state");
        }
        return next;
      };
    }
    std::vector<ExecutedSegment> segments =
        ExecuteSegments(*model, exec_texts, map, map.start(), options);
    for (const ExecutedSegment &segment : segments) {
      std::cout << "> " << segment.text << "\n"
                << PairLine(segment.grounding)
                << "steps: " << segment.trajectory.length() << "\n"
                << "termination: "
                << TerminationName(segment.trajectory.termination) << "\n";
    }
    WorldState final_state =
        segments.empty() ? map.start() : segments.back().trajectory.final_state;
    std::cout << RenderMap(map, final_state);
    if (!exec_log.empty()) {
      WriteFile(exec_log, RenderRunLog(map, map.start(), segments));
    }
    return 0;
  }

  if (serve->parsed()) {
    Service service(service_config);
    int bound = service.Bind(host, port);
    if (bound < 0) {
      std::cerr << "error: cannot bind " << host << ":" << port << "\n";
      return kUserError;
    }
    g_service = &service;
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    service.Run();
    g_service = nullptr;
    return 0;
  }
  return kUserError;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return Main(argc, argv);
  } catch (const draggn::ContractViolation &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const draggn::ConvergenceError &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const draggn::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
