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


// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the pure-Python wrappers in draggn/__init__.py.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "draggn/errors.h"
#include "draggn/harness.h"

namespace py = pybind11;
using nlohmann::ordered_json;

namespace draggn {
namespace {

GridMap MapOrDefault(const std::string &text) {
  return text.empty() ? DefaultMap() : ParseMap(text);
}

std::string MapJson(const std::string &text) {
  GridMap map = MapOrDefault(text);
  ordered_json j;
  j["height"] = map.height();
  j["width"] = map.width();
  j["start"] = StateToJson(map.start());
  ordered_json rooms = ordered_json::array();
  for (const Room &room : map.rooms()) {
    rooms.push_back({{"id", room.id}, {"color", ColorName(room.color)},
                     {"size", room.cells.size()}});
  }
  j["rooms"] = std::move(rooms);
  return j.dump();
}

std::string RecordJson(const InstructionRecord &record) {
  return SerializeRecord(record);
}

std::vector<std::string> GenerateCorpusJson(
    const std::map<std::string, std::string> &spec_values) {
  KeyValues values(spec_values.begin(), spec_values.end());
  std::vector<std::string> lines;
  for (const InstructionRecord &record :
       GenerateCorpus(CorpusSpecFromKeyValues(values))) {
    lines.push_back(RecordJson(record));
  }
  return lines;
}

std::string ExecuteJson(const std::string &pair_text,
                        const std::string &map_text, double slip,
                        uint64_t seed, int max_steps) {
  GridMap map = MapOrDefault(map_text);
  UnitArgPair pair = ParsePair(pair_text);
  GroundedTask task = Ground(pair, map);
  DispatchOptions options;
  options.slip = slip;
  options.seed = seed;
  options.max_steps = max_steps;
  Trajectory trajectory = Dispatch(task, map, map.start(), options);
  ordered_json j;
  j["task"] = ToString(task);
  j["trajectory"] = TrajectoryToJson(trajectory);
  j["termination"] = std::string(TerminationName(trajectory.termination));
  j["final_state"] = StateToJson(trajectory.final_state);
  return j.dump();
}

// A trained or loaded grounding model.
class PyModel {
 public:
  explicit PyModel(std::unique_ptr<GroundingModel> model)
      : model_(std::move(model)) {}

  static PyModel Load(const std::string &path) { return PyModel(LoadModel(path)); }

  static PyModel Train(const std::string &arch,
                       const std::vector<std::pair<std::string, std::string>> &examples,
                       int epochs, int batch_size, double learning_rate,
                       uint64_t seed, int dim, double init_scale) {
    std::vector<InstructionRecord> records;
    for (const auto &[text, pair] : examples) {
      records.push_back(MakeRecord(text, ParsePair(pair)));
    }
    ModelConfig model_config;
    model_config.embedding_dim = model_config.hidden_dim =
        model_config.feedforward_dim = dim;
    model_config.init_scale = init_scale;
    model_config.seed = seed;
    TrainConfig train_config;
    train_config.epochs = epochs;
    train_config.batch_size = batch_size;
    train_config.learning_rate = learning_rate;
    train_config.seed = seed;
    return PyModel(BuildAndTrain(ParseArchitecture(arch), records,
                                 model_config, train_config));
  }

  std::string Architecture() const {
    return std::string(ArchitectureName(model_->architecture()));
  }

  std::string Predict(const std::string &text) const {
    return ToString(model_->PredictText(text));
  }

  std::string GroundJson(const std::string &text,
                         const std::string &map_text) const {
    GroundResult result = GroundText(*model_, text, MapOrDefault(map_text));
    ordered_json j;
    j["pair"] = ToString(result.pair);
    j["category"] =
        result.pair.category() == UnitCategory::kAction ? "action" : "goal";
    j["task"] = ToString(result.task);
    return j.dump();
  }

  void Save(const std::string &path) const {
    neural::WriteCheckpoint(model_->ToCheckpoint(), path);
  }

 private:
  std::unique_ptr<GroundingModel> model_;
};

}  // namespace
}  // namespace draggn

PYBIND11_MODULE(_core, m) {
  using namespace draggn;
  m.doc() = "DRAGGN grounding pipeline bindings";

  static py::exception<Error> error(m, "DraggnError", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<GroundingError> grounding_error(m, "GroundingError",
                                                       error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError &e) {
      parse_error(e.what());
    } catch (const GroundingError &e) {
      grounding_error(e.what());
    } catch (const Error &e) {
      error(e.what());
    }
  });

  m.def("tokenize", &Tokenize, py::arg("text"));
  m.def("default_map_text", [] { return std::string(DefaultMapText()); });
  m.def("map_json", &MapJson, py::arg("text") = "");
  m.def("render_map", [](const std::string &text) {
    return RenderMap(MapOrDefault(text));
  }, py::arg("text") = "");
  m.def("all_pairs", [] {
    std::vector<std::string> pairs;
    for (const UnitArgPair &pair : AllPairs()) pairs.push_back(ToString(pair));
    return pairs;
  });
  m.def("generate_corpus_json", &GenerateCorpusJson,
        py::arg("spec") = std::map<std::string, std::string>{});
  m.def("execute_json", &ExecuteJson, py::arg("pair"), py::arg("map") = "",
        py::arg("slip") = 0.0, py::arg("seed") = 0, py::arg("max_steps") = 200);

  py::class_<PyModel>(m, "Model")
      .def_static("load", &PyModel::Load, py::arg("path"))
      .def_static("train", &PyModel::Train, py::arg("arch"),
                  py::arg("examples"), py::arg("epochs") = 125,
                  py::arg("batch_size") = 16, py::arg("learning_rate") = 1e-4,
                  py::arg("seed") = 0, py::arg("dim") = 64,
                  py::arg("init_scale") = 0.08)
      .def_property_readonly("architecture", &PyModel::Architecture)
      .def("predict", &PyModel::Predict, py::arg("text"))
      .def("ground_json", &PyModel::GroundJson, py::arg("text"),
           py::arg("map") = "")
      .def("save", &PyModel::Save, py::arg("path"));
}
