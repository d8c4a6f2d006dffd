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

#include "draggn/models.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "draggn/errors.h"
#include "draggn/random.h"

namespace draggn {

using neural::Matrix;
using neural::Vector;

namespace {

std::vector<int> AllowedArguments(CallableUnit unit) {
  std::vector<int> allowed;
  for (BindingArgument arg : ValidArguments(unit)) {
    allowed.push_back(arg.index());
  }
  return allowed;
}

std::string FormatDouble(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void InitAll(GroundingModel &model, const ModelConfig &config) {
  Rng rng(config.seed);
  for (neural::Parameter *p : model.parameters()) {
    neural::InitUniform(*p, rng, config.init_scale);
  }
}

// Forward/backward through one head for one cross-entropy term.
double HeadTerm(neural::FeedForward &head, const Vector &core, int label,
                Vector *d_core) {
  neural::FeedForward::Cache cache;
  Vector logits = head.Forward(core, &cache);
  neural::CrossEntropy ce = neural::SoftmaxCrossEntropy(logits, label);
  *d_core += head.Backward(cache, ce.gradient);
  return ce.loss;
}

double HeadLoss(const neural::FeedForward &head, const Vector &core,
                int label) {
  return neural::SoftmaxCrossEntropy(head.Forward(core), label).loss;
}

bool WantsUnit(LossTerms terms) { return terms != LossTerms::kArgumentOnly; }
bool WantsArgument(LossTerms terms) { return terms != LossTerms::kUnitOnly; }

}  // namespace

std::string_view ArchitectureName(Architecture arch) {
  switch (arch) {
    case Architecture::kSingleRnn: return "single-rnn";
    case Architecture::kJDraggn: return "j-draggn";
    case Architecture::kIDraggn: return "i-draggn";
  }
  return "?";
}

Architecture ParseArchitecture(std::string_view name) {
  for (Architecture arch : kAllArchitectures) {
    if (ArchitectureName(arch) == name) return arch;
  }
  throw ParseError("unknown model '" + std::string(name) +
                   "' (expected single-rnn, j-draggn or i-draggn)");
}

Vocabulary::Vocabulary() : tokens_{"<pad>", "<unk>"} {
  index_["<pad>"] = kPad;
  index_["<unk>"] = kUnknown;
}

Vocabulary Vocabulary::Build(std::span<const InstructionRecord> records) {
  std::set<std::string> seen;
  for (const InstructionRecord &record : records) {
    seen.insert(record.tokens.begin(), record.tokens.end());
  }
  Vocabulary vocab;
  for (const std::string &token : seen) {
    if (vocab.index_.count(token)) continue;
    vocab.index_[token] = static_cast<int>(vocab.tokens_.size());
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokens(const std::vector<std::string> &tokens) {
  if (tokens.size() < 2 || tokens[0] != "<pad>" || tokens[1] != "<unk>") {
    throw ParseError("vocabulary must start with <pad>, <unk>");
  }
  Vocabulary vocab;
  for (size_t i = 2; i < tokens.size(); ++i) {
    if (!vocab.index_.emplace(tokens[i], static_cast<int>(i)).second) {
      throw ParseError("duplicate vocabulary token '" + tokens[i] + "'");
    }
    vocab.tokens_.push_back(tokens[i]);
  }
  return vocab;
}

int Vocabulary::Index(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<int> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string &token : tokens) ids.push_back(Index(token));
  return ids;
}

int MaskedArgmax(const Vector &probs, std::span<const int> allowed) {
  if (allowed.empty()) throw ContractViolation("empty argmax mask");
  int best = allowed[0];
  for (int i : allowed) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

UnitArgPair DecodeFactored(const Vector &units, const Vector &arguments) {
  std::vector<int> all_units(kNumUnits);
  std::iota(all_units.begin(), all_units.end(), 0);
  CallableUnit unit = kAllUnits[MaskedArgmax(units, all_units)];
  int arg = MaskedArgmax(arguments, AllowedArguments(unit));
  return UnitArgPair(unit, BindingArgument::FromIndex(arg));
}

UnitArgPair GroundingModel::Predict(std::span<const int> tokens) const {
  Distributions d = Forward(tokens);
  return DecodeFactored(d.units, d.arguments);
}

UnitArgPair GroundingModel::PredictText(std::string_view text) const {
  std::vector<std::string> tokens = Tokenize(text);
  return Predict(vocabulary_.Encode(tokens));
}

std::vector<neural::Parameter *> GroundingModel::parameters() {
  return params_;
}

std::vector<const neural::Parameter *> GroundingModel::parameters() const {
  return {params_.begin(), params_.end()};
}

void GroundingModel::ZeroGrad() {
  for (neural::Parameter *p : params_) p->ZeroGrad();
}

void GroundingModel::AddEnumerations(neural::Checkpoint &checkpoint) const {
  auto &units = checkpoint.enumerations["units"];
  for (CallableUnit unit : kAllUnits) units.emplace_back(UnitName(unit));
  auto &args = checkpoint.enumerations["arguments"];
  for (int i = 0; i < kNumArguments; ++i) {
    args.push_back(ArgumentName(BindingArgument::FromIndex(i)));
  }
}

neural::Checkpoint GroundingModel::ToCheckpoint() const {
  neural::Checkpoint checkpoint;
  checkpoint.architecture = std::string(ArchitectureName(architecture()));
  checkpoint.metadata["embedding_dim"] = std::to_string(config_.embedding_dim);
  checkpoint.metadata["hidden_dim"] = std::to_string(config_.hidden_dim);
  checkpoint.metadata["feedforward_dim"] =
      std::to_string(config_.feedforward_dim);
  checkpoint.metadata["init_scale"] = FormatDouble(config_.init_scale);
  checkpoint.metadata["seed"] = std::to_string(config_.seed);
  checkpoint.enumerations["vocabulary"] = vocabulary_.tokens();
  AddEnumerations(checkpoint);
  for (const neural::Parameter *p : params_) {
    neural::NamedTensor tensor;
    tensor.name = p->name;
    tensor.shape = {static_cast<uint64_t>(p->value.rows()),
                    static_cast<uint64_t>(p->value.cols())};
    tensor.values.assign(p->value.data(), p->value.data() + p->value.size());
    checkpoint.tensors.push_back(std::move(tensor));
  }
  return checkpoint;
}

Encoder::Encoder(const std::string &name, int vocab_size,
                 const ModelConfig &config)
    : embedding_(name + ".embedding", vocab_size, config.embedding_dim),
      gru_(name + ".gru", config.embedding_dim, config.hidden_dim) {}

Vector Encoder::Forward(std::span<const int> tokens, Cache *cache) const {
  if (tokens.empty()) throw ContractViolation("cannot encode an empty segment");
  Matrix inputs = embedding_.Forward(tokens);
  if (cache == nullptr) return gru_.Forward(inputs);
  cache->tokens.assign(tokens.begin(), tokens.end());
  return gru_.Forward(inputs, &cache->gru);
}

void Encoder::Backward(const Cache &cache, const Vector &d_final) {
  Matrix d_inputs = gru_.Backward(cache.gru, d_final);
  embedding_.Backward(cache.tokens, d_inputs);
}

// Single-RNN.

SingleRnnModel::SingleRnnModel(Vocabulary vocabulary,
                               std::vector<UnitArgPair> labels,
                               ModelConfig config)
    : GroundingModel(std::move(vocabulary), config),
      labels_(std::move(labels)),
      encoder_("core", vocabulary_.size(), config),
      head_("joint.head", config.hidden_dim, config.feedforward_dim,
            static_cast<int>(labels_.size())) {
  if (labels_.empty()) throw ContractViolation("empty Single-RNN label space");
  Register(encoder_.embedding().table());
  Register(encoder_.gru().w());
  Register(encoder_.gru().u());
  Register(encoder_.gru().b());
  Register(head_.w1());
  Register(head_.b1());
  Register(head_.w2());
  Register(head_.b2());
  InitAll(*this, config);
}

int SingleRnnModel::LabelIndex(const UnitArgPair &pair) const {
  auto it = std::find(labels_.begin(), labels_.end(), pair);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

Distributions SingleRnnModel::Forward(std::span<const int> tokens) const {
  Distributions d;
  d.joint = neural::Softmax(head_.Forward(encoder_.Forward(tokens)));
  return d;
}

double SingleRnnModel::Loss(std::span<const int> tokens,
                            const UnitArgPair &label, LossTerms) const {
  int index = LabelIndex(label);
  if (index < 0) {
    throw ContractViolation("pair " + ToString(label) +
                            " is outside the Single-RNN label space");
  }
  return HeadLoss(head_, encoder_.Forward(tokens), index);
}

double SingleRnnModel::LossAndGradient(std::span<const int> tokens,
                                       const UnitArgPair &label, LossTerms) {
  int index = LabelIndex(label);
  if (index < 0) {
    throw ContractViolation("pair " + ToString(label) +
                            " is outside the Single-RNN label space");
  }
  Encoder::Cache cache;
  Vector core = encoder_.Forward(tokens, &cache);
  Vector d_core = Vector::Zero(core.size());
  double loss = HeadTerm(head_, core, index, &d_core);
  encoder_.Backward(cache, d_core);
  return loss;
}

UnitArgPair SingleRnnModel::Predict(std::span<const int> tokens) const {
  Vector joint = Forward(tokens).joint;
  std::vector<int> all(labels_.size());
  std::iota(all.begin(), all.end(), 0);
  return labels_[MaskedArgmax(joint, all)];
}

void SingleRnnModel::AddEnumerations(neural::Checkpoint &checkpoint) const {
  GroundingModel::AddEnumerations(checkpoint);
  auto &labels = checkpoint.enumerations["labels"];
  for (const UnitArgPair &pair : labels_) labels.push_back(ToString(pair));
}

// J-DRAGGN.

JDraggnModel::JDraggnModel(Vocabulary vocabulary, ModelConfig config)
    : GroundingModel(std::move(vocabulary), config),
      core_("core", vocabulary_.size(), config),
      unit_head_("unit.head", config.hidden_dim, config.feedforward_dim,
                 kNumUnits),
      arg_head_("arg.head", config.hidden_dim, config.feedforward_dim,
                kNumArguments) {
  Register(core_.embedding().table());
  Register(core_.gru().w());
  Register(core_.gru().u());
  Register(core_.gru().b());
  for (neural::FeedForward *head : {&unit_head_, &arg_head_}) {
    Register(head->w1());
    Register(head->b1());
    Register(head->w2());
    Register(head->b2());
  }
  InitAll(*this, config);
}

Distributions JDraggnModel::Forward(std::span<const int> tokens) const {
  Vector core = core_.Forward(tokens);
  Distributions d;
  d.units = neural::Softmax(unit_head_.Forward(core));
  d.arguments = neural::Softmax(arg_head_.Forward(core));
  return d;
}

double JDraggnModel::Loss(std::span<const int> tokens, const UnitArgPair &label,
                          LossTerms terms) const {
  Vector core = core_.Forward(tokens);
  double loss = 0.0;
  if (WantsUnit(terms)) {
    loss += HeadLoss(unit_head_, core, static_cast<int>(label.unit()));
  }
  if (WantsArgument(terms)) {
    loss += HeadLoss(arg_head_, core, label.arg().index());
  }
  return loss;
}

double JDraggnModel::LossAndGradient(std::span<const int> tokens,
                                     const UnitArgPair &label,
                                     LossTerms terms) {
  Encoder::Cache cache;
  Vector core = core_.Forward(tokens, &cache);
  Vector d_core = Vector::Zero(core.size());
  double loss = 0.0;
  if (WantsUnit(terms)) {
    loss += HeadTerm(unit_head_, core, static_cast<int>(label.unit()), &d_core);
  }
  if (WantsArgument(terms)) {
    loss += HeadTerm(arg_head_, core, label.arg().index(), &d_core);
  }
  core_.Backward(cache, d_core);
  return loss;
}

// I-DRAGGN.

IDraggnModel::IDraggnModel(Vocabulary vocabulary, ModelConfig config)
    : GroundingModel(std::move(vocabulary), config),
      unit_encoder_("unit", vocabulary_.size(), config),
      unit_head_("unit.head", config.hidden_dim, config.feedforward_dim,
                 kNumUnits),
      arg_encoder_("arg", vocabulary_.size(), config),
      arg_head_("arg.head", config.hidden_dim, config.feedforward_dim,
                kNumArguments) {
  for (neural::Parameter *p : UnitPathParameters()) Register(*p);
  for (neural::Parameter *p : ArgumentPathParameters()) Register(*p);
  InitAll(*this, config);
}

std::vector<neural::Parameter *> IDraggnModel::UnitPathParameters() {
  return {&unit_encoder_.embedding().table(),
          &unit_encoder_.gru().w(),
          &unit_encoder_.gru().u(),
          &unit_encoder_.gru().b(),
          &unit_head_.w1(),
          &unit_head_.b1(),
          &unit_head_.w2(),
          &unit_head_.b2()};
}

std::vector<neural::Parameter *> IDraggnModel::ArgumentPathParameters() {
  return {&arg_encoder_.embedding().table(),
          &arg_encoder_.gru().w(),
          &arg_encoder_.gru().u(),
          &arg_encoder_.gru().b(),
          &arg_head_.w1(),
          &arg_head_.b1(),
          &arg_head_.w2(),
          &arg_head_.b2()};
}

Distributions IDraggnModel::Forward(std::span<const int> tokens) const {
  Distributions d;
  d.units = neural::Softmax(unit_head_.Forward(unit_encoder_.Forward(tokens)));
  d.arguments =
      neural::Softmax(arg_head_.Forward(arg_encoder_.Forward(tokens)));
  return d;
}

double IDraggnModel::Loss(std::span<const int> tokens, const UnitArgPair &label,
                          LossTerms terms) const {
  double loss = 0.0;
  if (WantsUnit(terms)) {
    loss += HeadLoss(unit_head_, unit_encoder_.Forward(tokens),
                     static_cast<int>(label.unit()));
  }
  if (WantsArgument(terms)) {
    loss += HeadLoss(arg_head_, arg_encoder_.Forward(tokens),
                     label.arg().index());
  }
  return loss;
}

double IDraggnModel::LossAndGradient(std::span<const int> tokens,
                                     const UnitArgPair &label,
                                     LossTerms terms) {
  double loss = 0.0;
  if (WantsUnit(terms)) {
    Encoder::Cache cache;
    Vector core = unit_encoder_.Forward(tokens, &cache);
    Vector d_core = Vector::Zero(core.size());
    loss += HeadTerm(unit_head_, core, static_cast<int>(label.unit()), &d_core);
    unit_encoder_.Backward(cache, d_core);
  }
  if (WantsArgument(terms)) {
    Encoder::Cache cache;
    Vector core = arg_encoder_.Forward(tokens, &cache);
    Vector d_core = Vector::Zero(core.size());
    loss += HeadTerm(arg_head_, core, label.arg().index(), &d_core);
    arg_encoder_.Backward(cache, d_core);
  }
  return loss;
}

std::vector<UnitArgPair> LabelSpace(std::span<const InstructionRecord> records) {
  std::set<UnitArgPair> seen;
  for (const InstructionRecord &record : records) seen.insert(record.label);
  std::vector<UnitArgPair> labels;
  for (const UnitArgPair &pair : AllPairs()) {
    if (seen.count(pair)) labels.push_back(pair);
  }
  return labels;
}

std::unique_ptr<GroundingModel> CreateModel(Architecture arch,
                                            Vocabulary vocabulary,
                                            std::vector<UnitArgPair> labels,
                                            const ModelConfig &config) {
  switch (arch) {
    case Architecture::kSingleRnn:
      return std::make_unique<SingleRnnModel>(std::move(vocabulary),
                                              std::move(labels), config);
    case Architecture::kJDraggn:
      return std::make_unique<JDraggnModel>(std::move(vocabulary), config);
    case Architecture::kIDraggn:
      return std::make_unique<IDraggnModel>(std::move(vocabulary), config);
  }
  throw ContractViolation("unknown architecture");
}

std::unique_ptr<GroundingModel> ModelFromCheckpoint(
    const neural::Checkpoint &checkpoint) {
  Architecture arch = ParseArchitecture(checkpoint.architecture);
  auto meta = [&](const std::string &key) {
    auto it = checkpoint.metadata.find(key);
    if (it == checkpoint.metadata.end()) {
      throw ParseError("checkpoint metadata lacks '" + key + "'");
    }
    return it->second;
  };
  auto enumeration = [&](const std::string &name) {
    auto it = checkpoint.enumerations.find(name);
    if (it == checkpoint.enumerations.end()) {
      throw ParseError("checkpoint lacks enumeration '" + name + "'");
    }
    return it->second;
  };
  ModelConfig config;
  try {
    config.embedding_dim = std::stoi(meta("embedding_dim"));
    config.hidden_dim = std::stoi(meta("hidden_dim"));
    config.feedforward_dim = std::stoi(meta("feedforward_dim"));
    config.init_scale = std::stod(meta("init_scale"));
    config.seed = std::stoull(meta("seed"));
  } catch (const std::logic_error &) {
    throw ParseError("malformed checkpoint metadata");
  }
  std::vector<std::string> units = enumeration("units");
  std::vector<std::string> args = enumeration("arguments");
  if (units.size() != kNumUnits || args.size() != kNumArguments) {
    throw ParseError("checkpoint unit/argument enumerations do not match");
  }
  for (int i = 0; i < kNumUnits; ++i) {
    if (units[i] != UnitName(kAllUnits[i])) {
      throw ParseError("checkpoint unit enumeration does not match");
    }
  }
  std::vector<UnitArgPair> labels;
  if (arch == Architecture::kSingleRnn) {
    for (const std::string &text : enumeration("labels")) {
      labels.push_back(ParsePair(text));
    }
  }
  auto model = CreateModel(arch, Vocabulary::FromTokens(enumeration("vocabulary")),
                           std::move(labels), config);
  if (checkpoint.tensors.size() != model->parameters().size()) {
    throw ParseError("checkpoint tensor count does not match " +
                     checkpoint.architecture);
  }
  for (neural::Parameter *p : model->parameters()) {
    const neural::NamedTensor &tensor = checkpoint.Tensor(p->name);
    if (tensor.shape.size() != 2 ||
        tensor.shape[0] != static_cast<uint64_t>(p->value.rows()) ||
        tensor.shape[1] != static_cast<uint64_t>(p->value.cols())) {
      throw ParseError("shape mismatch for tensor '" + p->name + "'");
    }
    std::copy(tensor.values.begin(), tensor.values.end(), p->value.data());
  }
  return model;
}

TrainingHistory Train(GroundingModel &model,
                      std::span<const InstructionRecord> records,
                      const TrainConfig &config) {
  if (records.empty()) throw ContractViolation("no training records");
  if (config.batch_size <= 0 || config.epochs < 0) {
    throw ContractViolation("batch size must be positive");
  }
  if (model.architecture() == Architecture::kSingleRnn) {
    const auto &single = static_cast<const SingleRnnModel &>(model);
    for (const InstructionRecord &record : records) {
      if (single.LabelIndex(record.label) < 0) {
        throw ContractViolation("training pair " + ToString(record.label) +
                                " is outside the Single-RNN label space");
      }
    }
  }
  std::vector<std::vector<int>> encoded;
  encoded.reserve(records.size());
  for (const InstructionRecord &record : records) {
    encoded.push_back(model.vocabulary().Encode(record.tokens));
  }

  std::vector<neural::Parameter *> params = model.parameters();
  neural::Adam adam({config.learning_rate});
  Rng rng(MixSeed(config.seed, 2));
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  TrainingHistory history;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span(order));
    double total = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      model.ZeroGrad();
      for (size_t k = start; k < end; ++k) {
        total += model.LossAndGradient(encoded[order[k]], records[order[k]].label);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (neural::Parameter *p : params) p->grad *= scale;
      adam.Step(params);
    }
    double mean = total / static_cast<double>(records.size());
    history.epoch_loss.push_back(mean);
    if (config.on_epoch) config.on_epoch(epoch + 1, mean);
  }
  return history;
}

std::unique_ptr<GroundingModel> BuildAndTrain(
    Architecture arch, std::span<const InstructionRecord> train,
    const ModelConfig &model_config, const TrainConfig &train_config,
    TrainingHistory *history) {
  auto model = CreateModel(arch, Vocabulary::Build(train), LabelSpace(train),
                           model_config);
  TrainingHistory h = Train(*model, train, train_config);
  if (history != nullptr) *history = std::move(h);
  return model;
}

double EvalMetrics::overall() const {
  int total = action.total + goal.total + unseen.total;
  if (total == 0) return 0.0;
  return static_cast<double>(action.correct + goal.correct + unseen.correct) /
         total;
}

EvalMetrics Evaluate(const GroundingModel &model,
                     std::span<const InstructionRecord> records,
                     const GridMap &map) {
  EvalMetrics metrics;
  for (const InstructionRecord &record : records) {
    std::vector<int> ids = model.vocabulary().Encode(record.tokens);
    for (int id : ids) metrics.oov_tokens += id == Vocabulary::kUnknown;
    metrics.total_tokens += static_cast<int>(ids.size());
    UnitArgPair predicted = model.Predict(ids);
    bool correct;
    if (record.category() == UnitCategory::kAction) {
      correct = predicted == record.label;
    } else {
      try {
        correct = Ground(predicted, map) == Ground(record.label, map);
      } catch (const GroundingError &) {
        correct = false;
      }
    }
    Accuracy &bucket = record.split == Split::kTestUnseen ? metrics.unseen
                       : record.category() == UnitCategory::kAction
                           ? metrics.action
                           : metrics.goal;
    ++bucket.total;
    bucket.correct += correct ? 1 : 0;
  }
  return metrics;
}

}  // namespace draggn
