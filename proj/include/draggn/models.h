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

// Grounding models mapping a tokenized segment to a unit-argument pair.
//
//   single-rnn  one GRU encoder, one softmax over the joint pairs seen in
//               training (closed label space)
//   j-draggn    one embedding + GRU core shared by a callable-unit head and
//               a binding-argument head
//   i-draggn    two disjoint embedding + GRU + head paths, one per output
//
// DRAGGN decoding is sequential: argmax unit first, then argmax argument
// restricted to the arguments valid for that unit.

#ifndef DRAGGN_MODELS_H_
#define DRAGGN_MODELS_H_

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "draggn/checkpoint.h"
#include "draggn/cleanup_world.h"
#include "draggn/corpus.h"
#include "draggn/neural.h"
#include "draggn/semantics.h"

namespace draggn {

enum class Architecture : uint8_t { kSingleRnn, kJDraggn, kIDraggn };

inline constexpr std::array<Architecture, 3> kAllArchitectures = {
    Architecture::kSingleRnn, Architecture::kJDraggn, Architecture::kIDraggn};

std::string_view ArchitectureName(Architecture arch);
Architecture ParseArchitecture(std::string_view name);  // throws ParseError

// Token ids are dense from 0. Id 0 is padding, id 1 stands for every token
// not seen when the vocabulary was built.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnknown = 1;

  Vocabulary();
  // Sorted list of the tokens of |records| (all splits given).
  static Vocabulary Build(std::span<const InstructionRecord> records);
  static Vocabulary FromTokens(const std::vector<std::string> &tokens);

  int Index(const std::string &token) const;
  std::vector<int> Encode(std::span<const std::string> tokens) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  // Includes the two reserved entries "<pad>" and "<unk>".
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> index_;
};

struct ModelConfig {
  int embedding_dim = 64;
  int hidden_dim = 64;
  int feedforward_dim = 80;
  double init_scale = 0.08;
  uint64_t seed = 0;
};

// Output of a forward pass. DRAGGN models fill |units| and |arguments|;
// Single-RNN fills |joint| (indexed like labels()).
struct Distributions {
  neural::Vector units;
  neural::Vector arguments;
  neural::Vector joint;
};

// Which cross-entropy terms contribute to a loss.
enum class LossTerms : uint8_t { kBoth, kUnitOnly, kArgumentOnly };

class GroundingModel {
 public:
  virtual ~GroundingModel() = default;

  virtual Architecture architecture() const = 0;

  // |tokens| are vocabulary ids; must be non-empty.
  virtual Distributions Forward(std::span<const int> tokens) const = 0;

  // Loss for one example; LossAndGradient also accumulates gradients into
  // every parameter's grad. Single-RNN ignores |terms| and throws
  // ContractViolation for a label outside its label space.
  virtual double Loss(std::span<const int> tokens, const UnitArgPair &label,
                      LossTerms terms = LossTerms::kBoth) const = 0;
  virtual double LossAndGradient(std::span<const int> tokens,
                                 const UnitArgPair &label,
                                 LossTerms terms = LossTerms::kBoth) = 0;

  // Never returns an invalid pair.
  virtual UnitArgPair Predict(std::span<const int> tokens) const;
  UnitArgPair PredictText(std::string_view text) const;

  std::vector<neural::Parameter *> parameters();
  std::vector<const neural::Parameter *> parameters() const;
  void ZeroGrad();

  const Vocabulary &vocabulary() const { return vocabulary_; }
  const ModelConfig &config() const { return config_; }

  neural::Checkpoint ToCheckpoint() const;

 protected:
  GroundingModel(Vocabulary vocabulary, ModelConfig config)
      : vocabulary_(std::move(vocabulary)), config_(config) {}

  // Registers parameters in a fixed order (checkpoint and optimizer order).
  void Register(neural::Parameter &param) { params_.push_back(&param); }
  virtual void AddEnumerations(neural::Checkpoint &checkpoint) const;

  Vocabulary vocabulary_;
  ModelConfig config_;

 private:
  std::vector<neural::Parameter *> params_;
};

// Embedding followed by a GRU; the final hidden state summarizes the
// segment.
class Encoder {
 public:
  Encoder(const std::string &name, int vocab_size, const ModelConfig &config);

  struct Cache {
    std::vector<int> tokens;
    neural::GruCell::Cache gru;
  };

  // Throws ContractViolation for an empty sequence.
  neural::Vector Forward(std::span<const int> tokens,
                         Cache *cache = nullptr) const;
  void Backward(const Cache &cache, const neural::Vector &d_final);

  neural::Embedding &embedding() { return embedding_; }
  neural::GruCell &gru() { return gru_; }
  const neural::Embedding &embedding() const { return embedding_; }
  const neural::GruCell &gru() const { return gru_; }

 private:
  neural::Embedding embedding_;
  neural::GruCell gru_;
};

class SingleRnnModel : public GroundingModel {
 public:
  // |labels| is the closed output space, typically the distinct pairs of
  // the training data.
  SingleRnnModel(Vocabulary vocabulary, std::vector<UnitArgPair> labels,
                 ModelConfig config);

  Architecture architecture() const override {
    return Architecture::kSingleRnn;
  }
  Distributions Forward(std::span<const int> tokens) const override;
  double Loss(std::span<const int> tokens, const UnitArgPair &label,
              LossTerms terms) const override;
  double LossAndGradient(std::span<const int> tokens, const UnitArgPair &label,
                         LossTerms terms) override;
  UnitArgPair Predict(std::span<const int> tokens) const override;

  const std::vector<UnitArgPair> &labels() const { return labels_; }
  // Index of |pair| in labels(), or -1.
  int LabelIndex(const UnitArgPair &pair) const;

 protected:
  void AddEnumerations(neural::Checkpoint &checkpoint) const override;

 private:
  std::vector<UnitArgPair> labels_;
  Encoder encoder_;
  neural::FeedForward head_;
};

class JDraggnModel : public GroundingModel {
 public:
  JDraggnModel(Vocabulary vocabulary, ModelConfig config);

  Architecture architecture() const override { return Architecture::kJDraggn; }
  Distributions Forward(std::span<const int> tokens) const override;
  double Loss(std::span<const int> tokens, const UnitArgPair &label,
              LossTerms terms) const override;
  double LossAndGradient(std::span<const int> tokens, const UnitArgPair &label,
                         LossTerms terms) override;

  Encoder &core() { return core_; }

 private:
  Encoder core_;
  neural::FeedForward unit_head_;
  neural::FeedForward arg_head_;
};

class IDraggnModel : public GroundingModel {
 public:
  IDraggnModel(Vocabulary vocabulary, ModelConfig config);

  Architecture architecture() const override { return Architecture::kIDraggn; }
  Distributions Forward(std::span<const int> tokens) const override;
  double Loss(std::span<const int> tokens, const UnitArgPair &label,
              LossTerms terms) const override;
  double LossAndGradient(std::span<const int> tokens, const UnitArgPair &label,
                         LossTerms terms) override;

  // Parameters of the unit path (embedding, GRU, unit head) and of the
  // argument path. The two sets are disjoint and cover parameters().
  std::vector<neural::Parameter *> UnitPathParameters();
  std::vector<neural::Parameter *> ArgumentPathParameters();

 private:
  Encoder unit_encoder_;
  neural::FeedForward unit_head_;
  Encoder arg_encoder_;
  neural::FeedForward arg_head_;
};

// Argmax over |probs| restricted to |allowed| indices; ties go to the
// earliest allowed index.
int MaskedArgmax(const neural::Vector &probs, std::span<const int> allowed);

// Sequential DRAGGN decode from two factor distributions.
UnitArgPair DecodeFactored(const neural::Vector &units,
                           const neural::Vector &arguments);

// Single-RNN output space: distinct labels of |records| in AllPairs() order.
std::vector<UnitArgPair> LabelSpace(std::span<const InstructionRecord> records);

// Builds an initialized (untrained) model; parameters uniform in
// [-init_scale, init_scale] from config.seed.
std::unique_ptr<GroundingModel> CreateModel(Architecture arch,
                                            Vocabulary vocabulary,
                                            std::vector<UnitArgPair> labels,
                                            const ModelConfig &config);

// Restores a model written by ToCheckpoint. Throws ParseError/LookupError on
// an inconsistent checkpoint.
std::unique_ptr<GroundingModel> ModelFromCheckpoint(
    const neural::Checkpoint &checkpoint);

struct TrainConfig {
  int epochs = 125;
  int batch_size = 16;
  double learning_rate = 1e-4;
  uint64_t seed = 0;  // drives example order
  std::function<void(int epoch, double mean_loss)> on_epoch;
};

struct TrainingHistory {
  std::vector<double> epoch_loss;  // mean per-example loss of each epoch
};

// Mini-batch Adam over |records| (every record is used, whatever its split
// tag). Gradients are averaged over each batch. Throws ContractViolation
// for an empty record list or a label the model cannot represent.
TrainingHistory Train(GroundingModel &model,
                      std::span<const InstructionRecord> records,
                      const TrainConfig &config);

// Builds the vocabulary and Single-RNN label space from |train| and trains
// a fresh model.
std::unique_ptr<GroundingModel> BuildAndTrain(
    Architecture arch, std::span<const InstructionRecord> train,
    const ModelConfig &model_config, const TrainConfig &train_config,
    TrainingHistory *history = nullptr);

struct Accuracy {
  int correct = 0;
  int total = 0;

  double value() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
};

struct EvalMetrics {
  Accuracy action;  // action records not tagged test-unseen
  Accuracy goal;
  Accuracy unseen;  // records tagged test-unseen
  int oov_tokens = 0;
  int total_tokens = 0;

  // Example-weighted mean over the three buckets.
  double overall() const;
};

// Action records are correct on an exact pair match; goal records when the
// grounded reward of the prediction equals that of the label on |map|
// (grounding failures count as wrong).
EvalMetrics Evaluate(const GroundingModel &model,
                     std::span<const InstructionRecord> records,
                     const GridMap &map);

}  // namespace draggn

#endif  // DRAGGN_MODELS_H_
