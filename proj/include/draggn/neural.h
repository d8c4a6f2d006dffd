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

// Fixed-architecture layers with hand-written backward passes: embedding
// lookup, GRU cell, two-layer ReLU feed-forward head, softmax cross-entropy,
// Adam and a central-difference gradient checker. Double precision
// throughout.

#ifndef DRAGGN_NEURAL_H_
#define DRAGGN_NEURAL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "draggn/random.h"

namespace draggn::neural {

using draggn::Rng;

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// A named trainable tensor and its gradient accumulator. Vectors are stored
// as n x 1 matrices.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string name, Eigen::Index rows, Eigen::Index cols);

  void ZeroGrad() { grad.setZero(); }
};

// Fills |param| uniformly in [-scale, scale].
void InitUniform(Parameter &param, Rng &rng, double scale = 0.08);

double Sigmoid(double x);

// Numerically stable softmax.
Vector Softmax(const Vector &logits);

struct CrossEntropy {
  double loss;
  Vector gradient;  // d loss / d logits
};

// loss = -log softmax(logits)[label], gradient = softmax - onehot(label).
// Throws ContractViolation for a label out of range.
CrossEntropy SoftmaxCrossEntropy(const Vector &logits, int label);

class Embedding {
 public:
  Embedding(const std::string &name, int vocab_size, int dim);

  // One row per token. Throws ContractViolation for out-of-range ids.
  Matrix Forward(std::span<const int> tokens) const;
  void Backward(std::span<const int> tokens, const Matrix &d_out);

  Parameter &table() { return table_; }
  const Parameter &table() const { return table_; }
  int dim() const { return static_cast<int>(table_.value.cols()); }
  int vocab_size() const { return static_cast<int>(table_.value.rows()); }

 private:
  Parameter table_;
};

// Gated recurrent unit. Gate blocks in w/u/b are stacked as
// [update z; reset r; candidate]:
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   c  = tanh(Wc x + Uc (r * h) + bc)
//   h' = (1 - z) * h + z * c
class GruCell {
 public:
  GruCell(const std::string &name, int input_dim, int hidden_dim);

  // Activations kept for the backward pass of a whole sequence.
  struct Cache {
    Matrix inputs;   // T x I
    Matrix hidden;   // (T+1) x H, row 0 is the initial state
    Matrix update;   // T x H
    Matrix reset;    // T x H
    Matrix cand;     // T x H
    Matrix reset_h;  // T x H, r * h_{t-1}
  };

  Vector Step(const Vector &x, const Vector &h) const;

  // Runs from h0 = 0 over the rows of |inputs| and returns the final state.
  Vector Forward(const Matrix &inputs, Cache *cache = nullptr) const;

  // Accumulates parameter gradients for d loss / d h_T and returns
  // d loss / d inputs.
  Matrix Backward(const Cache &cache, const Vector &d_final);

  int input_dim() const { return static_cast<int>(w_.value.cols()); }
  int hidden_dim() const { return static_cast<int>(u_.value.cols()); }

  Parameter &w() { return w_; }
  Parameter &u() { return u_; }
  Parameter &b() { return b_; }
  const Parameter &w() const { return w_; }
  const Parameter &u() const { return u_; }
  const Parameter &b() const { return b_; }

 private:
  Parameter w_;  // 3H x I
  Parameter u_;  // 3H x H
  Parameter b_;  // 3H x 1
};

// logits = W2 relu(W1 x + b1) + b2
class FeedForward {
 public:
  FeedForward(const std::string &name, int input_dim, int hidden_dim,
              int output_dim);

  struct Cache {
    Vector input;
    Vector hidden;  // post-ReLU
  };

  Vector Forward(const Vector &x, Cache *cache = nullptr) const;
  // Accumulates gradients and returns d loss / d x.
  Vector Backward(const Cache &cache, const Vector &d_logits);

  int output_dim() const { return static_cast<int>(w2_.value.rows()); }

  Parameter &w1() { return w1_; }
  Parameter &b1() { return b1_; }
  Parameter &w2() { return w2_; }
  Parameter &b2() { return b2_; }

 private:
  Parameter w1_, b1_, w2_, b2_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moments are created lazily on the first step and
// must keep matching the parameter shapes afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Applies one update from the gradients stored in |params|. Throws
  // ContractViolation when shapes differ from earlier steps.
  void Step(std::span<Parameter *const> params);

  int64_t timestep() const { return t_; }
  const AdamConfig &config() const { return config_; }

 private:
  AdamConfig config_;
  int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Entries probed per parameter (all entries if the tensor is smaller).
  int samples_per_parameter = 20;
  uint64_t seed = 1;
  // Denominator floor for the relative error.
  double floor = 1e-6;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  Eigen::Index worst_index = -1;
  int checked = 0;
  bool passed = true;
};

// Compares the gradients already stored in |params| against central
// differences of |loss|, which must evaluate the loss at the current
// parameter values. Relative error is |a - n| / max(|a|, |n|, floor).
// Parameter values are restored afterwards.
GradCheckReport GradCheck(const std::function<double()> &loss,
                          std::span<Parameter *const> params,
                          const GradCheckOptions &options = {});

}  // namespace draggn::neural

#endif  // DRAGGN_NEURAL_H_
