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

#include "draggn/neural.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "draggn/errors.h"

namespace draggn::neural {

Parameter::Parameter(std::string name, Eigen::Index rows, Eigen::Index cols)
    : name(std::move(name)),
      value(Matrix::Zero(rows, cols)),
      grad(Matrix::Zero(rows, cols)) {}

void InitUniform(Parameter &param, Rng &rng, double scale) {
  for (Eigen::Index i = 0; i < param.value.size(); ++i) {
    param.value.data()[i] = rng.Uniform(-scale, scale);
  }
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Vector Softmax(const Vector &logits) {
  Vector out = (logits.array() - logits.maxCoeff()).exp();
  return out / out.sum();
}

CrossEntropy SoftmaxCrossEntropy(const Vector &logits, int label) {
  if (label < 0 || label >= logits.size()) {
    throw ContractViolation("label " + std::to_string(label) +
                            " out of range for " +
                            std::to_string(logits.size()) + " classes");
  }
  double max = logits.maxCoeff();
  double log_sum = std::log((logits.array() - max).exp().sum()) + max;
  CrossEntropy out{log_sum - logits[label], Softmax(logits)};
  out.gradient[label] -= 1.0;
  return out;
}

Embedding::Embedding(const std::string &name, int vocab_size, int dim)
    : table_(name, vocab_size, dim) {}

Matrix Embedding::Forward(std::span<const int> tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), dim());
  for (size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] < 0 || tokens[t] >= vocab_size()) {
      throw ContractViolation("token id out of range");
    }
    out.row(t) = table_.value.row(tokens[t]);
  }
  return out;
}

void Embedding::Backward(std::span<const int> tokens, const Matrix &d_out) {
  for (size_t t = 0; t < tokens.size(); ++t) {
    table_.grad.row(tokens[t]) += d_out.row(t);
  }
}

GruCell::GruCell(const std::string &name, int input_dim, int hidden_dim)
    : w_(name + ".w", 3 * hidden_dim, input_dim),
      u_(name + ".u", 3 * hidden_dim, hidden_dim),
      b_(name + ".b", 3 * hidden_dim, 1) {}

Vector GruCell::Step(const Vector &x, const Vector &h) const {
  const Eigen::Index hd = hidden_dim();
  if (x.size() != input_dim() || h.size() != hd) {
    throw ContractViolation("GRU step shape mismatch");
  }
  Vector xw = w_.value * x + b_.value.col(0);
  Vector uh = u_.value.topRows(2 * hd) * h;
  Vector z = (xw.head(hd) + uh.head(hd)).unaryExpr(&Sigmoid);
  Vector r = (xw.segment(hd, hd) + uh.segment(hd, hd)).unaryExpr(&Sigmoid);
  Vector rh = r.cwiseProduct(h);
  Vector c =
      (xw.tail(hd) + u_.value.bottomRows(hd) * rh).array().tanh().matrix();
  return (Vector::Ones(hd) - z).cwiseProduct(h) + z.cwiseProduct(c);
}

Vector GruCell::Forward(const Matrix &inputs, Cache *cache) const {
  const Eigen::Index hd = hidden_dim();
  const Eigen::Index steps = inputs.rows();
  if (inputs.cols() != input_dim()) {
    throw ContractViolation("GRU input width mismatch");
  }
  // Input projections for every step at once.
  Matrix xw = inputs * w_.value.transpose();
  xw.rowwise() += b_.value.col(0).transpose();

  if (cache != nullptr) {
    cache->inputs = inputs;
    cache->hidden.setZero(steps + 1, hd);
    cache->update.resize(steps, hd);
    cache->reset.resize(steps, hd);
    cache->cand.resize(steps, hd);
    cache->reset_h.resize(steps, hd);
  }
  Vector h = Vector::Zero(hd);
  Vector uh(2 * hd), z(hd), r(hd), rh(hd), c(hd);
  for (Eigen::Index t = 0; t < steps; ++t) {
    uh.noalias() = u_.value.topRows(2 * hd) * h;
    for (Eigen::Index i = 0; i < hd; ++i) {
      z[i] = Sigmoid(xw(t, i) + uh[i]);
      r[i] = Sigmoid(xw(t, hd + i) + uh[hd + i]);
      rh[i] = r[i] * h[i];
    }
    c.noalias() = u_.value.bottomRows(hd) * rh;
    for (Eigen::Index i = 0; i < hd; ++i) {
      c[i] = std::tanh(c[i] + xw(t, 2 * hd + i));
      h[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
    }
    if (cache != nullptr) {
      cache->update.row(t) = z.transpose();
      cache->reset.row(t) = r.transpose();
      cache->cand.row(t) = c.transpose();
      cache->reset_h.row(t) = rh.transpose();
      cache->hidden.row(t + 1) = h.transpose();
    }
  }
  return h;
}

Matrix GruCell::Backward(const Cache &cache, const Vector &d_final) {
  const Eigen::Index hd = hidden_dim();
  const Eigen::Index steps = cache.inputs.rows();
  // Pre-activation gradients, one row per step, gate blocks as in w/u/b.
  Matrix d_pre(steps, 3 * hd);
  Vector dh = d_final;
  Vector da_c(hd), da_zr(2 * hd), d_rh(hd);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    auto h_prev = cache.hidden.row(t);
    auto z = cache.update.row(t);
    auto r = cache.reset.row(t);
    auto c = cache.cand.row(t);
    Vector dh_prev(hd);
    for (Eigen::Index i = 0; i < hd; ++i) {
      double dz = dh[i] * (c[i] - h_prev[i]);
      double dc = dh[i] * z[i];
      dh_prev[i] = dh[i] * (1.0 - z[i]);
      da_c[i] = dc * (1.0 - c[i] * c[i]);
      da_zr[i] = dz * z[i] * (1.0 - z[i]);
    }
    d_rh.noalias() = u_.value.bottomRows(hd).transpose() * da_c;
    for (Eigen::Index i = 0; i < hd; ++i) {
      double dr = d_rh[i] * h_prev[i];
      dh_prev[i] += d_rh[i] * r[i];
      da_zr[hd + i] = dr * r[i] * (1.0 - r[i]);
    }
    dh_prev.noalias() += u_.value.topRows(2 * hd).transpose() * da_zr;
    d_pre.row(t).head(2 * hd) = da_zr.transpose();
    d_pre.row(t).tail(hd) = da_c.transpose();
    dh = dh_prev;
  }
  w_.grad.noalias() += d_pre.transpose() * cache.inputs;
  b_.grad.col(0) += d_pre.colwise().sum().transpose();
  u_.grad.topRows(2 * hd).noalias() +=
      d_pre.leftCols(2 * hd).transpose() * cache.hidden.topRows(steps);
  u_.grad.bottomRows(hd).noalias() +=
      d_pre.rightCols(hd).transpose() * cache.reset_h;
  return d_pre * w_.value;
}

FeedForward::FeedForward(const std::string &name, int input_dim,
                         int hidden_dim, int output_dim)
    : w1_(name + ".w1", hidden_dim, input_dim),
      b1_(name + ".b1", hidden_dim, 1),
      w2_(name + ".w2", output_dim, hidden_dim),
      b2_(name + ".b2", output_dim, 1) {}

Vector FeedForward::Forward(const Vector &x, Cache *cache) const {
  if (x.size() != w1_.value.cols()) {
    throw ContractViolation("feed-forward input width mismatch");
  }
  Vector hidden = (w1_.value * x + b1_.value.col(0)).cwiseMax(0.0);
  Vector logits = w2_.value * hidden + b2_.value.col(0);
  if (cache != nullptr) {
    cache->input = x;
    cache->hidden = std::move(hidden);
  }
  return logits;
}

Vector FeedForward::Backward(const Cache &cache, const Vector &d_logits) {
  w2_.grad.noalias() += d_logits * cache.hidden.transpose();
  b2_.grad.col(0) += d_logits;
  Vector d_hidden = w2_.value.transpose() * d_logits;
  for (Eigen::Index i = 0; i < d_hidden.size(); ++i) {
    if (cache.hidden[i] <= 0.0) d_hidden[i] = 0.0;
  }
  w1_.grad.noalias() += d_hidden * cache.input.transpose();
  b1_.grad.col(0) += d_hidden;
  return w1_.value.transpose() * d_hidden;
}

void Adam::Step(std::span<Parameter *const> params) {
  if (m_.empty()) {
    for (const Parameter *p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw ContractViolation("Adam: parameter count changed between steps");
  }
  ++t_;
  const double lr = config_.learning_rate;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (size_t k = 0; k < params.size(); ++k) {
    Parameter &p = *params[k];
    if (p.grad.rows() != m_[k].rows() || p.grad.cols() != m_[k].cols() ||
        p.value.rows() != m_[k].rows() || p.value.cols() != m_[k].cols()) {
      throw ContractViolation("Adam: shape mismatch for " + p.name);
    }
    double *value = p.value.data();
    const double *grad = p.grad.data();
    double *m = m_[k].data();
    double *v = v_[k].data();
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      double m_hat = m[i] / c1;
      double v_hat = v[i] / c2;
      value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

GradCheckReport GradCheck(const std::function<double()> &loss,
                          std::span<Parameter *const> params,
                          const GradCheckOptions &options) {
  GradCheckReport report;
  Rng rng(options.seed);
  for (Parameter *p : params) {
    const Eigen::Index size = p->value.size();
    std::vector<Eigen::Index> probe(size);
    std::iota(probe.begin(), probe.end(), 0);
    if (size > options.samples_per_parameter) {
      // Partial Fisher-Yates for a uniform subsample.
      for (int i = 0; i < options.samples_per_parameter; ++i) {
        auto j = i + static_cast<Eigen::Index>(rng.Below(size - i));
        std::swap(probe[i], probe[j]);
      }
      probe.resize(options.samples_per_parameter);
    }
    for (Eigen::Index index : probe) {
      double &x = p->value.data()[index];
      const double saved = x;
      x = saved + options.step;
      double plus = loss();
      x = saved - options.step;
      double minus = loss();
      x = saved;
      double numeric = (plus - minus) / (2.0 * options.step);
      double analytic = p->grad.data()[index];
      double denom =
          std::max({std::abs(numeric), std::abs(analytic), options.floor});
      double rel = std::abs(numeric - analytic) / denom;
      ++report.checked;
      if (report.worst_index < 0 || rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = p->name;
        report.worst_index = index;
      }
    }
  }
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace draggn::neural
