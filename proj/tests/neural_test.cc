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

#include <gtest/gtest.h>

#include <cmath>

#include "draggn/errors.h"
#include "oracles.h"

namespace draggn::neural {
namespace {

std::vector<double> ToStd(const Vector &v) { return {v.data(), v.data() + v.size()}; }

Vector RandomVector(Rng &rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.Uniform(-scale, scale);
  return v;
}

TEST(GruTest, ZeroParametersHalveTheState) {
  GruCell gru("g", 3, 4);
  Vector h(4);
  h << 0.3, -0.7, 1.0, 0.0;
  Vector x = Vector::Ones(3);
  Vector next = gru.Step(x, h);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(next[i], 0.5 * h[i]);
  EXPECT_TRUE(gru.Step(Vector::Zero(3), Vector::Zero(4)).isZero());
}

TEST(GruTest, MatchesReferenceImplementation) {
  Rng rng(3);
  GruCell gru("g", 5, 6);
  InitUniform(gru.w(), rng, 0.5);
  InitUniform(gru.u(), rng, 0.5);
  InitUniform(gru.b(), rng, 0.5);
  Vector h = RandomVector(rng, 6);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = RandomVector(rng, 5, 2.0);
    Vector got = gru.Step(x, h);
    std::vector<double> want = testing::ReferenceGruStep(
        gru.w().value, gru.u().value, gru.b().value, ToStd(x), ToStd(h));
    for (int i = 0; i < 6; ++i) ASSERT_NEAR(got[i], want[i], 1e-12);
    // Convex mix of h and a tanh value.
    EXPECT_LE(got.cwiseAbs().maxCoeff(),
              std::max(h.cwiseAbs().maxCoeff(), 1.0) + 1e-15);
    h = got;
  }
}

TEST(GruTest, SequenceForwardMatchesSteps) {
  Rng rng(4);
  GruCell gru("g", 3, 4);
  InitUniform(gru.w(), rng);
  InitUniform(gru.u(), rng);
  InitUniform(gru.b(), rng);
  Matrix inputs(5, 3);
  for (int t = 0; t < 5; ++t) inputs.row(t) = RandomVector(rng, 3).transpose();
  Vector h = Vector::Zero(4);
  for (int t = 0; t < 5; ++t) h = gru.Step(inputs.row(t).transpose(), h);
  EXPECT_TRUE(gru.Forward(inputs).isApprox(h, 1e-13));
}

TEST(SoftmaxTest, SumsToOneAndIsStable) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Vector p = Softmax(RandomVector(rng, 9, 40.0));
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  }
  Vector big(2);
  big << 1000.0, 0.0;
  EXPECT_NEAR(Softmax(big)[0], 1.0, 1e-15);
}

TEST(SoftmaxCrossEntropyTest, UniformAndDominantCases) {
  EXPECT_NEAR(SoftmaxCrossEntropy(Vector::Zero(10), 3).loss, std::log(10.0),
              1e-12);
  Vector logits = Vector::Zero(4);
  logits[2] = 50.0;
  EXPECT_NEAR(SoftmaxCrossEntropy(logits, 2).loss, 0.0, 1e-20);
  EXPECT_THROW(SoftmaxCrossEntropy(logits, 4), ContractViolation);
  EXPECT_THROW(SoftmaxCrossEntropy(logits, -1), ContractViolation);
}

TEST(SoftmaxCrossEntropyTest, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    Vector logits = RandomVector(rng, 7, 3.0);
    int label = static_cast<int>(rng.Below(7));
    Vector grad = SoftmaxCrossEntropy(logits, label).gradient;
    for (int i = 0; i < 7; ++i) {
      const double h = 1e-5;
      Vector plus = logits, minus = logits;
      plus[i] += h;
      minus[i] -= h;
      double fd = (SoftmaxCrossEntropy(plus, label).loss -
                   SoftmaxCrossEntropy(minus, label).loss) /
                  (2 * h);
      double rel = std::abs(fd - grad[i]) /
                   std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      EXPECT_LT(rel, 1e-6) << "logit " << i;
    }
  }
}

TEST(EmbeddingTest, RowsAndScatteredGradient) {
  Rng rng(7);
  Embedding emb("e", 5, 3);
  InitUniform(emb.table(), rng);
  std::vector<int> tokens = {2, 4, 2};
  Matrix out = emb.Forward(tokens);
  EXPECT_TRUE(out.row(0).isApprox(emb.table().value.row(2)));
  EXPECT_TRUE(out.row(1).isApprox(emb.table().value.row(4)));
  emb.table().ZeroGrad();
  emb.Backward(tokens, Matrix::Ones(3, 3));
  EXPECT_DOUBLE_EQ(emb.table().grad(2, 0), 2.0);
  EXPECT_DOUBLE_EQ(emb.table().grad(4, 1), 1.0);
  EXPECT_DOUBLE_EQ(emb.table().grad(0, 0), 0.0);
  std::vector<int> bad = {5};
  EXPECT_THROW(emb.Forward(bad), ContractViolation);
}

TEST(AdamTest, FirstStepMovesByLearningRateAgainstSign) {
  Parameter p("p", 3, 1);
  p.value << 1.0, -2.0, 0.5;
  p.grad << 0.3, -7.0, 1e-3;
  Matrix before = p.value;
  Adam adam;
  std::vector<Parameter *> params = {&p};
  adam.Step(params);
  EXPECT_EQ(adam.timestep(), 1);
  for (int i = 0; i < 3; ++i) {
    double delta = p.value(i, 0) - before(i, 0);
    double sign = p.grad(i, 0) > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(delta, -1e-4 * sign, 1e-8);
  }
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  Parameter p("p", 2, 2);
  p.value << 1, 2, 3, 4;
  Matrix before = p.value;
  Adam adam;
  std::vector<Parameter *> params = {&p};
  for (int i = 0; i < 50; ++i) {
    p.ZeroGrad();
    adam.Step(params);
  }
  EXPECT_EQ(p.value, before);
}

TEST(AdamTest, DescendsConvexQuadratic) {
  // f(x) = 0.5 * sum(a_i x_i^2)
  Parameter p("x", 4, 1);
  p.value << 3.0, -2.0, 1.0, 4.0;
  Vector a(4);
  a << 1.0, 2.0, 0.5, 3.0;
  auto f = [&] { return 0.5 * (a.array() * p.value.col(0).array().square()).sum(); };
  Adam adam({0.05});
  std::vector<Parameter *> params = {&p};
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) {
    p.grad = (a.array() * p.value.col(0).array()).matrix();
    adam.Step(params);
    values.push_back(f());
  }
  for (size_t i = 10; i < values.size(); ++i) {
    EXPECT_LE(values[i], values[i - 1] + 1e-12) << "step " << i;
  }
  EXPECT_LT(values.back(), 0.05 * values.front());
}

TEST(AdamTest, ShapeChangeIsRejected) {
  Parameter p("p", 2, 1), q("q", 3, 1);
  p.grad.setOnes();
  Adam adam;
  std::vector<Parameter *> one = {&p};
  adam.Step(one);
  std::vector<Parameter *> other = {&q};
  EXPECT_THROW(adam.Step(other), ContractViolation);
  std::vector<Parameter *> two = {&p, &q};
  EXPECT_THROW(adam.Step(two), ContractViolation);
}

TEST(GradCheckTest, LinearModelAgreesExactly) {
  Parameter w("w", 1, 5);
  Rng rng(8);
  InitUniform(w, rng, 1.0);
  Vector x = RandomVector(rng, 5);
  auto loss = [&] { return (w.value * x)(0, 0); };
  w.grad = x.transpose();
  std::vector<Parameter *> params = {&w};
  GradCheckReport report = GradCheck(loss, params);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_relative_error, 1e-9);
  EXPECT_EQ(report.checked, 5);
}

TEST(GradCheckTest, CorruptedGradientIsReported) {
  Parameter w("w", 1, 5);
  Rng rng(9);
  InitUniform(w, rng, 1.0);
  Vector x = RandomVector(rng, 5);
  auto loss = [&] { return (w.value * x)(0, 0); };
  w.grad = x.transpose();
  w.grad(0, 3) += 0.1;
  std::vector<Parameter *> params = {&w};
  GradCheckReport report = GradCheck(loss, params);
  EXPECT_FALSE(report.passed);
  EXPECT_GT(report.max_relative_error, 1e-4);
  EXPECT_EQ(report.worst_parameter, "w");
  EXPECT_EQ(report.worst_index, 3);
}

TEST(GradCheckTest, GruAndHeadBackwardPass) {
  Rng rng(10);
  GruCell gru("gru", 4, 5);
  FeedForward head("head", 5, 6, 3);
  std::vector<Parameter *> params = {&gru.w(),   &gru.u(),   &gru.b(),
                                     &head.w1(), &head.b1(), &head.w2(),
                                     &head.b2()};
  for (Parameter *p : params) InitUniform(*p, rng, 0.5);
  Matrix inputs(6, 4);
  for (int t = 0; t < 6; ++t) inputs.row(t) = RandomVector(rng, 4).transpose();
  auto loss = [&] {
    return SoftmaxCrossEntropy(head.Forward(gru.Forward(inputs)), 1).loss;
  };
  for (Parameter *p : params) p->ZeroGrad();
  GruCell::Cache gc;
  FeedForward::Cache fc;
  Vector logits = head.Forward(gru.Forward(inputs, &gc), &fc);
  Vector d_h = head.Backward(fc, SoftmaxCrossEntropy(logits, 1).gradient);
  Matrix d_inputs = gru.Backward(gc, d_h);

  GradCheckOptions options;
  options.samples_per_parameter = 1000;
  GradCheckReport report = GradCheck(loss, params, options);
  EXPECT_TRUE(report.passed) << report.worst_parameter << " "
                             << report.max_relative_error;

  // Input gradient against finite differences too.
  for (int t = 0; t < 6; ++t) {
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-5;
      double saved = inputs(t, j);
      inputs(t, j) = saved + h;
      double up = loss();
      inputs(t, j) = saved - h;
      double down = loss();
      inputs(t, j) = saved;
      double fd = (up - down) / (2 * h);
      EXPECT_NEAR(d_inputs(t, j), fd, 1e-4 * std::max(1e-6, std::abs(fd)) + 1e-10);
    }
  }
}

}  // namespace
}  // namespace draggn::neural
