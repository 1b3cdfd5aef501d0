#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "numeracy/errors.hpp"
#include "numeracy/nn/checkpoint.hpp"
#include "numeracy/nn/gradcheck.hpp"
#include "numeracy/nn/layers.hpp"
#include "numeracy/nn/loss.hpp"
#include "numeracy/probe/gradcheck_suite.hpp"
#include "numeracy/random.hpp"

using namespace numeracy;
using namespace numeracy::nn;

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore store;
  auto& p = store.add("x", 1, 1);
  p.value(0, 0) = 0.5;
  p.grad(0, 0) = 1.0;
  AdamConfig cfg;
  adam_step(store, cfg);
  // m_hat = 1, v_hat = 1 after bias correction, so the step is lr / (1 + eps).
  EXPECT_NEAR(p.value(0, 0), 0.5 - cfg.lr / (1.0 + cfg.eps), 1e-15);
  EXPECT_EQ(p.grad(0, 0), 0.0);
  EXPECT_EQ(store.adam_steps, 1);
}

TEST(Adam, StepSizeIndependentOfGradientScale) {
  for (double g : {1e-3, 1.0, 1e3}) {
    ParamStore store;
    auto& p = store.add("x", 1, 1);
    p.grad(0, 0) = -g;
    adam_step(store, {});
    EXPECT_NEAR(p.value(0, 0), 1e-3, 1e-7);
  }
}

TEST(Loss, UniformLogitsGiveLogFive) {
  Matrix logits = Matrix::Constant(5, 3, 0.7);
  const std::vector<int> labels{0, 2, 4};
  Matrix grad;
  EXPECT_NEAR(softmax_nll(logits, labels, &grad), std::log(5.0), 1e-12);
  EXPECT_NEAR(grad(0, 0), (0.2 - 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(grad(1, 0), 0.2 / 3.0, 1e-12);
}

TEST(Loss, BatchLossIsMeanOfExampleLosses) {
  Rng rng(5);
  Matrix logits(5, 7);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = rng.normal() * 3.0;
  std::vector<int> labels{0, 1, 2, 3, 4, 0, 2};
  double sum = 0.0;
  for (int b = 0; b < 7; ++b) {
    const std::vector<int> one{labels[b]};
    sum += softmax_nll(logits.col(b), one, nullptr);
  }
  EXPECT_NEAR(softmax_nll(logits, labels, nullptr), sum / 7.0, 1e-12);

  Matrix pred = logits.topRows(1);
  std::vector<double> targets{1, 2, 3, 4, 5, 6, 7};
  double se = 0.0;
  for (int b = 0; b < 7; ++b) se += (pred(0, b) - targets[b]) * (pred(0, b) - targets[b]);
  EXPECT_NEAR(mse(pred, targets, nullptr), se / 7.0, 1e-12);
}

TEST(Loss, SoftmaxStableForLargeLogits) {
  Matrix logits(5, 1);
  logits << 1000, 999, 998, -1000, 0;
  Matrix p = softmax(logits);
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  const std::vector<int> label{0};
  EXPECT_TRUE(std::isfinite(softmax_nll(logits, label, nullptr)));
}

TEST(Lstm, SingleStepMatchesCellEquations) {
  ParamStore store;
  Lstm lstm(store, "l", 3, 4, 11);
  Rng rng(2);
  Matrix x(3, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  Matrix h = lstm.forward(x, {}, 1, nullptr);
  ASSERT_EQ(h.rows(), 4);
  ASSERT_EQ(h.cols(), 2);
  const Matrix& wx = store.find("l.wx")->value;
  const Matrix& b = store.find("l.b")->value;
  for (int col = 0; col < 2; ++col) {
    Eigen::VectorXd z = wx * x.col(col) + b;
    for (int k = 0; k < 4; ++k) {
      const double i = sigmoid(z(k)), o = sigmoid(z(8 + k)), g = std::tanh(z(12 + k));
      EXPECT_NEAR(h(k, col), o * std::tanh(i * g), 1e-12);
    }
  }
}

TEST(Lstm, ForgetBiasStartsAtOne) {
  ParamStore store;
  Lstm lstm(store, "l", 2, 5, 1);
  const Matrix& b = store.find("l.b")->value;
  EXPECT_EQ(b.middleRows(5, 5), Matrix::Ones(5, 1));
  EXPECT_EQ(b.topRows(5), Matrix::Zero(5, 1));
}

TEST(Lstm, IndexedInputsMatchExpandedInputs) {
  ParamStore store;
  Lstm lstm(store, "l", 2, 3, 4);
  Matrix pool(2, 3);
  pool << 0.1, -0.5, 2.0, 1.0, 0.3, -0.2;
  const std::vector<int> index{2, 0, 1, 1, 0, 2};  // 3 steps x 2 sequences
  Matrix expanded(2, 6);
  for (int j = 0; j < 6; ++j) expanded.col(j) = pool.col(index[j]);
  EXPECT_TRUE(lstm.forward(pool, index, 3, nullptr).isApprox(lstm.forward(expanded, {}, 3, nullptr), 1e-14));
}

TEST(Gradcheck, EveryModelFamily) {
  for (auto family : probe::all_model_families()) {
    const auto r = probe::gradcheck_family(family, 7);
    EXPECT_GT(r.checked, 0u) << to_string(family);
    EXPECT_LT(r.max_relative_error, 1e-4) << to_string(family) << " worst " << r.worst_param;
    if (family == probe::ModelFamily::LinearRegressor) EXPECT_LT(r.max_relative_error, 1e-6);
  }
}

TEST(Gradcheck, DetectsWrongGradient) {
  ParamStore store;
  auto& p = store.add("w", 2, 1);
  p.value << 0.3, -0.7;
  ParamStore* stores[] = {&store};
  auto loss = [&] { return p.value.squaredNorm(); };
  auto wrong = [&] { p.grad += 3.0 * p.value; };
  EXPECT_GT(gradcheck(stores, loss, wrong).max_relative_error, 0.1);
  auto right = [&] { p.grad += 2.0 * p.value; };
  EXPECT_LT(gradcheck(stores, loss, right).max_relative_error, 1e-8);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ParamStore a;
  Lstm la(a, "enc", 3, 4, 9);
  Dense da(a, "out", 4, 1, 10);
  auto& odd = a.add("odd", 1, 1);
  odd.value(0, 0) = 0.1 + 0.2;
  std::stringstream ss;
  const ParamStore* out[] = {&a};
  save_checkpoint(ss, out);

  ParamStore b;
  Lstm lb(b, "enc", 3, 4, 99);
  Dense db(b, "out", 4, 1, 98);
  b.add("odd", 1, 1);
  ParamStore* in[] = {&b};
  load_checkpoint(ss, in);
  for (const auto& p : a.params()) {
    const auto* q = b.find(p.name);
    ASSERT_NE(q, nullptr);
    EXPECT_TRUE((p.value.array() == q->value.array()).all()) << p.name;
  }
}

TEST(Checkpoint, ShapeMismatchAndMissingTensorThrow) {
  ParamStore a;
  a.add("w", 2, 2);
  std::stringstream ss;
  const ParamStore* out[] = {&a};
  save_checkpoint(ss, out);
  const std::string text = ss.str();

  ParamStore wrong_shape;
  wrong_shape.add("w", 3, 2);
  std::istringstream in1(text);
  ParamStore* s1[] = {&wrong_shape};
  EXPECT_THROW(load_checkpoint(in1, s1), Error);

  ParamStore missing;
  missing.add("v", 2, 2);
  std::istringstream in2(text);
  ParamStore* s2[] = {&missing};
  EXPECT_THROW(load_checkpoint(in2, s2), Error);

  std::istringstream garbage("not a checkpoint");
  EXPECT_THROW(load_checkpoint(garbage, s1), Error);
}
