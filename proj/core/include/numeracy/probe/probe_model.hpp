#pragma once

#include <span>

#include "numeracy/nn/layers.hpp"
#include "numeracy/probe/dataset.hpp"

namespace numeracy::probe {

using nn::Matrix;

enum class Head { LstmClassifier, Linear, Mlp3 };
enum class LossKind { NLL, MSE };

std::string_view to_string(Head head);
/// Accepts "lstm", "linear", "mlp3".
Head head_from_string(std::string_view name);

struct ProbeSpec {
  Task task = Task::Decode;
  Head head = Head::Mlp3;
  int lstm_hidden = 100;
  int mlp_hidden1 = 100;
  int mlp_hidden2 = 100;
  bool bidirectional = false;

  /// ListMax -> LSTM classifier; Decode and Add -> 3-layer MLP.
  static ProbeSpec defaults(Task task);
  LossKind loss() const { return task == Task::ListMax ? LossKind::NLL : LossKind::MSE; }
  /// Throws ConfigError for an invalid task/head pairing or sizes.
  void validate() const;
};

/// The trainable head of a probe, sitting on top of token embeddings.
///
/// Inputs arrive as K embedding columns plus an index of slots*B entries
/// laid out slot-major (entry s*B + b is the column for slot s of example
/// b), so a token shared by several examples is embedded once.
///
/// List max: an LSTM reads the five embeddings; one shared weight vector
/// maps each position's hidden state to a logit; softmax over positions.
/// Bidirectional mode adds a reverse LSTM with its own weight vector.
/// Decode: linear map or MLP on the embedding. Add: MLP on the
/// concatenation of both embeddings.
class ProbeModel {
 public:
  ProbeModel(const ProbeSpec& spec, Eigen::Index embed_dim, std::uint64_t seed);

  /// Logits (5 x B) for list max, predictions (1 x B) otherwise.
  Matrix forward(const Matrix& inputs, std::span<const int> index) const;

  /// Mean loss over the batch; accumulates head gradients and, when
  /// `d_inputs` is non-null, writes dL/d(inputs) (D x K).
  double forward_backward(const Matrix& inputs, std::span<const int> index,
                          std::span<const double> targets, Matrix* d_inputs);

  /// Mean loss without gradients.
  double loss(const Matrix& inputs, std::span<const int> index, std::span<const double> targets) const;

  const ProbeSpec& spec() const { return spec_; }
  Eigen::Index embed_dim() const { return embed_dim_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }

 private:
  struct Cache;
  Matrix run(const Matrix& inputs, std::span<const int> index, Cache* cache) const;

  ProbeSpec spec_;
  Eigen::Index embed_dim_;
  nn::ParamStore store_;
  nn::Lstm forward_lstm_;
  nn::Lstm backward_lstm_;
  nn::Param* score_forward_ = nullptr;   // 1 x H
  nn::Param* score_backward_ = nullptr;  // 1 x H
  nn::Dense dense1_;
  nn::Dense dense2_;
  nn::Dense dense3_;
};

}  // namespace numeracy::probe
