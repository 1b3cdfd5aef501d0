#include "numeracy/probe/probe_model.hpp"

#include "numeracy/errors.hpp"
#include "numeracy/nn/loss.hpp"
#include "numeracy/random.hpp"

namespace numeracy::probe {

std::string_view to_string(Head head) {
  switch (head) {
    case Head::LstmClassifier: return "lstm";
    case Head::Linear: return "linear";
    case Head::Mlp3: return "mlp3";
  }
  return "unknown";
}

Head head_from_string(std::string_view name) {
  if (name == "lstm" || name == "lstm_classifier") return Head::LstmClassifier;
  if (name == "linear") return Head::Linear;
  if (name == "mlp3" || name == "mlp") return Head::Mlp3;
  throw ConfigError("unknown probe head '" + std::string(name) + "'");
}

ProbeSpec ProbeSpec::defaults(Task task) {
  ProbeSpec spec;
  spec.task = task;
  spec.head = task == Task::ListMax ? Head::LstmClassifier : Head::Mlp3;
  return spec;
}

void ProbeSpec::validate() const {
  switch (task) {
    case Task::ListMax:
      if (head != Head::LstmClassifier) throw ConfigError("list max requires the lstm head");
      break;
    case Task::Decode:
      if (head != Head::Linear && head != Head::Mlp3) throw ConfigError("decode requires a linear or mlp3 head");
      break;
    case Task::Add:
      if (head != Head::Mlp3) throw ConfigError("addition requires the mlp3 head");
      break;
  }
  if (lstm_hidden <= 0 || mlp_hidden1 <= 0 || mlp_hidden2 <= 0)
    throw ConfigError("probe hidden sizes must be positive");
}

struct ProbeModel::Cache {
  Eigen::Index batch = 0;
  nn::Lstm::Tape forward_tape;
  nn::Lstm::Tape backward_tape;
  std::vector<int> reversed;
  Matrix x, pre1, h1, pre2, h2;
};

ProbeModel::ProbeModel(const ProbeSpec& spec, Eigen::Index embed_dim, std::uint64_t seed)
    : spec_(spec), embed_dim_(embed_dim) {
  spec_.validate();
  if (embed_dim <= 0) throw ConfigError("embedding dimension must be positive");
  if (spec_.task == Task::ListMax) {
    const Eigen::Index h = spec_.lstm_hidden;
    forward_lstm_ = nn::Lstm(store_, "probe.lstm_fwd", embed_dim, h, derive_seed({seed, 1}));
    score_forward_ = &store_.add("probe.score_fwd", 1, h);
    nn::xavier_uniform(score_forward_->value, static_cast<double>(h), 1.0, derive_seed({seed, 2}));
    if (spec_.bidirectional) {
      backward_lstm_ = nn::Lstm(store_, "probe.lstm_bwd", embed_dim, h, derive_seed({seed, 3}));
      score_backward_ = &store_.add("probe.score_bwd", 1, h);
      nn::xavier_uniform(score_backward_->value, static_cast<double>(h), 1.0, derive_seed({seed, 4}));
    }
    return;
  }
  const Eigen::Index in = embed_dim * slots_for(spec_.task);
  if (spec_.head == Head::Linear) {
    dense1_ = nn::Dense(store_, "probe.linear", in, 1, derive_seed({seed, 1}));
  } else {
    dense1_ = nn::Dense(store_, "probe.mlp1", in, spec_.mlp_hidden1, derive_seed({seed, 1}));
    dense2_ = nn::Dense(store_, "probe.mlp2", spec_.mlp_hidden1, spec_.mlp_hidden2, derive_seed({seed, 2}));
    dense3_ = nn::Dense(store_, "probe.mlp3", spec_.mlp_hidden2, 1, derive_seed({seed, 3}));
  }
}

Matrix ProbeModel::run(const Matrix& inputs, std::span<const int> index, Cache* cache) const {
  const Eigen::Index slots = slots_for(spec_.task);
  const Eigen::Index batch = static_cast<Eigen::Index>(index.size()) / slots;
  if (inputs.rows() != embed_dim_) throw Error("probe input dimension mismatch");

  if (spec_.task == Task::ListMax) {
    nn::Lstm::Tape* ft = cache ? &cache->forward_tape : nullptr;
    Matrix hidden = forward_lstm_.forward(inputs, index, slots, ft);
    Matrix scores = score_forward_->value * hidden;  // 1 x T*B
    Matrix logits(slots, batch);
    for (Eigen::Index t = 0; t < slots; ++t) logits.row(t) = scores.middleCols(t * batch, batch);
    if (spec_.bidirectional) {
      std::vector<int> reversed(index.size());
      for (Eigen::Index t = 0; t < slots; ++t)
        for (Eigen::Index b = 0; b < batch; ++b)
          reversed[static_cast<std::size_t>(t * batch + b)] = index[static_cast<std::size_t>((slots - 1 - t) * batch + b)];
      Matrix hidden_b = backward_lstm_.forward(inputs, reversed, slots, cache ? &cache->backward_tape : nullptr);
      Matrix scores_b = score_backward_->value * hidden_b;
      for (Eigen::Index t = 0; t < slots; ++t)
        logits.row(t) += scores_b.middleCols((slots - 1 - t) * batch, batch);
      if (cache) cache->reversed = std::move(reversed);
    }
    if (cache) cache->batch = batch;
    return logits;
  }

  Matrix x(embed_dim_ * slots, batch);
  for (Eigen::Index s = 0; s < slots; ++s)
    for (Eigen::Index b = 0; b < batch; ++b)
      x.block(s * embed_dim_, b, embed_dim_, 1) = inputs.col(index[static_cast<std::size_t>(s * batch + b)]);

  Matrix out;
  if (spec_.head == Head::Linear) {
    out = dense1_.forward(x);
  } else {
    Matrix pre1 = dense1_.forward(x);
    Matrix h1 = nn::relu(pre1);
    Matrix pre2 = dense2_.forward(h1);
    Matrix h2 = nn::relu(pre2);
    out = dense3_.forward(h2);
    if (cache) {
      cache->pre1 = std::move(pre1);
      cache->h1 = std::move(h1);
      cache->pre2 = std::move(pre2);
      cache->h2 = std::move(h2);
    }
  }
  if (cache) {
    cache->x = std::move(x);
    cache->batch = batch;
  }
  return out;
}

Matrix ProbeModel::forward(const Matrix& inputs, std::span<const int> index) const {
  return run(inputs, index, nullptr);
}

double ProbeModel::loss(const Matrix& inputs, std::span<const int> index,
                        std::span<const double> targets) const {
  Matrix out = run(inputs, index, nullptr);
  if (spec_.task == Task::ListMax) {
    std::vector<int> labels(targets.begin(), targets.end());
    return nn::softmax_nll(out, labels, nullptr);
  }
  return nn::mse(out, targets, nullptr);
}

double ProbeModel::forward_backward(const Matrix& inputs, std::span<const int> index,
                                    std::span<const double> targets, Matrix* d_inputs) {
  Cache cache;
  Matrix out = run(inputs, index, &cache);
  const Eigen::Index slots = slots_for(spec_.task);
  const Eigen::Index batch = cache.batch;
  const bool want_dx = d_inputs != nullptr;

  if (spec_.task == Task::ListMax) {
    std::vector<int> labels(targets.begin(), targets.end());
    Matrix d_logits;
    const double l = nn::softmax_nll(out, labels, &d_logits);
    Matrix d_scores(1, slots * batch);
    for (Eigen::Index t = 0; t < slots; ++t) d_scores.middleCols(t * batch, batch) = d_logits.row(t);
    score_forward_->grad.noalias() += d_scores * cache.forward_tape.hidden.transpose();
    Matrix d_hidden = score_forward_->value.transpose() * d_scores;
    Matrix dx = forward_lstm_.backward(cache.forward_tape, d_hidden, want_dx);
    if (spec_.bidirectional) {
      Matrix d_scores_b(1, slots * batch);
      for (Eigen::Index t = 0; t < slots; ++t)
        d_scores_b.middleCols((slots - 1 - t) * batch, batch) = d_logits.row(t);
      score_backward_->grad.noalias() += d_scores_b * cache.backward_tape.hidden.transpose();
      Matrix d_hidden_b = score_backward_->value.transpose() * d_scores_b;
      Matrix dx_b = backward_lstm_.backward(cache.backward_tape, d_hidden_b, want_dx);
      if (want_dx) dx += dx_b;
    }
    if (want_dx) *d_inputs = std::move(dx);
    return l;
  }

  Matrix d_out;
  const double l = nn::mse(out, targets, &d_out);
  Matrix dx;
  if (spec_.head == Head::Linear) {
    dx = dense1_.backward(cache.x, d_out, want_dx);
  } else {
    Matrix d_h2 = dense3_.backward(cache.h2, d_out, true);
    Matrix d_h1 = dense2_.backward(cache.h1, nn::relu_backward(cache.pre2, d_h2), true);
    dx = dense1_.backward(cache.x, nn::relu_backward(cache.pre1, d_h1), want_dx);
  }
  if (want_dx) {
    d_inputs->setZero(embed_dim_, inputs.cols());
    for (Eigen::Index s = 0; s < slots; ++s)
      for (Eigen::Index b = 0; b < batch; ++b)
        d_inputs->col(index[static_cast<std::size_t>(s * batch + b)]) += dx.block(s * embed_dim_, b, embed_dim_, 1);
  }
  return l;
}

}  // namespace numeracy::probe
