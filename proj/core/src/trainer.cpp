#include "numeracy/probe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <numeric>
#include <unordered_map>

#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy::probe {
namespace {

constexpr std::size_t kEvalChunk = 2048;

// One batch of rows re-indexed onto the distinct tokens it uses.
struct BatchView {
  std::vector<int> unique_ids;  // dataset vocab ids
  std::vector<int> index;       // slot-major into unique_ids
  std::vector<double> targets;
};

BatchView make_batch(const ProbeDataset& data, std::span<const std::size_t> rows) {
  BatchView view;
  const auto slots = static_cast<std::size_t>(data.slots());
  const std::size_t batch = rows.size();
  view.index.resize(slots * batch);
  view.targets.reserve(batch);
  std::unordered_map<int, int> local;
  local.reserve(slots * batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t r = rows[b];
    view.targets.push_back(data.targets[r]);
    for (std::size_t s = 0; s < slots; ++s) {
      const int id = data.ids[r * slots + s];
      auto [it, inserted] = local.try_emplace(id, static_cast<int>(view.unique_ids.size()));
      if (inserted) view.unique_ids.push_back(id);
      view.index[s * batch + b] = it->second;
    }
  }
  return view;
}

Matrix gather_columns(const Matrix& table, std::span<const int> ids) {
  Matrix out(table.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = table.col(ids[i]);
  return out;
}

std::vector<NumberToken> tokens_for(const ProbeDataset& data, std::span<const int> ids) {
  std::vector<NumberToken> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(data.vocab[static_cast<std::size_t>(id)]);
  return out;
}

void require_coverage(const embed::EmbeddingProvider& provider, const ProbeDataset& data) {
  auto missing = embed::validate_coverage(provider, data.vocab);
  if (!missing.empty()) throw CoverageError(std::move(missing));
}

// Mean loss over `rows` given precomputed embeddings of the whole vocabulary.
double mean_loss(const ProbeModel& model, const Matrix& vocab_embeddings, const ProbeDataset& data,
                 std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t start = 0; start < rows.size(); start += kEvalChunk) {
    auto chunk = rows.subspan(start, std::min(kEvalChunk, rows.size() - start));
    BatchView view = make_batch(data, chunk);
    Matrix inputs = gather_columns(vocab_embeddings, view.unique_ids);
    total += model.loss(inputs, view.index, view.targets) * static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(val_fraction > 0.0 && val_fraction <= 0.5)) throw ConfigError("val_fraction must be in (0, 0.5]");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (min_updates_per_epoch < 0 || max_updates_per_epoch < 0)
    throw ConfigError("updates per epoch bounds must be nonnegative");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

TrainedProbe train_probe(const ProbeSpec& spec, embed::EmbeddingProvider& provider,
                         const ProbeDataset& train, const TrainConfig& config) {
  spec.validate();
  config.validate();
  if (spec.task != train.task) throw ConfigError("probe task does not match dataset task");
  if (train.empty()) throw ConfigError("training set is empty");
  require_coverage(provider, train);

  TrainedProbe result;
  result.spec = spec;
  result.model = std::make_unique<ProbeModel>(spec, provider.dim(), derive_seed({config.seed, 0x70726f6265}));
  ProbeModel& model = *result.model;
  nn::ParamStore* encoder_params = provider.trainable() ? provider.parameters() : nullptr;

  // Train / validation rows.
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed({config.seed, 0x7370}));
  rng.shuffle(std::span<std::size_t>(order));
  std::size_t n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(order.size())));
  if (n_val == 0 && order.size() >= 2) n_val = 1;
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  // With a single row, it is used for both.
  const std::vector<std::size_t>& monitor_rows = val_rows.empty() ? train_rows : val_rows;

  const Matrix frozen_before = encoder_params ? Matrix() : provider.encode(train.vocab);
  auto vocab_embeddings = [&]() -> Matrix {
    return encoder_params ? provider.encode(train.vocab) : frozen_before;
  };

  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  const std::size_t pass_updates = (train_rows.size() + batch_size - 1) / batch_size;
  std::size_t epoch_updates = std::max(pass_updates, static_cast<std::size_t>(config.min_updates_per_epoch));
  if (config.max_updates_per_epoch > 0)
    epoch_updates = std::min(epoch_updates, static_cast<std::size_t>(config.max_updates_per_epoch));

  auto snapshot = [&] {
    std::vector<Matrix> s = model.params().snapshot();
    if (encoder_params) {
      auto e = encoder_params->snapshot();
      s.insert(s.end(), std::make_move_iterator(e.begin()), std::make_move_iterator(e.end()));
    }
    return s;
  };
  auto restore = [&](const std::vector<Matrix>& s) {
    const std::size_t n_head = model.params().params().size();
    model.params().restore({s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_head)});
    if (encoder_params) encoder_params->restore({s.begin() + static_cast<std::ptrdiff_t>(n_head), s.end()});
  };

  TrainHistory& history = result.history;
  history.best_val_loss = mean_loss(model, vocab_embeddings(), train, monitor_rows);
  std::vector<Matrix> best = snapshot();
  int epochs_without_improvement = 0;

  std::vector<std::size_t> cursor_rows = train_rows;
  std::size_t cursor = cursor_rows.size();  // forces a reshuffle first
  Matrix d_inputs;
  std::unique_ptr<embed::EncodeTape> tape;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t u = 0; u < epoch_updates; ++u) {
      if (cursor >= cursor_rows.size()) {
        rng.shuffle(std::span<std::size_t>(cursor_rows));
        cursor = 0;
      }
      const std::size_t take = std::min(batch_size, cursor_rows.size() - cursor);
      BatchView view = make_batch(train, std::span<const std::size_t>(cursor_rows).subspan(cursor, take));
      cursor += take;

      Matrix inputs;
      std::vector<NumberToken> batch_tokens;
      if (encoder_params) {
        batch_tokens = tokens_for(train, view.unique_ids);
        inputs = provider.encode_for_training(batch_tokens, tape);
      } else {
        inputs = gather_columns(frozen_before, view.unique_ids);
      }
      const double loss = model.forward_backward(inputs, view.index, view.targets,
                                                 encoder_params ? &d_inputs : nullptr);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("non-finite loss " + std::to_string(loss) + " at epoch " + std::to_string(epoch) +
                            ", update " + std::to_string(history.updates) + " (" + provider.name() + ", " +
                            std::string(to_string(spec.task)) + ")");
      }
      if (encoder_params) {
        provider.backward(*tape, d_inputs);
        nn::adam_step(*encoder_params, config.adam);
      }
      nn::adam_step(model.params(), config.adam);
      loss_sum += loss;
      ++history.updates;
    }
    if (!model.params().all_finite() || (encoder_params && !encoder_params->all_finite()))
      throw NonFiniteLoss("parameters became non-finite at epoch " + std::to_string(epoch));

    const double val = mean_loss(model, vocab_embeddings(), train, monitor_rows);
    history.train_loss.push_back(loss_sum / static_cast<double>(epoch_updates));
    history.val_loss.push_back(val);
    history.epochs_run = epoch + 1;
    if (!std::isfinite(val)) throw NonFiniteLoss("non-finite validation loss at epoch " + std::to_string(epoch));
    if (val < history.best_val_loss) {
      history.best_val_loss = val;
      history.best_epoch = epoch;
      best = snapshot();
      epochs_without_improvement = 0;
    } else if (++epochs_without_improvement >= config.patience) {
      break;
    }
  }
  restore(best);

  if (!encoder_params) {
    const Matrix frozen_after = provider.encode(train.vocab);
    if (frozen_after.size() != frozen_before.size() ||
        std::memcmp(frozen_after.data(), frozen_before.data(),
                    sizeof(double) * static_cast<std::size_t>(frozen_before.size())) != 0) {
      throw Error("frozen embedding provider changed during training");
    }
  }
  return result;
}

std::string_view to_string(Metric metric) {
  return metric == Metric::Accuracy5 ? "accuracy" : "rmse";
}

std::vector<double> predict(const ProbeModel& model, const embed::EmbeddingProvider& provider,
                            const ProbeDataset& data) {
  require_coverage(provider, data);
  const Matrix vocab = provider.encode(data.vocab);
  std::vector<double> out;
  out.reserve(data.size());
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t start = 0; start < rows.size(); start += kEvalChunk) {
    auto chunk = std::span<const std::size_t>(rows).subspan(start, std::min(kEvalChunk, rows.size() - start));
    BatchView view = make_batch(data, chunk);
    Matrix result = model.forward(gather_columns(vocab, view.unique_ids), view.index);
    for (Eigen::Index b = 0; b < result.cols(); ++b) {
      if (data.task == Task::ListMax) {
        Eigen::Index best = 0;
        result.col(b).maxCoeff(&best);
        out.push_back(static_cast<double>(best));
      } else {
        out.push_back(result(0, b));
      }
    }
  }
  return out;
}

MetricResult score(Task task, std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw Error("prediction/target count mismatch");
  MetricResult r;
  r.n = targets.size();
  if (task == Task::ListMax) {
    r.metric = Metric::Accuracy5;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) correct += predictions[i] == targets[i] ? 1 : 0;
    r.value = r.n ? static_cast<double>(correct) / static_cast<double>(r.n) : 0.0;
  } else {
    r.metric = Metric::RMSE;
    double sq = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) sq += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
    r.value = r.n ? std::sqrt(sq / static_cast<double>(r.n)) : 0.0;
  }
  return r;
}

MetricResult evaluate(const TrainedProbe& probe, const embed::EmbeddingProvider& provider,
                      const ProbeDataset& test) {
  if (probe.spec.task != test.task) throw ConfigError("probe task does not match dataset task");
  const auto predictions = predict(*probe.model, provider, test);
  return score(test.task, predictions, test.targets);
}

SweepResult predict_sweep(const TrainedProbe& probe, const embed::EmbeddingProvider& provider,
                          std::span<const std::int64_t> values, numeral::NumberFormat format,
                          taskgen::Range train_range) {
  if (probe.spec.task == Task::ListMax) throw ConfigError("prediction sweeps need a decode or add probe");
  SweepResult result;
  std::vector<taskgen::DecodeInstance> decode;
  std::vector<taskgen::AddInstance> add;
  std::vector<std::int64_t> kept;
  for (auto v : values) {
    NumberToken token(v, format);
    if (!provider.covers(token)) {
      result.skipped.push_back(token.surface());
      continue;
    }
    kept.push_back(v);
    if (probe.spec.task == Task::Decode)
      decode.push_back({token, token.value()});
    else
      add.push_back({token, token, 2.0 * token.value()});
  }
  if (kept.empty()) return result;
  ProbeDataset data = probe.spec.task == Task::Decode ? make_dataset(decode) : make_dataset(add);
  const auto predictions = predict(*probe.model, provider, data);
  const auto scale = numeral::units_per_one(format);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    SweepRow row;
    row.units = kept[i];
    row.value = static_cast<double>(kept[i]) / static_cast<double>(scale);
    row.prediction = predictions[i];
    row.in_train_range = kept[i] >= train_range.lo * scale && kept[i] <= train_range.hi * scale;
    result.rows.push_back(row);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "value,prediction,in_train_range\n";
  char buf[64];
  for (const auto& r : sweep.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.prediction);
    out << r.value << ',' << buf << ',' << (r.in_train_range ? "true" : "false") << '\n';
  }
}

}  // namespace numeracy::probe
