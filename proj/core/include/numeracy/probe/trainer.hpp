#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "numeracy/embedding.hpp"
#include "numeracy/probe/probe_model.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy::probe {

struct TrainConfig {
  int max_epochs = 100;
  int batch_size = 32;
  int patience = 5;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  nn::AdamConfig adam;
  /// An epoch is one pass over the training rows, stretched to at least
  /// this many updates by further reshuffled passes (0 disables).
  int min_updates_per_epoch = 0;
  /// Validation is run at least every this many updates; a pass longer than
  /// this is split into several epochs (0 disables).
  int max_updates_per_epoch = 0;

  /// Throws ConfigError.
  void validate() const;
};

struct TrainHistory {
  int epochs_run = 0;
  int best_epoch = -1;
  std::int64_t updates = 0;
  double best_val_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
};

/// A probe head after training, with best-validation parameters restored.
/// Trainable encoder parameters stay in the provider that was trained.
struct TrainedProbe {
  ProbeSpec spec;
  std::unique_ptr<ProbeModel> model;
  TrainHistory history;
};

/// Trains `spec` on `train` over `provider`.
///
/// A val_fraction slice of the (seeded) shuffled training rows is held out
/// for early stopping: training stops after `patience` epochs without a
/// lower validation loss, and the best parameters (head and trainable
/// encoder) are restored. Frozen providers are checked to encode the
/// vocabulary bit-identically before and after.
///
/// Throws CoverageError before any update when a token is not embeddable,
/// and NonFiniteLoss when a batch loss is NaN or infinite.
TrainedProbe train_probe(const ProbeSpec& spec, embed::EmbeddingProvider& provider,
                         const ProbeDataset& train, const TrainConfig& config);

enum class Metric { Accuracy5, RMSE };
std::string_view to_string(Metric metric);

struct MetricResult {
  Metric metric = Metric::RMSE;
  double value = 0.0;
  std::size_t n = 0;
};

/// Raw outputs: the argmax index for list max, the prediction otherwise.
std::vector<double> predict(const ProbeModel& model, const embed::EmbeddingProvider& provider,
                            const ProbeDataset& data);

/// Accuracy of argmax picks (list max) or root mean squared error.
MetricResult score(Task task, std::span<const double> predictions, std::span<const double> targets);

MetricResult evaluate(const TrainedProbe& probe, const embed::EmbeddingProvider& provider,
                      const ProbeDataset& test);

struct SweepRow {
  std::int64_t units = 0;
  double value = 0.0;
  double prediction = 0.0;
  bool in_train_range = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Surfaces skipped because the provider does not cover them.
  std::vector<std::string> skipped;
};

/// Predictions of a decode probe for each value (in the format's units),
/// flagged by whether the value lies inside `train_range`.
SweepResult predict_sweep(const TrainedProbe& probe, const embed::EmbeddingProvider& provider,
                          std::span<const std::int64_t> values, numeral::NumberFormat format,
                          taskgen::Range train_range);

/// CSV with header `value,prediction,in_train_range`.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace numeracy::probe
