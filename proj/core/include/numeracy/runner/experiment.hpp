#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "numeracy/embedding.hpp"
#include "numeracy/runner/config.hpp"

namespace numeracy::runner {

/// One (experiment, shuffle, evaluation range) result. Failed cells carry
/// value NaN and an error message.
struct CellResult {
  std::string experiment;
  probe::Task task = probe::Task::ListMax;
  numeral::NumberFormat format = numeral::NumberFormat::Digits;
  taskgen::Range range;
  Mode mode = Mode::Interpolate;
  std::string embedding;
  std::string probe;
  std::uint64_t shuffle = 0;
  probe::Metric metric = probe::Metric::RMSE;
  double value = 0.0;
  bool ok = true;
  std::string error;
  std::size_t test_size = 0;
  int epochs = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Ordered by shuffle (as listed), then test range.
  std::vector<CellResult> cells;

  bool all_ok() const;
};

struct RunOptions {
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

/// Datasets for one shuffle: training rows and one test set per evaluation
/// range (a single range in interpolation mode).
struct ShuffleData {
  std::uint64_t split_seed = 0;
  std::vector<std::int64_t> train_pool;
  probe::ProbeDataset train;
  std::vector<taskgen::Range> test_ranges;
  std::vector<probe::ProbeDataset> tests;
};

/// Split seeds depend only on the range and shuffle index, so every
/// embedding sees the same pools.
std::uint64_t split_seed(taskgen::Range range, std::uint64_t shuffle);

ShuffleData make_shuffle_data(const ExperimentConfig& config, std::uint64_t shuffle);

/// Builds the embedding for one cell. `tokens` must list every token the
/// cell will encode (random tables are drawn for exactly these surfaces).
/// `loaded` is the already parsed vector file for File embeddings.
std::unique_ptr<embed::EmbeddingProvider> make_provider(const EmbeddingSpec& spec,
                                                        std::span<const numeral::NumberToken> tokens,
                                                        std::uint64_t shuffle,
                                                        const embed::EmbeddingTable* loaded = nullptr);

/// Runs every shuffle of `config`. Cell failures (coverage, non-finite
/// loss, ...) are recorded rather than thrown; ConfigError and vector-file
/// errors still throw.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::vector<ExperimentResult> run_suite(const SuiteManifest& suite, const RunOptions& options = {});

struct SweepOutput {
  std::uint64_t shuffle = 0;
  probe::SweepResult sweep;
  /// Test metric on the held-out split of the training range.
  probe::MetricResult test;
};

/// Trains a decode (or add) probe as in run_experiment for one shuffle and
/// predicts every value of `sweep_range`.
SweepOutput run_sweep(const ExperimentConfig& config, taskgen::Range sweep_range, std::uint64_t shuffle);

}  // namespace numeracy::runner
