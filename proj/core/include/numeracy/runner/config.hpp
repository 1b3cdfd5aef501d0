#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "numeracy/char_encoder.hpp"
#include "numeracy/probe/trainer.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy::runner {

enum class EmbeddingKind { Random, Value, File, CharCnn, CharLstm };
std::string_view to_string(EmbeddingKind kind);
EmbeddingKind embedding_kind_from_string(std::string_view name);

struct EmbeddingSpec {
  EmbeddingKind kind = EmbeddingKind::Value;
  /// Name used in reports; defaults to a name derived from kind/trainable.
  std::string label;
  /// Character encoders only: false gives the untrained baseline.
  bool trainable = true;
  /// Random tables.
  Eigen::Index dim = embed::kDefaultRandomDim;
  std::uint64_t seed = 0;
  /// Vector files.
  std::string path;
  std::optional<Eigen::Index> expected_dim;
  /// Value embedding.
  bool log_scale = true;
  embed::CharCnnConfig cnn;
  embed::CharLstmConfig lstm;

  std::string display_name() const;
};

struct DataConfig {
  std::size_t train_lists = taskgen::kDefaultTrainLists;
  std::size_t test_lists = taskgen::kDefaultTestLists;
  double variance_factor = taskgen::kDefaultVarianceFactor;
  double train_fraction = taskgen::kDefaultTrainFraction;
  std::int64_t add_subsample_threshold = 100;
  double add_subsample_fraction = 0.1;
  double float_shared_fraction = 0.5;
};

enum class Mode { Interpolate, Extrapolate };
std::string_view to_string(Mode mode);

/// One experiment: a task, number format and range probed with one
/// embedding over several shuffles.
///
/// For Float1 the range bounds are integer parts ([0, 99] means
/// 0.0 .. 99.9) and only list max is supported.
struct ExperimentConfig {
  std::string name;
  probe::Task task = probe::Task::ListMax;
  numeral::NumberFormat format = numeral::NumberFormat::Digits;
  taskgen::Range range{0, 99};
  Mode mode = Mode::Interpolate;
  taskgen::ExtrapolationSpec extrapolation;
  EmbeddingSpec embedding;
  probe::ProbeSpec probe = probe::ProbeSpec::defaults(probe::Task::ListMax);
  probe::TrainConfig train = default_train_config();
  DataConfig data;
  std::vector<std::uint64_t> shuffles{1, 2, 3, 4, 5};
  int parallelism = 1;

  /// 100 epochs of batch 32, patience 5 on a 10% validation slice, and at
  /// least 100 updates per epoch.
  static probe::TrainConfig default_train_config();
  /// Throws ConfigError.
  void validate() const;
};

/// Parses one experiment from JSON text (comments allowed). Missing keys
/// take the defaults above. Throws ConfigError.
ExperimentConfig parse_experiment(std::string_view json_text);
ExperimentConfig load_experiment(const std::filesystem::path& path);
/// Canonical JSON echo with every field spelled out.
std::string to_json(const ExperimentConfig& config, int indent = 2);

struct SuiteManifest {
  std::string name;
  std::vector<ExperimentConfig> experiments;
};

/// A manifest is `{"name": ..., "defaults": {...}, "experiments": [...]}`;
/// `defaults` is merge-patched under each experiment. Relative vector-file
/// paths resolve against `base_dir`.
SuiteManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});
SuiteManifest load_manifest(const std::filesystem::path& path);
/// True when the JSON document has an "experiments" array.
bool is_manifest(std::string_view json_text);

}  // namespace numeracy::runner
