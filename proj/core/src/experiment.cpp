#include "numeracy/runner/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "numeracy/char_encoder.hpp"
#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy::runner {

using numeral::NumberToken;
using probe::ProbeDataset;
using taskgen::Range;

namespace {

std::vector<std::int64_t> full_pool(Range r) {
  std::vector<std::int64_t> pool;
  pool.reserve(static_cast<std::size_t>(r.size()));
  for (std::int64_t v = r.lo; v <= r.hi; ++v) pool.push_back(v);
  return pool;
}

// Dataset for `pool`. `range_size` sets the list-max offset scale.
ProbeDataset build(const ExperimentConfig& c, std::span<const std::int64_t> pool, std::int64_t range_size,
                   std::size_t lists, std::uint64_t seed) {
  switch (c.task) {
    case probe::Task::ListMax: {
      if (c.format == numeral::NumberFormat::Float1) {
        taskgen::FloatListOptions o;
        o.count = lists;
        o.range_size = range_size;
        o.variance_factor = c.data.variance_factor;
        o.shared_fraction = c.data.float_shared_fraction;
        o.seed = seed;
        return probe::make_dataset(taskgen::gen_listmax_float(pool, o));
      }
      taskgen::ListMaxOptions o;
      o.count = lists;
      o.range_size = range_size;
      o.variance_factor = c.data.variance_factor;
      o.format = c.format;
      o.seed = seed;
      return probe::make_dataset(taskgen::gen_listmax(pool, o));
    }
    case probe::Task::Decode:
      return probe::make_dataset(taskgen::gen_decode(pool, c.format));
    case probe::Task::Add: {
      const double frac = taskgen::add_subsample_fraction(range_size, c.data.add_subsample_threshold,
                                                          c.data.add_subsample_fraction);
      return probe::make_dataset(taskgen::gen_add(pool, c.format, frac, seed));
    }
  }
  throw ConfigError("unknown task");
}

std::vector<NumberToken> all_tokens(const ShuffleData& data) {
  std::vector<NumberToken> out = data.train.vocab;
  for (const auto& t : data.tests) out.insert(out.end(), t.vocab.begin(), t.vocab.end());
  return out;
}

probe::TrainConfig cell_train_config(const ExperimentConfig& c, std::uint64_t shuffle) {
  probe::TrainConfig t = c.train;
  t.seed = derive_seed({c.train.seed, shuffle});
  return t;
}

std::unique_ptr<embed::EmbeddingTable> load_file_embedding(const EmbeddingSpec& spec) {
  if (spec.kind != EmbeddingKind::File) return nullptr;
  return std::make_unique<embed::EmbeddingTable>(embed::load_table(spec.path, spec.expected_dim));
}

}  // namespace

bool ExperimentResult::all_ok() const {
  for (const auto& c : cells)
    if (!c.ok) return false;
  return true;
}

std::uint64_t split_seed(Range range, std::uint64_t shuffle) {
  return derive_seed({static_cast<std::uint64_t>(range.lo), static_cast<std::uint64_t>(range.hi), shuffle});
}

ShuffleData make_shuffle_data(const ExperimentConfig& c, std::uint64_t shuffle) {
  ShuffleData d;
  if (c.mode == Mode::Interpolate) {
    d.split_seed = split_seed(c.range, shuffle);
    taskgen::PoolSplit split = taskgen::make_split(c.range, d.split_seed, c.data.train_fraction);
    d.train_pool = split.train_pool;
    d.train = build(c, split.train_pool, c.range.size(), c.data.train_lists, derive_seed({d.split_seed, 1}));
    d.test_ranges.push_back(c.range);
    d.tests.push_back(build(c, split.test_pool, c.range.size(), c.data.test_lists, derive_seed({d.split_seed, 2})));
    return d;
  }
  const Range train_range = c.extrapolation.train_range;
  d.split_seed = split_seed(train_range, shuffle);
  d.train_pool = full_pool(train_range);
  d.train = build(c, d.train_pool, train_range.size(), c.data.train_lists, derive_seed({d.split_seed, 1}));
  std::uint64_t i = 0;
  for (const Range& r : c.extrapolation.test_ranges) {
    d.test_ranges.push_back(r);
    d.tests.push_back(
        build(c, full_pool(r), train_range.size(), c.data.test_lists, derive_seed({d.split_seed, 2, i++})));
  }
  return d;
}

std::unique_ptr<embed::EmbeddingProvider> make_provider(const EmbeddingSpec& spec,
                                                        std::span<const NumberToken> tokens,
                                                        std::uint64_t shuffle,
                                                        const embed::EmbeddingTable* loaded) {
  switch (spec.kind) {
    case EmbeddingKind::Value:
      return std::make_unique<embed::ValueEmbedding>(embed::ValueEmbedConfig{spec.log_scale});
    case EmbeddingKind::Random: {
      std::vector<std::string> surfaces;
      std::unordered_set<std::string> seen;
      for (const auto& t : tokens)
        if (seen.insert(t.surface()).second) surfaces.push_back(t.surface());
      return std::make_unique<embed::EmbeddingTable>(embed::random_table(surfaces, spec.dim, spec.seed));
    }
    case EmbeddingKind::File: {
      if (!loaded) throw ConfigError("file embedding was not loaded");
      // A private copy restricted to this cell's surfaces keeps cells independent.
      auto table = std::make_unique<embed::EmbeddingTable>(loaded->dim(), embed::EmbeddingTable::Source::File,
                                                           spec.display_name());
      for (const auto& t : tokens)
        if (loaded->contains(t.surface()) && !table->contains(t.surface()))
          table->insert(t.surface(), loaded->lookup(t.surface()));
      return table;
    }
    case EmbeddingKind::CharCnn: {
      embed::CharCnnConfig cfg = spec.cnn;
      cfg.trainable = spec.trainable;
      cfg.seed = derive_seed({spec.seed, shuffle});
      return std::make_unique<embed::CharCnnEncoder>(cfg);
    }
    case EmbeddingKind::CharLstm: {
      embed::CharLstmConfig cfg = spec.lstm;
      cfg.trainable = spec.trainable;
      cfg.seed = derive_seed({spec.seed, shuffle});
      return std::make_unique<embed::CharLstmEncoder>(cfg);
    }
  }
  throw ConfigError("unknown embedding kind");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto loaded = load_file_embedding(config.embedding);

  ExperimentResult result;
  result.config = config;
  const std::size_t n_shuffles = config.shuffles.size();
  std::vector<std::vector<CellResult>> per_shuffle(n_shuffles);
  std::mutex log_mutex;

  auto template_cell = [&](std::uint64_t shuffle, Range range) {
    CellResult cell;
    cell.experiment = config.name;
    cell.task = config.task;
    cell.format = config.format;
    cell.range = range;
    cell.mode = config.mode;
    cell.embedding = config.embedding.display_name();
    cell.probe = std::string(probe::to_string(config.probe.head));
    cell.shuffle = shuffle;
    cell.metric = config.task == probe::Task::ListMax ? probe::Metric::Accuracy5 : probe::Metric::RMSE;
    return cell;
  };

  auto run_one = [&](std::size_t k) {
    const std::uint64_t shuffle = config.shuffles[k];
    const auto start = std::chrono::steady_clock::now();
    std::vector<CellResult> cells;
    std::vector<Range> ranges;
    if (config.mode == Mode::Interpolate) ranges.push_back(config.range);
    else ranges = config.extrapolation.test_ranges;
    for (const Range& r : ranges) cells.push_back(template_cell(shuffle, r));

    try {
      ShuffleData data = make_shuffle_data(config, shuffle);
      const auto tokens = all_tokens(data);
      auto provider = make_provider(config.embedding, tokens, shuffle, loaded.get());
      auto missing = embed::validate_coverage(*provider, tokens);
      if (!missing.empty()) throw CoverageError(std::move(missing));
      probe::TrainedProbe trained =
          probe::train_probe(config.probe, *provider, data.train, cell_train_config(config, shuffle));
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto m = probe::evaluate(trained, *provider, data.tests[i]);
        cells[i].metric = m.metric;
        cells[i].value = m.value;
        cells[i].test_size = m.n;
        cells[i].epochs = trained.history.epochs_run;
      }
    } catch (const std::exception& e) {
      for (auto& cell : cells) {
        cell.ok = false;
        cell.value = std::numeric_limits<double>::quiet_NaN();
        cell.error = e.what();
      }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& cell : cells) cell.seconds = seconds;

    if (options.log) {
      std::lock_guard lock(log_mutex);
      for (const auto& cell : cells) {
        *options.log << config.name << " shuffle=" << cell.shuffle << " [" << cell.range.lo << ","
                     << cell.range.hi << "] " << probe::to_string(cell.metric) << "=";
        if (cell.ok) *options.log << cell.value << " epochs=" << cell.epochs;
        else *options.log << "FAILED (" << cell.error << ")";
        *options.log << " " << seconds << "s\n";
      }
      options.log->flush();
    }
    per_shuffle[k] = std::move(cells);
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), n_shuffles);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n_shuffles; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n_shuffles;) run_one(k);
      });
    for (auto& t : pool) t.join();
  }

  for (auto& cells : per_shuffle)
    for (auto& cell : cells) result.cells.push_back(std::move(cell));
  return result;
}

std::vector<ExperimentResult> run_suite(const SuiteManifest& suite, const RunOptions& options) {
  std::vector<ExperimentResult> out;
  out.reserve(suite.experiments.size());
  for (const auto& config : suite.experiments) out.push_back(run_experiment(config, options));
  return out;
}

SweepOutput run_sweep(const ExperimentConfig& config, Range sweep_range, std::uint64_t shuffle) {
  config.validate();
  if (config.task == probe::Task::ListMax) throw ConfigError("sweeps need a decode or add probe");
  if (config.mode != Mode::Interpolate) throw ConfigError("sweeps train in interpolate mode");
  const auto loaded = load_file_embedding(config.embedding);

  ShuffleData data = make_shuffle_data(config, shuffle);
  std::vector<std::int64_t> values;
  const std::int64_t units = numeral::units_per_one(config.format);
  for (std::int64_t v = sweep_range.lo * units; v <= sweep_range.hi * units; ++v) values.push_back(v);

  auto tokens = all_tokens(data);
  for (std::int64_t v : values) {
    if (numeral::representable(v, config.format)) tokens.emplace_back(v, config.format);
  }
  auto provider = make_provider(config.embedding, tokens, shuffle, loaded.get());
  probe::TrainedProbe trained =
      probe::train_probe(config.probe, *provider, data.train, cell_train_config(config, shuffle));

  SweepOutput out;
  out.shuffle = shuffle;
  out.test = probe::evaluate(trained, *provider, data.tests.front());
  out.sweep = probe::predict_sweep(trained, *provider, values, config.format, config.range);
  return out;
}

}  // namespace numeracy::runner
