#include <benchmark/benchmark.h>

#include "numeracy/embedding.hpp"
#include "numeracy/probe/trainer.hpp"
#include "numeracy/random.hpp"
#include "numeracy/taskgen.hpp"

namespace {

using namespace numeracy;

probe::ProbeDataset listmax_data(std::size_t count) {
  std::vector<std::int64_t> pool(80);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<std::int64_t>(i);
  taskgen::ListMaxOptions o;
  o.count = count;
  o.seed = 11;
  return probe::make_dataset(taskgen::gen_listmax(pool, o));
}

// One epoch of 320 updates on value-embedded list max, per iteration.
void BM_ListMaxValueEpoch(benchmark::State& state) {
  const auto data = listmax_data(32 * 320 * 10 / 9 + 1);
  embed::ValueEmbedding value;
  probe::TrainConfig cfg;
  cfg.max_epochs = 1;
  for (auto _ : state) {
    auto trained = probe::train_probe(probe::ProbeSpec::defaults(probe::Task::ListMax), value, data, cfg);
    benchmark::DoNotOptimize(trained.history.updates);
  }
  state.SetItemsProcessed(state.iterations() * 320);
}
BENCHMARK(BM_ListMaxValueEpoch)->Unit(benchmark::kMillisecond);

void BM_ListMaxRandomEpoch(benchmark::State& state) {
  const auto data = listmax_data(32 * 320 * 10 / 9 + 1);
  std::vector<std::string> surfaces;
  for (const auto& t : data.vocab) surfaces.push_back(t.surface());
  auto table = embed::random_table(surfaces, 300, 3);
  probe::TrainConfig cfg;
  cfg.max_epochs = 1;
  for (auto _ : state) {
    auto trained = probe::train_probe(probe::ProbeSpec::defaults(probe::Task::ListMax), table, data, cfg);
    benchmark::DoNotOptimize(trained.history.updates);
  }
  state.SetItemsProcessed(state.iterations() * 320);
}
BENCHMARK(BM_ListMaxRandomEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
