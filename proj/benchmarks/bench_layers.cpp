#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "numeracy/char_encoder.hpp"
#include "numeracy/nn/layers.hpp"
#include "numeracy/random.hpp"

namespace {

using numeracy::nn::Matrix;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  numeracy::Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// List-max shapes: 5 steps of batch 32 reading from `unique` embedding columns.
std::vector<int> listmax_index(int batch, int unique, std::uint64_t seed) {
  numeracy::Rng rng(seed);
  std::vector<int> index(static_cast<std::size_t>(5 * batch));
  for (auto& i : index) i = static_cast<int>(rng.below(static_cast<std::uint64_t>(unique)));
  return index;
}

void BM_LstmForward(benchmark::State& state) {
  const auto dim = state.range(0);
  numeracy::nn::ParamStore store;
  numeracy::nn::Lstm lstm(store, "lstm", dim, 100, 1);
  const Matrix inputs = random_matrix(dim, 100, 2);
  const auto index = listmax_index(32, 100, 3);
  for (auto _ : state) benchmark::DoNotOptimize(lstm.forward(inputs, index, 5, nullptr));
}
BENCHMARK(BM_LstmForward)->Arg(1)->Arg(112)->Arg(300);

void BM_LstmForwardBackward(benchmark::State& state) {
  const auto dim = state.range(0);
  numeracy::nn::ParamStore store;
  numeracy::nn::Lstm lstm(store, "lstm", dim, 100, 1);
  const Matrix inputs = random_matrix(dim, 100, 2);
  const auto index = listmax_index(32, 100, 3);
  const Matrix d_hidden = random_matrix(100, 5 * 32, 4);
  numeracy::nn::Lstm::Tape tape;
  for (auto _ : state) {
    lstm.forward(inputs, index, 5, &tape);
    benchmark::DoNotOptimize(lstm.backward(tape, d_hidden, dim > 1));
  }
}
BENCHMARK(BM_LstmForwardBackward)->Arg(1)->Arg(112)->Arg(300);

std::vector<numeracy::numeral::NumberToken> tokens_upto(std::int64_t n) {
  std::vector<numeracy::numeral::NumberToken> out;
  for (std::int64_t v = 0; v < n; ++v) out.emplace_back(v, numeracy::numeral::NumberFormat::Digits);
  return out;
}

void BM_CharCnnEncode(benchmark::State& state) {
  numeracy::embed::CharCnnEncoder cnn;
  const auto tokens = tokens_upto(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cnn.encode(tokens));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CharCnnEncode)->Arg(160)->Arg(1000);

void BM_CharCnnTrainStep(benchmark::State& state) {
  numeracy::embed::CharCnnEncoder cnn;
  const auto tokens = tokens_upto(state.range(0));
  std::unique_ptr<numeracy::embed::EncodeTape> tape;
  const Matrix d_out = random_matrix(cnn.dim(), state.range(0), 5);
  for (auto _ : state) {
    cnn.encode_for_training(tokens, tape);
    cnn.backward(*tape, d_out);
  }
}
BENCHMARK(BM_CharCnnTrainStep)->Arg(160);

void BM_CharLstmTrainStep(benchmark::State& state) {
  numeracy::embed::CharLstmEncoder enc;
  const auto tokens = tokens_upto(state.range(0));
  std::unique_ptr<numeracy::embed::EncodeTape> tape;
  const Matrix d_out = random_matrix(enc.dim(), state.range(0), 5);
  for (auto _ : state) {
    enc.encode_for_training(tokens, tape);
    enc.backward(*tape, d_out);
  }
}
BENCHMARK(BM_CharLstmTrainStep)->Arg(160);

}  // namespace
