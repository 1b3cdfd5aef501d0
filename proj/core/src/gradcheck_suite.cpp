#include "numeracy/probe/gradcheck_suite.hpp"

#include <array>

#include "numeracy/char_encoder.hpp"
#include "numeracy/probe/probe_model.hpp"
#include "numeracy/random.hpp"

namespace numeracy::probe {
namespace {

struct Batch {
  std::vector<NumberToken> tokens;  // distinct inputs
  std::vector<int> index;           // slot-major
  std::vector<double> targets;
};

Batch random_batch(Task task, int batch, std::uint64_t seed) {
  Rng rng(seed);
  Batch out;
  const int slots = slots_for(task);
  const int distinct = 9;
  for (int i = 0; i < distinct; ++i) out.tokens.emplace_back(static_cast<std::int64_t>(rng.below(1000)), numeral::NumberFormat::Digits);
  out.index.resize(static_cast<std::size_t>(slots * batch));
  for (auto& i : out.index) i = static_cast<int>(rng.below(distinct));
  for (int b = 0; b < batch; ++b) {
    if (task == Task::ListMax)
      out.targets.push_back(static_cast<double>(rng.below(static_cast<std::uint64_t>(slots))));
    else
      out.targets.push_back(rng.normal());
  }
  return out;
}

nn::GradcheckResult check_head(const ProbeSpec& spec, Eigen::Index dim, std::uint64_t seed) {
  ProbeModel model(spec, dim, derive_seed({seed, 1}));
  Batch batch = random_batch(spec.task, 4, derive_seed({seed, 2}));
  Rng rng(derive_seed({seed, 3}));
  Matrix inputs(dim, static_cast<Eigen::Index>(batch.tokens.size()));
  for (Eigen::Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = rng.normal();
  std::array<nn::ParamStore*, 1> stores{&model.params()};
  return nn::gradcheck(
      stores, [&] { return model.loss(inputs, batch.index, batch.targets); },
      [&] { model.forward_backward(inputs, batch.index, batch.targets, nullptr); });
}

template <class Encoder>
nn::GradcheckResult check_encoder(Encoder& encoder, std::uint64_t seed) {
  ProbeSpec spec = ProbeSpec::defaults(Task::Decode);
  spec.head = Head::Linear;
  ProbeModel model(spec, encoder.dim(), derive_seed({seed, 1}));
  Batch batch = random_batch(Task::Decode, 6, derive_seed({seed, 2}));
  std::array<nn::ParamStore*, 2> stores{&model.params(), encoder.parameters()};
  auto loss = [&] {
    return model.loss(encoder.encode(batch.tokens), batch.index, batch.targets);
  };
  auto accumulate = [&] {
    std::unique_ptr<embed::EncodeTape> tape;
    Matrix inputs = encoder.encode_for_training(batch.tokens, tape);
    Matrix d_inputs;
    model.forward_backward(inputs, batch.index, batch.targets, &d_inputs);
    encoder.backward(*tape, d_inputs);
  };
  return nn::gradcheck(stores, loss, accumulate);
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::LinearRegressor: return "linear-regressor";
    case ModelFamily::Mlp3Decoder: return "mlp3-decoder";
    case ModelFamily::Mlp3Adder: return "mlp3-adder";
    case ModelFamily::LstmClassifier: return "lstm-classifier";
    case ModelFamily::BiLstmClassifier: return "bilstm-classifier";
    case ModelFamily::CharCnnDecoder: return "char-cnn";
    case ModelFamily::CharLstmDecoder: return "char-lstm";
  }
  return "unknown";
}

std::vector<ModelFamily> all_model_families() {
  return {ModelFamily::LinearRegressor, ModelFamily::Mlp3Decoder,      ModelFamily::Mlp3Adder,
          ModelFamily::LstmClassifier,  ModelFamily::BiLstmClassifier, ModelFamily::CharCnnDecoder,
          ModelFamily::CharLstmDecoder};
}

nn::GradcheckResult gradcheck_family(ModelFamily family, std::uint64_t seed) {
  switch (family) {
    case ModelFamily::LinearRegressor: {
      ProbeSpec spec = ProbeSpec::defaults(Task::Decode);
      spec.head = Head::Linear;
      return check_head(spec, 6, seed);
    }
    case ModelFamily::Mlp3Decoder: {
      ProbeSpec spec = ProbeSpec::defaults(Task::Decode);
      spec.mlp_hidden1 = 7;
      spec.mlp_hidden2 = 5;
      return check_head(spec, 6, seed);
    }
    case ModelFamily::Mlp3Adder: {
      ProbeSpec spec = ProbeSpec::defaults(Task::Add);
      spec.mlp_hidden1 = 7;
      spec.mlp_hidden2 = 5;
      return check_head(spec, 4, seed);
    }
    case ModelFamily::LstmClassifier:
    case ModelFamily::BiLstmClassifier: {
      ProbeSpec spec = ProbeSpec::defaults(Task::ListMax);
      spec.lstm_hidden = 6;
      spec.bidirectional = family == ModelFamily::BiLstmClassifier;
      return check_head(spec, 4, seed);
    }
    case ModelFamily::CharCnnDecoder: {
      embed::CharCnnConfig cfg;
      cfg.char_dim = 4;
      cfg.filters_per_width = 3;
      cfg.seed = seed;
      embed::CharCnnEncoder encoder(cfg);
      Rng jitter(derive_seed({seed, 4}));
      for (auto& p : encoder.all_parameters().params())
        if (p.name.find(".bias") != std::string::npos)
          for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = jitter.uniform(-0.5, 0.5);
      return check_encoder(encoder, seed);
    }
    case ModelFamily::CharLstmDecoder: {
      embed::CharLstmConfig cfg;
      cfg.char_dim = 4;
      cfg.hidden = 5;
      cfg.seed = seed;
      embed::CharLstmEncoder encoder(cfg);
      return check_encoder(encoder, seed);
    }
  }
  return {};
}

}  // namespace numeracy::probe
