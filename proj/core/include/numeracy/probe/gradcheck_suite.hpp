#pragma once

#include <string>
#include <vector>

#include "numeracy/nn/gradcheck.hpp"

namespace numeracy::probe {

enum class ModelFamily {
  LinearRegressor,
  Mlp3Decoder,
  Mlp3Adder,
  LstmClassifier,
  BiLstmClassifier,
  CharCnnDecoder,
  CharLstmDecoder,
};

std::string_view to_string(ModelFamily family);
std::vector<ModelFamily> all_model_families();

/// Builds a small randomly initialised model of the given family with a
/// random batch, and gradchecks every trainable parameter, including
/// character-encoder parameters for the Char-* families.
nn::GradcheckResult gradcheck_family(ModelFamily family, std::uint64_t seed);

}  // namespace numeracy::probe
