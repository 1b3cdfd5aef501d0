#pragma once

#include <iosfwd>
#include <span>

#include "numeracy/nn/params.hpp"

namespace numeracy::nn {

// Text checkpoint of named tensors:
//   numeracy-checkpoint 1
//   <tensor count>
//   <name> <rows> <cols>
//   <rows*cols values, column-major, one line>
// Values are written with 17 significant digits and reload bit-exactly.

void save_checkpoint(std::ostream& out, std::span<const ParamStore* const> stores);

/// Fills every parameter of `stores` from the checkpoint, matching by
/// name. Throws Error on a missing tensor, shape mismatch or bad syntax.
void load_checkpoint(std::istream& in, std::span<ParamStore* const> stores);

}  // namespace numeracy::nn
