#pragma once

#include <string>

#include "heatnet/model.hpp"

namespace heatnet {

// Versioned self-describing binary: magic + header (variant, horizons, dims)
// followed by every parameter tensor in visit order as name, shape, and raw
// little-endian f64 values. Round-trips bit-exactly.
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);
// Additionally rejects a file whose stored variant differs from `expected`.
ModelParams load_params(const std::string& path, Variant expected);

}  // namespace heatnet
