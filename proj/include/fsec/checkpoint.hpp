#pragma once

#include <string>
#include <utility>

#include "json.hpp"

#include "fsec/encoder.hpp"

namespace fsec {

// Versioned binary checkpoint: magic "FSEC1", a JSON metadata block (encoder
// config, vocabulary, caller-supplied extras), then named f64 tensors with
// their dimensions.
void save_checkpoint(const EncoderParams& params, const nlohmann::json& extra,
                     const std::string& path);

std::pair<EncoderParams, nlohmann::json> load_checkpoint(const std::string& path);

}  // namespace fsec
