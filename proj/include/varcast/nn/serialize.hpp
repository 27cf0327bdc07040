#pragma once

#include <string>

#include "varcast/nn/network.hpp"
#include "varcast/nn/train.hpp"

namespace varcast::nn {

/// Versioned flat-JSON parameter format: the config plus one object per
/// tensor carrying its shape and row-major values. Doubles round-trip
/// exactly (shortest-representation printing), so identical parameters
/// always serialize to identical bytes.
std::string params_to_json(const NetworkParams& params);
NetworkParams params_from_json(const std::string& text);

/// Training history as JSON (seed, best epoch, per-epoch losses).
std::string history_to_json(const TrainResult& result);

}  // namespace varcast::nn
