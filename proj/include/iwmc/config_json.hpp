#pragma once

// JSON mapping for every configuration struct. Readers apply only the keys
// present and reject unknown keys; writers emit every field in a fixed order.

#include "iwmc/baselines.hpp"
#include "iwmc/iwmc.hpp"
#include "iwmc/synth.hpp"

#include <json.hpp>

namespace iwmc {

using Json = nlohmann::ordered_json;

Json to_json(const mstage::MStageConfig& cfg);
Json to_json(const ncfs::NcfsConfig& cfg);
Json to_json(const IwmcConfig& cfg);
Json to_json(const baselines::BaselineConfig& cfg);
Json to_json(const synth::SynthConfig& cfg);

/// Throws DataError naming `section` on unknown keys or mistyped values.
void update_from_json(mstage::MStageConfig& cfg, const Json& j, const std::string& section = "mstage");
void update_from_json(ncfs::NcfsConfig& cfg, const Json& j, const std::string& section = "ncfs");
/// Only the outer-loop keys (delta, max_outer_iters, normalize_weights).
void update_from_json(IwmcConfig& cfg, const Json& j, const std::string& section = "iwmc");
void update_from_json(baselines::BaselineConfig& cfg, const Json& j, const std::string& section = "baselines");
void update_from_json(synth::SynthConfig& cfg, const Json& j, const std::string& section = "synth");

/// Throws DataError if `j` is not an object or has a key outside `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& section);

}  // namespace iwmc
