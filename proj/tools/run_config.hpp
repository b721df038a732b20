#pragma once

// One configuration document for every command. Sections mirror the library
// config structs; a command reads the sections it needs and echoes the
// effective values into its outputs.

#include "iwmc/benchmark.hpp"
#include "iwmc/config_json.hpp"

#include <filesystem>

namespace iwmc::cli {

struct RunConfig {
    std::uint64_t seed = 0;
    synth::SynthConfig synth;
    IwmcConfig iwmc;
    baselines::BaselineConfig baselines;
    eval::ProtocolConfig protocol;
    eval::SweepConfig sweep;

    /// Applies the keys present in `j`. Unknown sections or keys throw DataError.
    void merge(const Json& j);
    static RunConfig load(const std::filesystem::path& path);

    /// Seed plus the listed sections, in a fixed order.
    Json to_json(std::initializer_list<std::string_view> sections) const;
};

}  // namespace iwmc::cli
