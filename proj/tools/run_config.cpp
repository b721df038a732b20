#include "run_config.hpp"

#include <fstream>
#include <sstream>

namespace iwmc::cli {

void RunConfig::merge(const Json& j) {
    reject_unknown_keys(j, {"seed", "synth", "mstage", "ncfs", "iwmc", "baselines", "protocol", "sweep"}, "config");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw DataError("config: seed must be a nonnegative integer");
        seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("synth")) update_from_json(synth, j.at("synth"));
    if (j.contains("mstage")) update_from_json(iwmc.mstage, j.at("mstage"));
    if (j.contains("ncfs")) update_from_json(iwmc.ncfs, j.at("ncfs"));
    if (j.contains("iwmc")) update_from_json(iwmc, j.at("iwmc"));
    if (j.contains("baselines")) update_from_json(baselines, j.at("baselines"));
    if (j.contains("protocol")) eval::update_from_json(protocol, j.at("protocol"));
    if (j.contains("sweep")) eval::update_from_json(sweep, j.at("sweep"));
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    RunConfig cfg;
    cfg.merge(j);
    return cfg;
}

Json RunConfig::to_json(std::initializer_list<std::string_view> sections) const {
    Json out{{"seed", seed}};
    for (std::string_view s : sections) {
        if (s == "synth") out["synth"] = iwmc::to_json(synth);
        else if (s == "mstage") out["mstage"] = iwmc::to_json(iwmc.mstage);
        else if (s == "ncfs") out["ncfs"] = iwmc::to_json(iwmc.ncfs);
        else if (s == "iwmc") out["iwmc"] = iwmc::to_json(iwmc);
        else if (s == "baselines") out["baselines"] = iwmc::to_json(baselines);
        else if (s == "protocol") out["protocol"] = eval::to_json(protocol);
        else if (s == "sweep") out["sweep"] = eval::to_json(sweep);
    }
    return out;
}

}  // namespace iwmc::cli
