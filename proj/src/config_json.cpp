#include "iwmc/config_json.hpp"

#include <algorithm>

namespace iwmc {

namespace {

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& section) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DataError("config: " + section + "." + key + " has the wrong type");
    }
}

}  // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& section) {
    if (!j.is_object()) throw DataError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw DataError("config: unknown key '" + section + "." + key + "'");
    }
}

Json to_json(const mstage::MStageConfig& cfg) {
    return Json{{"rank", cfg.rank},
                {"beta", cfg.beta},
                {"eta", cfg.eta},
                {"max_inner_iters", cfg.max_inner_iters},
                {"paper_exact_h_update", cfg.paper_exact_h_update}};
}

Json to_json(const ncfs::NcfsConfig& cfg) {
    return Json{{"lambda", cfg.lambda},
                {"sigma", cfg.sigma},
                {"step_size", cfg.step_size},
                {"max_iters", cfg.max_iters},
                {"tol", cfg.tol}};
}

Json to_json(const IwmcConfig& cfg) {
    return Json{{"delta", cfg.delta},
                {"max_outer_iters", cfg.max_outer_iters},
                {"normalize_weights", cfg.normalize_weights}};
}

Json to_json(const baselines::BaselineConfig& cfg) {
    return Json{{"knn_k", cfg.knn_k},
                {"em_max_iters", cfg.em_max_iters},
                {"em_tol", cfg.em_tol},
                {"em_ridge", cfg.em_ridge},
                {"isvd_rank", cfg.isvd_rank},
                {"isvd_tol", cfg.isvd_tol},
                {"isvd_max_iters", cfg.isvd_max_iters},
                {"soft_shrinkage", cfg.soft_shrinkage},
                {"soft_tol", cfg.soft_tol},
                {"soft_max_iters", cfg.soft_max_iters}};
}

Json to_json(const synth::SynthConfig& cfg) {
    return Json{{"samples", cfg.n_samples},
                {"informative", cfg.n_informative},
                {"noise", cfg.n_noise},
                {"classes", cfg.n_classes},
                {"separation", cfg.class_separation},
                {"noise_variance", cfg.noise_variance}};
}

void update_from_json(mstage::MStageConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j, {"rank", "beta", "eta", "max_inner_iters", "paper_exact_h_update"}, section);
    read(j, "rank", cfg.rank, section);
    read(j, "beta", cfg.beta, section);
    read(j, "eta", cfg.eta, section);
    read(j, "max_inner_iters", cfg.max_inner_iters, section);
    read(j, "paper_exact_h_update", cfg.paper_exact_h_update, section);
}

void update_from_json(ncfs::NcfsConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j, {"lambda", "sigma", "step_size", "max_iters", "tol"}, section);
    read(j, "lambda", cfg.lambda, section);
    read(j, "sigma", cfg.sigma, section);
    read(j, "step_size", cfg.step_size, section);
    read(j, "max_iters", cfg.max_iters, section);
    read(j, "tol", cfg.tol, section);
}

void update_from_json(IwmcConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j, {"delta", "max_outer_iters", "normalize_weights"}, section);
    read(j, "delta", cfg.delta, section);
    read(j, "max_outer_iters", cfg.max_outer_iters, section);
    read(j, "normalize_weights", cfg.normalize_weights, section);
}

void update_from_json(baselines::BaselineConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j,
                        {"knn_k", "em_max_iters", "em_tol", "em_ridge", "isvd_rank", "isvd_tol", "isvd_max_iters",
                         "soft_shrinkage", "soft_tol", "soft_max_iters"},
                        section);
    read(j, "knn_k", cfg.knn_k, section);
    read(j, "em_max_iters", cfg.em_max_iters, section);
    read(j, "em_tol", cfg.em_tol, section);
    read(j, "em_ridge", cfg.em_ridge, section);
    read(j, "isvd_rank", cfg.isvd_rank, section);
    read(j, "isvd_tol", cfg.isvd_tol, section);
    read(j, "isvd_max_iters", cfg.isvd_max_iters, section);
    read(j, "soft_shrinkage", cfg.soft_shrinkage, section);
    read(j, "soft_tol", cfg.soft_tol, section);
    read(j, "soft_max_iters", cfg.soft_max_iters, section);
}

void update_from_json(synth::SynthConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j, {"samples", "informative", "noise", "classes", "separation", "noise_variance"}, section);
    read(j, "samples", cfg.n_samples, section);
    read(j, "informative", cfg.n_informative, section);
    read(j, "noise", cfg.n_noise, section);
    read(j, "classes", cfg.n_classes, section);
    read(j, "separation", cfg.class_separation, section);
    read(j, "noise_variance", cfg.noise_variance, section);
}

}  // namespace iwmc
