#include "iwmc/iwmc.hpp"

#include "iwmc/random.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

namespace iwmc {

void IwmcConfig::validate() const {
    mstage.validate();
    ncfs.validate();
    if (!(delta > 0.0)) throw DataError("iwmc: delta must be positive");
    if (max_outer_iters < 1) throw DataError("iwmc: max_outer_iters must be at least 1");
}

IwmcResult fit(const LabeledDataset& data, const IwmcConfig& cfg) {
    cfg.validate();
    data.require_supervised();

    const IncompleteMatrix& X = data.X;
    FeatureWeights w = FeatureWeights::ones(X.cols());
    IwmcResult out{w, Matrix(), {}, 0, false};

    // zeta(0) = -inf: the first pass never satisfies a finite delta
    double prev_zeta = -std::numeric_limits<double>::infinity();
    for (int v = 1; v <= cfg.max_outer_iters; ++v) {
        mstage::MStageConfig stage_cfg = cfg.mstage;
        stage_cfg.seed = derive_seed(cfg.mstage.seed, {seed_tag::mstage, static_cast<std::uint64_t>(v)});
        const mstage::CompletionResult completion = mstage::complete(X, w, stage_cfg);

        ncfs::NcfsResult learned = ncfs::learn_weights(completion.completed, data.y, cfg.ncfs);
        w = std::move(learned.weights);
        if (cfg.normalize_weights) {
            const double top = w.values().maxCoeff();
            if (top > 0.0) w = FeatureWeights(w.values() / top);
        }

        const double zeta = w.squared_norm();
        out.zeta_trace.push_back(zeta);
        out.outer_iterations = v;
        if (std::isinf(cfg.delta) || std::abs(zeta - prev_zeta) < cfg.delta) {
            out.converged = true;
            break;
        }
        prev_zeta = zeta;
    }
    if (!out.converged)
        spdlog::warn("iwmc: weight norm did not settle within {} outer iterations", cfg.max_outer_iters);

    out.weights = w;
    out.completed = impute_test(X, w, cfg.mstage);
    return out;
}

Matrix impute_test(const IncompleteMatrix& X_test, const FeatureWeights& w, const mstage::MStageConfig& cfg) {
    if (w.size() != X_test.cols())
        throw DataError("impute_test: weight length " + std::to_string(w.size()) + " does not match column count " +
                        std::to_string(X_test.cols()));
    return mstage::complete(X_test, w, cfg).completed;
}

}  // namespace iwmc
