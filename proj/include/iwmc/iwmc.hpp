#pragma once

// Iterative weighted matrix completion: alternate weighted completion
// (M-stage) with NCFS weight learning (W-stage) until |w|^2 stabilizes.

#include "iwmc/data.hpp"
#include "iwmc/mstage.hpp"
#include "iwmc/ncfs.hpp"

#include <vector>

namespace iwmc {

struct IwmcConfig {
    mstage::MStageConfig mstage;
    ncfs::NcfsConfig ncfs;
    /// Outer loop stops once |zeta(v) - zeta(v-1)| < delta; +inf stops after one pass.
    double delta = 1e-3;
    int max_outer_iters = 20;
    /// Divide learned weights by their maximum before the next M-stage.
    bool normalize_weights = false;

    void validate() const;
};

struct IwmcResult {
    FeatureWeights weights;
    /// Completion under the returned weights; equals impute_test(X, weights, cfg.mstage).
    Matrix completed;
    /// zeta(v) = |w(v)|^2 for v = 1..outer_iterations.
    std::vector<double> zeta_trace;
    int outer_iterations = 0;
    bool converged = false;
};

/// Starts from w = 1. Iteration v runs the M-stage with a G initialization
/// seeded by derive_seed(cfg.mstage.seed, {seed_tag::mstage, v}), then learns
/// w on the completion. After the loop, the returned matrix is recomputed
/// with the final weights and the undecorated cfg.mstage.seed.
IwmcResult fit(const LabeledDataset& data, const IwmcConfig& cfg);

/// Completes unseen data with frozen weights.
Matrix impute_test(const IncompleteMatrix& X_test, const FeatureWeights& w, const mstage::MStageConfig& cfg);

}  // namespace iwmc
