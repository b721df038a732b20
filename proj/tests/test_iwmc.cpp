#include "oracles.hpp"

#include "iwmc/iwmc.hpp"
#include "iwmc/synth.hpp"

#include <doctest.h>

#include <limits>

using namespace iwmc;

namespace {

LabeledDataset small_problem(std::uint64_t seed, double rate) {
    synth::SynthConfig cfg;
    cfg.n_samples = 60;
    cfg.n_informative = 3;
    cfg.n_noise = 5;
    cfg.seed = seed;
    LabeledDataset d = synth::make_classification(cfg).data;
    if (rate > 0.0) d.X = synth::ampute_mcar(d.X.values(), rate, seed + 100).X;
    return d;
}

IwmcConfig quick_config() {
    IwmcConfig cfg;
    cfg.mstage.rank = 3;
    cfg.mstage.beta = 1.0;
    cfg.max_outer_iters = 5;
    cfg.ncfs.max_iters = 30;
    return cfg;
}

}  // namespace

TEST_CASE("defaults") {
    const IwmcConfig cfg;
    CHECK(cfg.mstage.beta == 20.0);
    CHECK(cfg.mstage.rank == 5);
    CHECK(cfg.delta == 1e-3);
    CHECK(cfg.max_outer_iters == 20);
    CHECK_FALSE(cfg.normalize_weights);
}

TEST_CASE("fully observed data: completion is the input, weights come from one W-stage") {
    const LabeledDataset d = small_problem(1, 0.0);
    const IwmcConfig cfg = quick_config();
    const IwmcResult res = fit(d, cfg);
    CHECK(res.completed == d.X.values());
    const auto direct = ncfs::learn_weights(d.X.values(), d.y, cfg.ncfs);
    CHECK(res.weights.values() == direct.weights.values());
    CHECK(res.outer_iterations <= 2);
    CHECK(res.converged);
}

TEST_CASE("observed cells preserved, trace shape and determinism") {
    const LabeledDataset d = small_problem(2, 0.15);
    const IwmcConfig cfg = quick_config();
    const IwmcResult a = fit(d, cfg);
    CHECK(static_cast<int>(a.zeta_trace.size()) == a.outer_iterations);
    for (double z : a.zeta_trace) {
        CHECK(std::isfinite(z));
        CHECK(z >= 0.0);
    }
    for (Index p = 0; p < d.X.rows(); ++p)
        for (Index q = 0; q < d.X.cols(); ++q)
            if (d.X.observed(p, q)) CHECK(a.completed(p, q) == d.X.values()(p, q));
    const IwmcResult b = fit(d, cfg);
    CHECK(a.completed == b.completed);
    CHECK(a.weights.values() == b.weights.values());
    CHECK(a.zeta_trace == b.zeta_trace);
}

TEST_CASE("infinite delta runs a single outer pass") {
    const LabeledDataset d = small_problem(3, 0.1);
    IwmcConfig cfg = quick_config();
    cfg.delta = std::numeric_limits<double>::infinity();
    const IwmcResult res = fit(d, cfg);
    CHECK(res.outer_iterations == 1);
    CHECK(res.zeta_trace.size() == 1);
}

TEST_CASE("impute_test reproduces the fitted completion") {
    const LabeledDataset d = small_problem(4, 0.1);
    const IwmcConfig cfg = quick_config();
    const IwmcResult res = fit(d, cfg);
    const Matrix again = impute_test(d.X, res.weights, cfg.mstage);
    CHECK((again - res.completed).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("impute_test: complete input, unit weights, dimension check") {
    std::mt19937_64 rng(5);
    const Matrix v = oracle::random_matrix(10, 4, rng);
    mstage::MStageConfig cfg;
    cfg.rank = 2;
    CHECK(impute_test(IncompleteMatrix::fully_observed(v), FeatureWeights::ones(4), cfg) == v);
    const IncompleteMatrix X(v, oracle::random_mask(10, 4, 0.2, rng));
    CHECK(impute_test(X, FeatureWeights::ones(4), cfg) == mstage::complete(X, FeatureWeights::ones(4), cfg).completed);
    CHECK_THROWS_AS(impute_test(X, FeatureWeights::ones(3), cfg), DataError);
}

TEST_CASE("fit requires two classes and a valid config") {
    LabeledDataset d = small_problem(6, 0.0);
    IwmcConfig cfg = quick_config();
    cfg.delta = 0.0;
    CHECK_THROWS_AS(fit(d, cfg), DataError);
    d.y.assign(d.y.size(), 0);
    CHECK_THROWS_AS(fit(d, quick_config()), DataError);
}

TEST_CASE("normalize_weights keeps the largest weight at one") {
    const LabeledDataset d = small_problem(7, 0.1);
    IwmcConfig cfg = quick_config();
    cfg.normalize_weights = true;
    const IwmcResult res = fit(d, cfg);
    CHECK(res.weights.values().maxCoeff() == doctest::Approx(1.0));
}
