#include "oracles.hpp"

#include "iwmc/mstage.hpp"
#include "iwmc/synth.hpp"

#include <doctest.h>

using namespace iwmc;
using namespace iwmc::mstage;

namespace {

Matrix random_orthonormal_rows(Index r, Index m, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(m, r, rng));
    return Matrix(qr.householderQ() * Matrix::Identity(m, r)).transpose();
}

}  // namespace

TEST_CASE("init_g is orthonormal and deterministic") {
    const Matrix G = init_g(5, 2, 42);
    CHECK(std::abs(G.col(0).norm() - 1.0) < 1e-10);
    CHECK(std::abs(G.col(1).norm() - 1.0) < 1e-10);
    CHECK(std::abs(G.col(0).dot(G.col(1))) < 1e-10);
    CHECK(init_g(5, 2, 42) == G);
    CHECK(init_g(5, 2, 43) != G);
    const Matrix Q = init_g(3, 3, 7);
    CHECK(std::abs(std::abs(Q.determinant()) - 1.0) < 1e-9);
    CHECK_THROWS_AS(init_g(2, 3, 0), DataError);
}

TEST_CASE("update_h: zero weight gives a zero column") {
    std::mt19937_64 rng(1);
    const Matrix G = oracle::random_matrix(6, 2, rng);
    const Matrix X = oracle::random_matrix(6, 3, rng);
    Vector w(3);
    w << 1.0, 0.0, 2.0;
    const Matrix H = update_h(G, X, FeatureWeights(w), 0.5);
    CHECK(H.col(1).norm() == 0.0);
}

TEST_CASE("update_h: exact and shortcut modes agree for orthonormal G") {
    const Matrix G = init_g(7, 3, 9);
    std::mt19937_64 rng(2);
    const Matrix X = oracle::random_matrix(7, 4, rng);
    const auto w = FeatureWeights::ones(4);
    const Matrix a = update_h(G, X, w, 1.0, HUpdate::exact);
    const Matrix b = update_h(G, X, w, 1.0, HUpdate::orthonormal_shortcut);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("update_h matches a numerical minimizer of each column subproblem") {
    std::mt19937_64 rng(3);
    const Matrix G = oracle::random_matrix(4, 2, rng);
    const Matrix X = oracle::random_matrix(4, 3, rng);
    Vector w(3);
    w << 1.0, 2.0, 0.5;
    const Matrix H = update_h(G, X, FeatureWeights(w), 1.0);
    for (Index q = 0; q < 3; ++q) {
        const Vector h = oracle::h_minimizer(G, X.col(q), w(q), 1.0);
        CHECK((H.col(q) - h).cwiseAbs().maxCoeff() < 1e-6);
        // first-order optimality
        const Vector grad = 2.0 * w(q) * w(q) * G.transpose() * (G * H.col(q) - X.col(q)) + 2.0 * H.col(q);
        CHECK(grad.norm() < 1e-8);
    }
}

TEST_CASE("update_g: ridge domination and the projection limit") {
    std::mt19937_64 rng(4);
    const Matrix H = oracle::random_matrix(2, 5, rng);
    const Matrix X = oracle::random_matrix(6, 5, rng);
    const Matrix G = update_g(H, X, FeatureWeights::ones(5), 1e9);
    CHECK(G.rowwise().norm().maxCoeff() < 1e-6);

    const Matrix Ho = random_orthonormal_rows(2, 5, rng);
    const Matrix Gp = update_g(Ho, X, FeatureWeights::ones(5), 1e-12);
    CHECK((Gp - X * Ho.transpose()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("update_g matches a numerical minimizer of each row subproblem") {
    std::mt19937_64 rng(5);
    const Matrix H = oracle::random_matrix(2, 4, rng);
    const Matrix X = oracle::random_matrix(5, 4, rng);
    Vector w(4);
    w << 0.3, 1.0, 2.0, 0.0;
    const Matrix G = update_g(H, X, FeatureWeights(w), 0.7);
    for (Index p = 0; p < 5; ++p) {
        const Vector g = oracle::g_minimizer(H, X.row(p).transpose(), w, 0.7);
        CHECK((G.row(p).transpose() - g).cwiseAbs().maxCoeff() < 1e-6);
        const Vector grad = 2.0 * H * w.cwiseAbs2().asDiagonal() * (H.transpose() * G.row(p).transpose() -
                                                                     X.row(p).transpose()) +
                            2.0 * 0.7 * G.row(p).transpose();
        CHECK(grad.norm() < 1e-8);
    }
}

TEST_CASE("dimension and beta errors") {
    const Matrix G = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(update_h(G, Matrix::Ones(4, 2), FeatureWeights::ones(2), 1.0), DataError);
    CHECK_THROWS_AS(update_h(G, Matrix::Ones(3, 2), FeatureWeights::ones(3), 1.0), DataError);
    CHECK_THROWS_AS(update_h(G, Matrix::Ones(3, 2), FeatureWeights::ones(2), 0.0), DataError);
    CHECK_THROWS_AS(update_g(Matrix::Ones(2, 3), Matrix::Ones(3, 2), FeatureWeights::ones(2), 1.0), DataError);
    CHECK_THROWS_AS(update_g(Matrix::Ones(2, 2), Matrix::Ones(3, 2), FeatureWeights::ones(2), -1.0), DataError);
}

TEST_CASE("weighted_objective matches a direct double loop") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix v = oracle::random_matrix(6, 5, rng);
        const Mask m = oracle::random_mask(6, 5, 0.3, rng);
        const Matrix G = oracle::random_matrix(6, 2, rng);
        const Matrix H = oracle::random_matrix(2, 5, rng);
        const Vector w = oracle::random_matrix(5, 1, rng).cwiseAbs();
        const double got = weighted_objective(G, H, IncompleteMatrix(v, m), FeatureWeights(w), 0.4);
        const double want = oracle::psi(G, H, v, m, w, 0.4);
        CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, want));
    }
}

TEST_CASE("weighted_objective special cases") {
    std::mt19937_64 rng(7);
    const Matrix v = oracle::random_matrix(4, 3, rng);
    const Mask m = oracle::random_mask(4, 3, 0.3, rng);
    Vector w(3);
    w << 1.0, 2.0, 0.5;
    double expected = 0.0;
    for (Index p = 0; p < 4; ++p)
        for (Index q = 0; q < 3; ++q)
            if (m(p, q)) expected += w(q) * w(q) * v(p, q) * v(p, q);
    CHECK(weighted_objective(Matrix::Zero(4, 2), Matrix::Zero(2, 3), IncompleteMatrix(v, m), FeatureWeights(w), 5.0) ==
          doctest::Approx(expected).epsilon(1e-14));

    const Matrix G = oracle::random_matrix(4, 2, rng);
    const Matrix H = oracle::random_matrix(2, 3, rng);
    CHECK(weighted_objective(G, H, IncompleteMatrix::fully_observed(G * H), FeatureWeights(w), 0.0) <
          1e-24);
}

TEST_CASE("effective_rank clamps") {
    CHECK(effective_rank(5, 3, 10) == 3);
    CHECK(effective_rank(5, 10, 4) == 4);
    CHECK(effective_rank(2, 10, 4) == 2);
}

TEST_CASE("complete: fully observed input is returned bit-exactly") {
    std::mt19937_64 rng(8);
    const Matrix v = oracle::random_matrix(9, 4, rng);
    MStageConfig cfg;
    cfg.rank = 2;
    const auto res = complete(IncompleteMatrix::fully_observed(v), FeatureWeights::ones(4), cfg);
    CHECK(res.completed == v);
}

TEST_CASE("complete: rank-1 recovery, determinism and observed preservation") {
    std::mt19937_64 rng(9);
    Vector u = oracle::random_matrix(8, 1, rng);
    Vector vv = oracle::random_matrix(6, 1, rng);
    u = 3.0 * u.normalized();
    vv = 3.0 * vv.normalized();
    const Matrix truth = u * vv.transpose();
    const auto amputed = synth::ampute_mcar(truth, 0.1, 17);
    MStageConfig cfg;
    cfg.rank = 1;
    cfg.beta = 1e-3;
    cfg.eta = 1e-12;
    cfg.max_inner_iters = 2000;
    cfg.seed = 1;
    const auto res = complete(amputed.X, FeatureWeights::ones(6), cfg);
    double num = 0.0, den = 0.0;
    for (Index p = 0; p < 8; ++p) {
        for (Index q = 0; q < 6; ++q) {
            if (amputed.X.observed(p, q)) {
                CHECK(res.completed(p, q) == truth(p, q));
            } else {
                num += std::pow(res.completed(p, q) - truth(p, q), 2);
                den += truth(p, q) * truth(p, q);
            }
        }
    }
    CHECK(std::sqrt(num / den) < 1e-2);
    CHECK(complete(amputed.X, FeatureWeights::ones(6), cfg).completed == res.completed);
}

TEST_CASE("complete: exact-mode objective trace is non-increasing") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix v = oracle::random_matrix(12, 6, rng);
        const Mask m = oracle::random_mask(12, 6, 0.2, rng);
        const Vector w = oracle::random_matrix(6, 1, rng).cwiseAbs().array() + 0.1;
        MStageConfig cfg;
        cfg.rank = 3;
        cfg.beta = 0.5;
        cfg.max_inner_iters = 50;
        cfg.eta = 1e-14;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto res = complete(IncompleteMatrix(v, m), FeatureWeights(w), cfg);
        for (std::size_t k = 1; k < res.objective_trace.size(); ++k)
            CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-9);
    }
}

TEST_CASE("complete: unit weights reduce to unweighted ridge factorization") {
    // The unweighted ALS written out directly, with the same start.
    std::mt19937_64 rng(11);
    const Matrix v = oracle::random_matrix(10, 5, rng);
    const Mask m = oracle::random_mask(10, 5, 0.2, rng);
    const IncompleteMatrix X(v, m);
    MStageConfig cfg;
    cfg.rank = 2;
    cfg.beta = 1.0;
    cfg.max_inner_iters = 5;
    cfg.eta = 1e-300;
    cfg.seed = 3;
    const auto res = complete(X, FeatureWeights::ones(5), cfg);

    Matrix Xhat = v;
    const Vector means = X.observed_column_means();
    for (Index p = 0; p < 10; ++p)
        for (Index q = 0; q < 5; ++q)
            if (!m(p, q)) Xhat(p, q) = means(q);
    Matrix G = init_g(10, 2, 3);
    Matrix H;
    const Matrix I = Matrix::Identity(2, 2);
    for (int k = 0; k < 5; ++k) {
        H = (G.transpose() * G + I).ldlt().solve(G.transpose() * Xhat);
        G = (H * H.transpose() + I).ldlt().solve(H * Xhat.transpose()).transpose();
        const Matrix GH = G * H;
        for (Index p = 0; p < 10; ++p)
            for (Index q = 0; q < 5; ++q)
                if (!m(p, q)) Xhat(p, q) = GH(p, q);
    }
    CHECK((res.completed - Xhat).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("complete: clamps rank and validates config") {
    std::mt19937_64 rng(12);
    const Matrix v = oracle::random_matrix(3, 2, rng);
    Mask m = Mask::Constant(3, 2, true);
    m(0, 0) = false;
    MStageConfig cfg;
    cfg.rank = 5;
    const auto res = complete(IncompleteMatrix(v, m), FeatureWeights::ones(2), cfg);
    CHECK(res.factors.rank() == 2);
    cfg.beta = 0.0;
    CHECK_THROWS_AS(complete(IncompleteMatrix(v, m), FeatureWeights::ones(2), cfg), DataError);
    cfg.beta = 1.0;
    CHECK_THROWS_AS(complete(IncompleteMatrix(v, m), FeatureWeights::ones(3), cfg), DataError);
}
