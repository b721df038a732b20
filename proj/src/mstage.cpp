#include "iwmc/mstage.hpp"

#include "iwmc/random.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

namespace iwmc::mstage {

namespace {

void check_weights(const FeatureWeights& w, Index m, const char* who) {
    if (w.size() != m)
        throw DataError(std::string(who) + ": weight vector length " + std::to_string(w.size()) +
                        " does not match column count " + std::to_string(m));
}

void check_beta(double beta, const char* who) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DataError(std::string(who) + ": beta must be positive");
}

}  // namespace

void MStageConfig::validate() const {
    if (rank < 1) throw DataError("mstage: rank must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DataError("mstage: beta must be positive");
    if (!(eta > 0.0)) throw DataError("mstage: eta must be positive");
    if (max_inner_iters < 1) throw DataError("mstage: max_inner_iters must be at least 1");
}

Matrix init_g(Index n, Index r, std::uint64_t seed) {
    if (r < 1) throw DataError("init_g: rank must be at least 1");
    if (r > n) throw DataError("init_g: rank " + std::to_string(r) + " exceeds row count " + std::to_string(n));
    Rng rng(seed);
    const Matrix A = gaussian_matrix(n, r, rng);
    Eigen::HouseholderQR<Matrix> qr(A);
    return qr.householderQ() * Matrix::Identity(n, r);
}

Matrix update_h(const Matrix& G, const Matrix& Xhat, const FeatureWeights& w, double beta, HUpdate mode) {
    if (G.rows() != Xhat.rows()) throw DataError("update_h: G and Xhat row counts differ");
    check_weights(w, Xhat.cols(), "update_h");
    check_beta(beta, "update_h");

    const Index r = G.cols();
    const Matrix GtX = G.transpose() * Xhat;  // r x m
    Matrix H(r, Xhat.cols());

    if (mode == HUpdate::orthonormal_shortcut) {
        for (Index q = 0; q < Xhat.cols(); ++q) {
            const double w2 = w[q] * w[q];
            H.col(q) = (w2 / (w2 + beta)) * GtX.col(q);
        }
        return H;
    }

    const Matrix GtG = G.transpose() * G;
    const Matrix I = Matrix::Identity(r, r);
    for (Index q = 0; q < Xhat.cols(); ++q) {
        const double w2 = w[q] * w[q];
        Eigen::LLT<Matrix> llt(w2 * GtG + beta * I);
        if (llt.info() != Eigen::Success) throw DivergenceError("update_h: normal equations not positive definite");
        H.col(q) = llt.solve(w2 * GtX.col(q));
    }
    return H;
}

Matrix update_g(const Matrix& H, const Matrix& Xhat, const FeatureWeights& w, double beta) {
    if (H.cols() != Xhat.cols()) throw DataError("update_g: H and Xhat column counts differ");
    check_weights(w, Xhat.cols(), "update_g");
    check_beta(beta, "update_g");

    const Index r = H.rows();
    const Vector w2 = w.values().array().square();
    const Matrix HW2 = H * w2.asDiagonal();  // r x m
    // every row subproblem shares the same r x r system
    Eigen::LLT<Matrix> llt(HW2 * H.transpose() + beta * Matrix::Identity(r, r));
    if (llt.info() != Eigen::Success) throw DivergenceError("update_g: normal equations not positive definite");
    const Matrix rhs = HW2 * Xhat.transpose();  // r x n, column p is row p's right-hand side
    return llt.solve(rhs).transpose();
}

double weighted_objective(const Matrix& G, const Matrix& H, const IncompleteMatrix& X, const FeatureWeights& w,
                          double beta) {
    if (G.rows() != X.rows() || H.cols() != X.cols() || G.cols() != H.rows())
        throw DataError("weighted_objective: dimension mismatch");
    check_weights(w, X.cols(), "weighted_objective");
    const Matrix GH = G * H;
    double fidelity = 0.0;
    for (Index q = 0; q < X.cols(); ++q) {
        const double w2 = w[q] * w[q];
        for (Index p = 0; p < X.rows(); ++p) {
            if (!X.observed(p, q)) continue;
            const double e = GH(p, q) - X.values()(p, q);
            fidelity += w2 * e * e;
        }
    }
    return fidelity + beta * (G.squaredNorm() + H.squaredNorm());
}

double weighted_objective_dense(const Matrix& G, const Matrix& H, const Matrix& Xhat, const FeatureWeights& w,
                                double beta) {
    if (G.rows() != Xhat.rows() || H.cols() != Xhat.cols() || G.cols() != H.rows())
        throw DataError("weighted_objective_dense: dimension mismatch");
    check_weights(w, Xhat.cols(), "weighted_objective_dense");
    const Matrix R = (G * H - Xhat) * w.values().asDiagonal();
    return R.squaredNorm() + beta * (G.squaredNorm() + H.squaredNorm());
}

Index effective_rank(Index requested, Index n, Index m) {
    const Index cap = std::min(n, m);
    if (requested > cap) {
        spdlog::warn("mstage: rank {} exceeds min(n, m) = {}; clamping", requested, cap);
        return cap;
    }
    return requested;
}

CompletionResult complete(const IncompleteMatrix& X, const FeatureWeights& w, const MStageConfig& cfg) {
    cfg.validate();
    check_weights(w, X.cols(), "complete");

    const Index r = effective_rank(cfg.rank, X.rows(), X.cols());
    CompletionResult out;
    Matrix G = init_g(X.rows(), r, cfg.seed);
    Matrix H;

    const Vector means = X.observed_column_means();
    Matrix xhat = compose_xhat(X, means.transpose().replicate(X.rows(), 1));

    double prev_g_norm = G.squaredNorm();
    double prev_h_norm = std::numeric_limits<double>::quiet_NaN();

    for (int k = 1; k <= cfg.max_inner_iters; ++k) {
        H = update_h(G, xhat, w, cfg.beta, cfg.h_update());
        G = update_g(H, xhat, w, cfg.beta);
        if (!G.allFinite() || !H.allFinite())
            throw DivergenceError("mstage: non-finite factors at iteration " + std::to_string(k));

        xhat = compose_xhat(X, G * H);
        out.objective_trace.push_back(weighted_objective(G, H, X, w, cfg.beta));
        out.iterations = k;

        const double g_norm = G.squaredNorm();
        const double h_norm = H.squaredNorm();
        const bool settled = std::abs(h_norm - prev_h_norm) < cfg.eta && std::abs(g_norm - prev_g_norm) < cfg.eta;
        prev_g_norm = g_norm;
        prev_h_norm = h_norm;
        if (settled) {
            out.converged = true;
            break;
        }
    }

    out.completed = std::move(xhat);
    out.factors = FactorPair{std::move(G), std::move(H)};
    return out;
}

}  // namespace iwmc::mstage
