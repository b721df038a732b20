#pragma once

// Weighted low-rank matrix completion.
//
// Minimizes
//     psi(G, H) = sum_{(p,q) observed} w_q^2 (G_p H^q - x_pq)^2 + beta (|G|_F^2 + |H|_F^2)
// by alternating closed-form ridge updates of H (column by column) and G
// (row by row) against the composed matrix Xhat = P_obs(X) + P_miss(GH).

#include "iwmc/data.hpp"

#include <cstdint>
#include <vector>

namespace iwmc::mstage {

enum class HUpdate {
    /// Solves (w_q^2 G'G + beta I) h = w_q^2 G' xhat_q for every column.
    exact,
    /// h = w_q^2 / (w_q^2 + beta) G' xhat_q, which is exact only while G has
    /// orthonormal columns.
    orthonormal_shortcut,
};

struct MStageConfig {
    Index rank = 5;
    double beta = 20.0;
    double eta = 1e-4;
    int max_inner_iters = 200;
    std::uint64_t seed = 0;
    bool paper_exact_h_update = false;

    HUpdate h_update() const { return paper_exact_h_update ? HUpdate::orthonormal_shortcut : HUpdate::exact; }
    void validate() const;
};

struct FactorPair {
    Matrix G;  // n x r
    Matrix H;  // r x m
    Index rank() const { return G.cols(); }
};

struct CompletionResult {
    /// Observed cells copied from the input, missing cells from G H.
    Matrix completed;
    FactorPair factors;
    int iterations = 0;
    bool converged = false;
    /// psi after each (H, G) pair.
    std::vector<double> objective_trace;
};

/// n x r matrix with orthonormal columns: thin Q of a seeded Gaussian matrix.
Matrix init_g(Index n, Index r, std::uint64_t seed);

Matrix update_h(const Matrix& G, const Matrix& Xhat, const FeatureWeights& w, double beta,
                HUpdate mode = HUpdate::exact);

/// Row-wise ridge solution G_p = xhat_p W^2 H' (H W^2 H' + beta I)^-1.
Matrix update_g(const Matrix& H, const Matrix& Xhat, const FeatureWeights& w, double beta);

/// psi(G, H) over the observed cells of X.
double weighted_objective(const Matrix& G, const Matrix& H, const IncompleteMatrix& X,
                          const FeatureWeights& w, double beta);

/// |(GH - Xhat) Diag(w)|_F^2 + beta (|G|_F^2 + |H|_F^2) for a dense Xhat.
double weighted_objective_dense(const Matrix& G, const Matrix& H, const Matrix& Xhat,
                                const FeatureWeights& w, double beta);

/// Rank actually used for an n x m problem; r > min(n, m) is clamped with a warning.
Index effective_rank(Index requested, Index n, Index m);

/// Alternates update_h / update_g until both |G|_F^2 and |H|_F^2 move by less
/// than eta between consecutive iterations, or max_inner_iters is reached.
/// Missing cells of the working Xhat start at the observed column means and
/// are refreshed from G H after every (H, G) pair.
CompletionResult complete(const IncompleteMatrix& X, const FeatureWeights& w, const MStageConfig& cfg);

}  // namespace iwmc::mstage
