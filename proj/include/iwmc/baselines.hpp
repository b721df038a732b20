#pragma once

// Comparison imputers. Each maps an IncompleteMatrix to a complete matrix
// whose observed cells are bit-identical to the input.

#include "iwmc/data.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iwmc::baselines {

enum class Baseline { mean, knn, em, isvd, soft };

std::string_view to_string(Baseline b);
std::optional<Baseline> parse_baseline(std::string_view name);

struct BaselineConfig {
    int knn_k = 5;
    int em_max_iters = 100;
    double em_tol = 1e-4;
    double em_ridge = 1e-3;
    Index isvd_rank = 5;
    double isvd_tol = 1e-4;
    int isvd_max_iters = 100;
    /// Singular-value threshold as a fraction of the top singular value of
    /// the zero-filled input.
    double soft_shrinkage = 0.2;
    double soft_tol = 1e-4;
    int soft_max_iters = 100;

    void validate() const;
};

/// Missing cells take the observed column mean.
Matrix mean_impute(const IncompleteMatrix& X);

/// Partial-distance KNN. Rows are compared by the mean squared difference
/// over features both rows observe; rows sharing no observed feature are
/// never neighbors. A missing cell (p, q) takes the mean of column q over the
/// k nearest rows that observe q (distance ties go to the smaller row index),
/// or the column mean when no such row exists.
Matrix knn_impute(const IncompleteMatrix& X, int k);

/// Single multivariate Gaussian fitted by EM. Missing blocks take their
/// conditional mean given the observed block of the same row; the M-step
/// adds the conditional covariances and a ridge em_ridge * I.
Matrix em_impute(const IncompleteMatrix& X, const BaselineConfig& cfg);

struct IterativeImputation {
    Matrix completed;
    int iterations = 0;
    bool converged = false;
    /// Relative Frobenius change of the refilled cells per iteration.
    std::vector<double> change_trace;
};

/// SVDimpute: refill missing cells from a rank-u truncated SVD until the
/// relative change of the missing block drops below isvd_tol. Starts from
/// mean imputation unless `initial` is given.
IterativeImputation isvd_impute_detailed(const IncompleteMatrix& X, const BaselineConfig& cfg,
                                         const std::optional<Matrix>& initial = std::nullopt);
Matrix isvd_impute(const IncompleteMatrix& X, const BaselineConfig& cfg);

struct SoftImputation {
    Matrix completed;
    /// The low-rank estimate M before the final composition.
    Matrix low_rank;
    double threshold = 0.0;
    int iterations = 0;
    bool converged = false;
    /// 0.5 |P_obs(X - M)|_F^2 + threshold * |M|_* after each iteration.
    std::vector<double> objective_trace;
};

/// Soft-thresholded SVD iteration with a single fixed threshold, from M = 0.
SoftImputation soft_impute_detailed(const IncompleteMatrix& X, const BaselineConfig& cfg);
Matrix soft_impute(const IncompleteMatrix& X, const BaselineConfig& cfg);

Matrix impute(Baseline method, const IncompleteMatrix& X, const BaselineConfig& cfg);

}  // namespace iwmc::baselines
