#pragma once

// Neighborhood component feature selection (NCFS).
//
// Feature weights are learned by gradient ascent on the expected
// leave-one-out accuracy of a soft nearest-neighbor classifier,
//     F(w) = sum_i p_i - lambda |w|^2,
// where p_i is the probability that sample i picks a same-class reference
// point under p_ij proportional to exp(-d_w(x_i, x_j) / sigma) and
// d_w(a, b) = sum_l w_l^2 |a_l - b_l|.

#include "iwmc/data.hpp"

#include <span>
#include <vector>

namespace iwmc::ncfs {

struct NcfsConfig {
    double lambda = 1.0;
    double sigma = 1.0;
    double step_size = 0.1;
    int max_iters = 100;
    double tol = 1e-6;

    void validate() const;
};

struct NcfsResult {
    FeatureWeights weights;
    /// F(w) at the start and after each accepted step; non-decreasing.
    std::vector<double> objective_trace;
    /// Step attempts, accepted or not.
    int iterations = 0;
    bool converged = false;
};

double weighted_distance(std::span<const double> xi, std::span<const double> xj, const FeatureWeights& w);

/// n x n matrix of reference probabilities; zero diagonal, rows sum to 1.
/// Each row's exponents are shifted by its smallest distance, so no row
/// underflows to all zeros.
Matrix reference_probabilities(const Matrix& X, const FeatureWeights& w, double sigma);

/// p_i = sum_j [y_i == y_j] p_ij.
Vector correct_probabilities(const Matrix& P, const Labels& y);

double ncfs_objective(const Matrix& X, const Labels& y, const FeatureWeights& w, double lambda, double sigma);

/// Analytic dF/dw. Accepts signed weights, which learn_weights passes while iterating.
Vector ncfs_gradient(const Matrix& X, const Labels& y, const Vector& w, double lambda, double sigma);

struct ObjectiveAndGradient {
    double objective = 0.0;
    Vector gradient;
};

/// One O(n^2 m) pass producing both F(w) and its gradient.
ObjectiveAndGradient evaluate(const Matrix& X, const Labels& y, const Vector& w, double lambda, double sigma);

/// Gradient ascent from w = 1 with step halving whenever a trial step would
/// lower F. Stops once an accepted step changes F by less than tol, or after
/// max_iters attempts. Returns |w| element-wise.
NcfsResult learn_weights(const Matrix& X, const Labels& y, const NcfsConfig& cfg);

}  // namespace iwmc::ncfs
