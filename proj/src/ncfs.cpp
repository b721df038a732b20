#include "iwmc/ncfs.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace iwmc::ncfs {

namespace {

void check_problem(const Matrix& X, const Labels& y, Index weight_count) {
    if (X.rows() < 2) throw DataError("ncfs: at least two samples are required");
    if (static_cast<Index>(y.size()) != X.rows()) throw DataError("ncfs: label count does not match sample count");
    if (weight_count != X.cols()) throw DataError("ncfs: weight vector length does not match feature count");
}

/// Row i of P given the distances from sample i to every sample (entry i ignored).
void probabilities_from_distances(const Vector& d, Index i, double sigma, Eigen::Ref<Vector> p_row) {
    double d_min = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < d.size(); ++j)
        if (j != i) d_min = std::min(d_min, d(j));
    double total = 0.0;
    for (Index j = 0; j < d.size(); ++j) {
        p_row(j) = j == i ? 0.0 : std::exp(-(d(j) - d_min) / sigma);
        total += p_row(j);
    }
    p_row /= total;
}

}  // namespace

void NcfsConfig::validate() const {
    if (!(lambda > 0.0)) throw DataError("ncfs: lambda must be positive");
    if (!(sigma > 0.0)) throw DataError("ncfs: sigma must be positive");
    if (!(step_size > 0.0)) throw DataError("ncfs: step_size must be positive");
    if (!(tol > 0.0)) throw DataError("ncfs: tol must be positive");
    if (max_iters < 1) throw DataError("ncfs: max_iters must be at least 1");
}

double weighted_distance(std::span<const double> xi, std::span<const double> xj, const FeatureWeights& w) {
    if (xi.size() != xj.size() || static_cast<Index>(xi.size()) != w.size())
        throw DataError("weighted_distance: length mismatch");
    double d = 0.0;
    for (std::size_t l = 0; l < xi.size(); ++l) d += w[static_cast<Index>(l)] * w[static_cast<Index>(l)] * std::abs(xi[l] - xj[l]);
    return d;
}

Matrix reference_probabilities(const Matrix& X, const FeatureWeights& w, double sigma) {
    if (X.rows() < 2) throw DataError("reference_probabilities: at least two samples are required");
    if (w.size() != X.cols()) throw DataError("reference_probabilities: weight length mismatch");
    if (!(sigma > 0.0)) throw DataError("reference_probabilities: sigma must be positive");

    const Index n = X.rows();
    const Vector w2 = w.values().array().square();
    Matrix P(n, n);
    Vector p_row(n);
    for (Index i = 0; i < n; ++i) {
        const Vector d = (X.rowwise() - X.row(i)).cwiseAbs() * w2;
        probabilities_from_distances(d, i, sigma, p_row);
        P.row(i) = p_row.transpose();
    }
    return P;
}

Vector correct_probabilities(const Matrix& P, const Labels& y) {
    if (P.rows() != P.cols() || P.rows() != static_cast<Index>(y.size()))
        throw DataError("correct_probabilities: dimension mismatch");
    const Index n = P.rows();
    Vector p(n);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Index j = 0; j < n; ++j)
            if (j != i && y[i] == y[j]) s += P(i, j);
        p(i) = s;
    }
    return p;
}

double ncfs_objective(const Matrix& X, const Labels& y, const FeatureWeights& w, double lambda, double sigma) {
    return evaluate(X, y, w.values(), lambda, sigma).objective;
}

Vector ncfs_gradient(const Matrix& X, const Labels& y, const Vector& w, double lambda, double sigma) {
    return evaluate(X, y, w, lambda, sigma).gradient;
}

ObjectiveAndGradient evaluate(const Matrix& X, const Labels& y, const Vector& w, double lambda, double sigma) {
    check_problem(X, y, w.size());
    if (!(sigma > 0.0)) throw DataError("ncfs: sigma must be positive");

    const Index n = X.rows();
    const Vector w2 = w.array().square();
    Matrix abs_diff(n, X.cols());
    Vector p_row(n);
    Vector coeff(n);
    Vector data_term = Vector::Zero(X.cols());
    double sum_p = 0.0;

    for (Index i = 0; i < n; ++i) {
        abs_diff = (X.rowwise() - X.row(i)).cwiseAbs();
        const Vector d = abs_diff * w2;
        probabilities_from_distances(d, i, sigma, p_row);

        double p_i = 0.0;
        for (Index j = 0; j < n; ++j)
            if (j != i && y[j] == y[i]) p_i += p_row(j);
        sum_p += p_i;

        // dp_i/dw_l = (2 w_l / sigma) sum_j p_ij (p_i - y_ij) |x_il - x_jl|
        for (Index j = 0; j < n; ++j) coeff(j) = p_row(j) * (p_i - (j != i && y[j] == y[i] ? 1.0 : 0.0));
        data_term.noalias() += abs_diff.transpose() * coeff;
    }

    ObjectiveAndGradient out;
    out.objective = sum_p - lambda * w2.sum();
    out.gradient = 2.0 * w.array() * (data_term.array() / sigma - lambda);
    return out;
}

NcfsResult learn_weights(const Matrix& X, const Labels& y, const NcfsConfig& cfg) {
    cfg.validate();
    check_problem(X, y, X.cols());
    if (std::set<int>(y.begin(), y.end()).size() < 2)
        throw DataError("ncfs: degenerate label set, at least two classes are required");

    Vector w = Vector::Ones(X.cols());
    ObjectiveAndGradient current = evaluate(X, y, w, cfg.lambda, cfg.sigma);
    std::vector<double> trace{current.objective};
    double step = cfg.step_size;
    bool converged = false;
    int attempts = 0;

    while (attempts < cfg.max_iters) {
        ++attempts;
        const Vector trial_w = w + step * current.gradient;
        ObjectiveAndGradient trial = evaluate(X, y, trial_w, cfg.lambda, cfg.sigma);
        if (!std::isfinite(trial.objective) || trial.objective < current.objective) {
            step *= 0.5;
            continue;
        }
        const double change = trial.objective - current.objective;
        w = trial_w;
        current = std::move(trial);
        trace.push_back(current.objective);
        if (std::abs(change) < cfg.tol) {
            converged = true;
            break;
        }
    }

    return NcfsResult{FeatureWeights(w.cwiseAbs()), std::move(trace), attempts, converged};
}

}  // namespace iwmc::ncfs
