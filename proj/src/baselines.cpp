#include "iwmc/baselines.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace iwmc::baselines {

namespace {

constexpr std::pair<Baseline, std::string_view> kNames[] = {
    {Baseline::mean, "mean"}, {Baseline::knn, "knn"}, {Baseline::em, "em"},
    {Baseline::isvd, "isvd"}, {Baseline::soft, "soft"},
};

void require_finite(const Matrix& M, const char* who) {
    if (!M.allFinite()) throw DivergenceError(std::string(who) + ": non-finite values encountered");
}

/// Relative Frobenius change restricted to missing cells.
double missing_change(const Mask& observed, const Matrix& before, const Matrix& after) {
    double diff = 0.0;
    double base = 0.0;
    for (Index q = 0; q < before.cols(); ++q) {
        for (Index p = 0; p < before.rows(); ++p) {
            if (observed(p, q)) continue;
            const double d = after(p, q) - before(p, q);
            diff += d * d;
            base += before(p, q) * before(p, q);
        }
    }
    if (diff == 0.0) return 0.0;
    return base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
}

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& Z) {
    Eigen::BDCSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw DivergenceError("svd failed");
    return svd;
}

}  // namespace

std::string_view to_string(Baseline b) {
    for (const auto& [value, name] : kNames)
        if (value == b) return name;
    return "unknown";
}

std::optional<Baseline> parse_baseline(std::string_view name) {
    for (const auto& [value, label] : kNames)
        if (label == name) return value;
    return std::nullopt;
}

void BaselineConfig::validate() const {
    if (knn_k < 1) throw DataError("baselines: knn_k must be at least 1");
    if (isvd_rank < 1) throw DataError("baselines: isvd_rank must be at least 1");
    if (!(em_tol > 0.0) || !(isvd_tol > 0.0) || !(soft_tol > 0.0))
        throw DataError("baselines: tolerances must be positive");
    if (!(em_ridge > 0.0)) throw DataError("baselines: em_ridge must be positive");
    if (!(soft_shrinkage > 0.0 && soft_shrinkage <= 1.0))
        throw DataError("baselines: soft_shrinkage must lie in (0, 1]");
    if (em_max_iters < 1 || isvd_max_iters < 1 || soft_max_iters < 1)
        throw DataError("baselines: iteration limits must be at least 1");
}

Matrix mean_impute(const IncompleteMatrix& X) {
    const Vector means = X.observed_column_means();
    return compose_xhat(X, means.transpose().replicate(X.rows(), 1));
}

Matrix knn_impute(const IncompleteMatrix& X, int k) {
    if (k < 1) throw DataError("knn_impute: k must be at least 1");
    const Index n = X.rows();
    const Index m = X.cols();
    const Mask& obs = X.mask();
    const Matrix& v = X.values();
    const Vector means = X.observed_column_means();

    Matrix out = v;
    std::vector<std::pair<double, Index>> ranked;
    for (Index p = 0; p < n; ++p) {
        if (obs.row(p).all()) continue;

        ranked.clear();
        for (Index r = 0; r < n; ++r) {
            if (r == p) continue;
            double ss = 0.0;
            Index shared = 0;
            for (Index q = 0; q < m; ++q) {
                if (obs(p, q) && obs(r, q)) {
                    const double d = v(p, q) - v(r, q);
                    ss += d * d;
                    ++shared;
                }
            }
            if (shared > 0) ranked.emplace_back(ss / static_cast<double>(shared), r);
        }
        std::sort(ranked.begin(), ranked.end());

        for (Index q = 0; q < m; ++q) {
            if (obs(p, q)) continue;
            double sum = 0.0;
            int used = 0;
            for (const auto& [dist, r] : ranked) {
                if (!obs(r, q)) continue;
                sum += v(r, q);
                if (++used == k) break;
            }
            if (used == 0) {
                spdlog::debug("knn_impute: no neighbor of row {} observes column {}; using column mean", p, q);
                out(p, q) = means(q);
            } else {
                out(p, q) = sum / used;
            }
        }
    }
    return out;
}

Matrix em_impute(const IncompleteMatrix& X, const BaselineConfig& cfg) {
    cfg.validate();
    const Index n = X.rows();
    const Index m = X.cols();
    if (n <= m) spdlog::warn("em_impute: {} samples for {} features; covariance relies on the ridge", n, m);

    Matrix Z = mean_impute(X);
    if (X.is_complete()) return Z;

    // missing / observed column lists per incomplete row
    struct RowPattern {
        Index row;
        std::vector<Index> missing;
        std::vector<Index> observed;
    };
    std::vector<RowPattern> patterns;
    for (Index p = 0; p < n; ++p) {
        RowPattern rp{p, {}, {}};
        for (Index q = 0; q < m; ++q) (X.observed(p, q) ? rp.observed : rp.missing).push_back(q);
        if (!rp.missing.empty()) patterns.push_back(std::move(rp));
    }

    Matrix conditional_cov = Matrix::Zero(m, m);
    for (int it = 0; it < cfg.em_max_iters; ++it) {
        const Vector mu = Z.colwise().mean();
        const Matrix centered = Z.rowwise() - mu.transpose();
        Matrix sigma = (centered.transpose() * centered + conditional_cov) / static_cast<double>(n);
        sigma.diagonal().array() += cfg.em_ridge;

        Eigen::LLT<Matrix> llt(sigma);
        if (llt.info() != Eigen::Success) throw DivergenceError("em_impute: covariance not positive definite");
        const Matrix precision = llt.solve(Matrix::Identity(m, m));

        conditional_cov.setZero();
        double max_change = 0.0;
        for (const RowPattern& rp : patterns) {
            const auto nm = static_cast<Index>(rp.missing.size());
            const auto no = static_cast<Index>(rp.observed.size());
            Matrix Qmm(nm, nm);
            Matrix Qmo(nm, no);
            for (Index a = 0; a < nm; ++a) {
                for (Index b = 0; b < nm; ++b) Qmm(a, b) = precision(rp.missing[a], rp.missing[b]);
                for (Index b = 0; b < no; ++b) Qmo(a, b) = precision(rp.missing[a], rp.observed[b]);
            }
            Vector resid(no);
            for (Index b = 0; b < no; ++b) resid(b) = Z(rp.row, rp.observed[b]) - mu(rp.observed[b]);

            // conditional mean mu_M - Qmm^-1 Qmo (x_O - mu_O), covariance Qmm^-1
            Eigen::LLT<Matrix> qmm(Qmm);
            const Vector shift = qmm.solve(Qmo * resid);
            const Matrix cov = qmm.solve(Matrix::Identity(nm, nm));
            for (Index a = 0; a < nm; ++a) {
                const Index q = rp.missing[a];
                const double updated = mu(q) - shift(a);
                max_change = std::max(max_change, std::abs(updated - Z(rp.row, q)));
                Z(rp.row, q) = updated;
                for (Index b = 0; b < nm; ++b) conditional_cov(q, rp.missing[b]) += cov(a, b);
            }
        }
        require_finite(Z, "em_impute");
        if (max_change < cfg.em_tol) break;
    }
    return Z;
}

IterativeImputation isvd_impute_detailed(const IncompleteMatrix& X, const BaselineConfig& cfg,
                                         const std::optional<Matrix>& initial) {
    cfg.validate();
    const Index cap = std::max<Index>(1, std::min(X.rows(), X.cols()) - 1);
    Index u = cfg.isvd_rank;
    if (u > cap) {
        spdlog::warn("isvd_impute: rank {} clamped to {}", u, cap);
        u = cap;
    }

    IterativeImputation out;
    if (initial) {
        if (initial->rows() != X.rows() || initial->cols() != X.cols())
            throw DataError("isvd_impute: initial completion has the wrong shape");
        out.completed = compose_xhat(X, *initial);
    } else {
        out.completed = mean_impute(X);
    }
    if (X.is_complete()) {
        out.converged = true;
        return out;
    }

    for (int it = 1; it <= cfg.isvd_max_iters; ++it) {
        require_finite(out.completed, "isvd_impute");
        const auto svd = thin_svd(out.completed);
        const Matrix recon = svd.matrixU().leftCols(u) * svd.singularValues().head(u).asDiagonal() *
                             svd.matrixV().leftCols(u).transpose();
        Matrix next = compose_xhat(X, recon);
        const double change = missing_change(X.mask(), out.completed, next);
        out.completed = std::move(next);
        out.change_trace.push_back(change);
        out.iterations = it;
        if (change < cfg.isvd_tol) {
            out.converged = true;
            break;
        }
    }
    require_finite(out.completed, "isvd_impute");
    return out;
}

Matrix isvd_impute(const IncompleteMatrix& X, const BaselineConfig& cfg) {
    return isvd_impute_detailed(X, cfg).completed;
}

SoftImputation soft_impute_detailed(const IncompleteMatrix& X, const BaselineConfig& cfg) {
    cfg.validate();
    SoftImputation out;
    const Matrix& observed_part = X.values();  // P_obs(X): missing cells are 0

    out.threshold = cfg.soft_shrinkage * thin_svd(observed_part).singularValues()(0);
    out.low_rank = Matrix::Zero(X.rows(), X.cols());

    for (int it = 1; it <= cfg.soft_max_iters; ++it) {
        const Matrix Z = compose_xhat(X, out.low_rank);
        const auto svd = thin_svd(Z);
        const Vector shrunk = (svd.singularValues().array() - out.threshold).cwiseMax(0.0);
        Matrix next = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
        require_finite(next, "soft_impute");

        const double step = (next - out.low_rank).norm();
        const double base = out.low_rank.norm();
        const double change = step == 0.0 ? 0.0 : (base > 0.0 ? step / base : step);

        const Matrix residual = X.mask().select(X.values() - next, Matrix::Zero(X.rows(), X.cols()));
        out.objective_trace.push_back(0.5 * residual.squaredNorm() + out.threshold * shrunk.sum());
        out.low_rank = std::move(next);
        out.iterations = it;
        if (change < cfg.soft_tol) {
            out.converged = true;
            break;
        }
    }
    out.completed = compose_xhat(X, out.low_rank);
    return out;
}

Matrix soft_impute(const IncompleteMatrix& X, const BaselineConfig& cfg) {
    return soft_impute_detailed(X, cfg).completed;
}

Matrix impute(Baseline method, const IncompleteMatrix& X, const BaselineConfig& cfg) {
    switch (method) {
    case Baseline::mean: return mean_impute(X);
    case Baseline::knn: return knn_impute(X, cfg.knn_k);
    case Baseline::em: return em_impute(X, cfg);
    case Baseline::isvd: return isvd_impute(X, cfg);
    case Baseline::soft: return soft_impute(X, cfg);
    }
    throw DataError("unknown baseline");
}

}  // namespace iwmc::baselines
