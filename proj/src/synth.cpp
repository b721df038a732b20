#include "iwmc/synth.hpp"

#include "iwmc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace iwmc::synth {

void SynthConfig::validate() const {
    if (n_samples < 2) throw DataError("synth: n_samples must be at least 2");
    if (n_informative < 1) throw DataError("synth: n_informative must be at least 1");
    if (n_noise < 0) throw DataError("synth: n_noise must be nonnegative");
    if (n_classes < 2) throw DataError("synth: n_classes must be at least 2");
    if (!(class_separation > 0.0)) throw DataError("synth: class_separation must be positive");
    if (!(noise_variance > 0.0)) throw DataError("synth: noise_variance must be positive");
    if (n_informative < 62 && static_cast<double>(n_classes) > std::ldexp(1.0, static_cast<int>(n_informative)))
        throw DataError("synth: more classes than hypercube vertices");
}

SyntheticDataset make_classification(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, {seed_tag::synth}));
    std::uniform_int_distribution<int> coin(0, 1);
    std::normal_distribution<double> normal(0.0, 1.0);

    const Index n = cfg.n_samples;
    const Index k = cfg.n_informative;
    const Index m = k + cfg.n_noise;

    // class centroids on hypercube vertices
    std::vector<std::vector<int>> vertices;
    std::vector<int> first(static_cast<std::size_t>(k));
    for (auto& s : first) s = coin(rng) ? 1 : -1;
    std::vector<int> opposite(first.size());
    std::transform(first.begin(), first.end(), opposite.begin(), [](int s) { return -s; });
    vertices.push_back(first);
    vertices.push_back(opposite);
    std::set<std::vector<int>> used(vertices.begin(), vertices.end());
    while (static_cast<int>(vertices.size()) < cfg.n_classes) {
        std::vector<int> v(first.size());
        for (auto& s : v) s = coin(rng) ? 1 : -1;
        if (used.insert(v).second) vertices.push_back(std::move(v));
    }

    Labels y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) y[i] = static_cast<int>(i % cfg.n_classes);
    std::shuffle(y.begin(), y.end(), rng);

    Matrix raw(n, m);
    const double noise_sd = std::sqrt(cfg.noise_variance);
    for (Index i = 0; i < n; ++i) {
        const auto& centre = vertices[static_cast<std::size_t>(y[i])];
        for (Index l = 0; l < k; ++l) raw(i, l) = cfg.class_separation * centre[l] + normal(rng);
        for (Index l = k; l < m; ++l) raw(i, l) = noise_sd * normal(rng);
    }

    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);

    Matrix shuffled(n, m);
    std::vector<Index> relevant;
    std::vector<std::string> names;
    for (Index c = 0; c < m; ++c) {
        shuffled.col(c) = raw.col(order[c]);
        if (order[c] < k) relevant.push_back(c);
        names.push_back("f" + std::to_string(c));
    }
    std::vector<std::string> class_names;
    for (int c = 0; c < cfg.n_classes; ++c) class_names.push_back(std::to_string(c));

    LabeledDataset data{IncompleteMatrix::fully_observed(std::move(shuffled)), std::move(y), std::move(relevant),
                        std::move(names), std::move(class_names)};
    return SyntheticDataset{std::move(data), std::move(raw), std::move(order)};
}

std::string_view to_string(Mechanism m) {
    switch (m) {
    case Mechanism::none: return "none";
    case Mechanism::mcar: return "mcar";
    case Mechanism::mnar: return "mnar";
    }
    return "none";
}

Mechanism parse_mechanism(std::string_view name) {
    if (name == "none") return Mechanism::none;
    if (name == "mcar") return Mechanism::mcar;
    if (name == "mnar") return Mechanism::mnar;
    throw DataError("unknown missingness mechanism '" + std::string(name) + "'");
}

namespace {

Index target_count(const Matrix& X, double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) throw DataError("amputation rate must lie in [0, 1)");
    return static_cast<Index>(std::llround(rate * static_cast<double>(X.size())));
}

}  // namespace

Amputation ampute_mcar(const Matrix& X, double rate, std::uint64_t seed) {
    const Index n = X.rows();
    const Index m = X.cols();
    const Index total = target_count(X, rate);
    if (total > X.size() - m)
        throw DataError("ampute_mcar: rate too high to leave an observed entry in every column");

    std::vector<Index> cells(static_cast<std::size_t>(X.size()));
    std::iota(cells.begin(), cells.end(), Index{0});
    Rng rng(derive_seed(seed, {seed_tag::amputation}));
    std::shuffle(cells.begin(), cells.end(), rng);

    // cell index c is (row c % n, column c / n)
    Mask observed = Mask::Constant(n, m, true);
    std::vector<Index> masked_per_col(static_cast<std::size_t>(m), 0);
    for (Index i = 0; i < total; ++i) {
        observed(cells[i] % n, cells[i] / n) = false;
        ++masked_per_col[cells[i] / n];
    }

    std::size_t next = static_cast<std::size_t>(total);
    for (Index q = 0; q < m; ++q) {
        if (masked_per_col[q] < n) continue;
        observed(0, q) = true;  // lowest-index masked cell of a fully masked column
        --masked_per_col[q];
        bool replaced = false;
        while (next < cells.size()) {
            const Index c = cells[next++];
            const Index p = c % n;
            const Index col = c / n;
            if (!observed(p, col) || masked_per_col[col] + 1 >= n) continue;
            observed(p, col) = false;
            ++masked_per_col[col];
            replaced = true;
            break;
        }
        if (!replaced) throw DataError("ampute_mcar: column guard repair failed");
    }

    Amputation out{IncompleteMatrix(X, std::move(observed)), Mechanism::mcar, rate, 0.0, {}, {}};
    out.achieved_rate = out.X.missing_rate();
    return out;
}

Amputation ampute_mnar(const Matrix& X, double rate, std::uint64_t seed) {
    const Index n = X.rows();
    const Index m = X.cols();
    const Index total = target_count(X, rate);

    std::vector<Index> columns(static_cast<std::size_t>(m));
    std::iota(columns.begin(), columns.end(), Index{0});
    Rng rng(derive_seed(seed, {seed_tag::mnar_columns}));
    std::shuffle(columns.begin(), columns.end(), rng);
    const Index h = std::max<Index>(1, m / 2);
    columns.resize(static_cast<std::size_t>(h));
    std::sort(columns.begin(), columns.end());

    if (total > h * (n - 1))
        throw DataError("ampute_mnar: calibration failed, rate too high for the self-masking columns");

    Mask observed = Mask::Constant(n, m, true);
    Amputation out{IncompleteMatrix::fully_observed(Matrix::Zero(1, 1)), Mechanism::mnar, rate, 0.0, columns, {}};
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (Index c = 0; c < h; ++c) {
        const Index q = columns[c];
        const Index count = total / h + (c < total % h ? 1 : 0);
        std::iota(rows.begin(), rows.end(), Index{0});
        std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) { return X(a, q) > X(b, q); });
        for (Index i = 0; i < count; ++i) observed(rows[i], q) = false;
        out.cutoffs.push_back(count > 0 ? X(rows[count - 1], q) : std::numeric_limits<double>::infinity());
    }

    out.X = IncompleteMatrix(X, std::move(observed));
    out.achieved_rate = out.X.missing_rate();
    return out;
}

Amputation ampute(Mechanism mechanism, const Matrix& X, double rate, std::uint64_t seed) {
    switch (mechanism) {
    case Mechanism::mcar: return ampute_mcar(X, rate, seed);
    case Mechanism::mnar: return ampute_mnar(X, rate, seed);
    case Mechanism::none: break;
    }
    if (rate != 0.0) throw DataError("mechanism 'none' requires rate 0");
    return Amputation{IncompleteMatrix::fully_observed(X), Mechanism::none, 0.0, 0.0, {}, {}};
}

}  // namespace iwmc::synth
