#pragma once

// Synthetic labeled data and missingness injection.

#include "iwmc/data.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace iwmc::synth {

struct SynthConfig {
    Index n_samples = 300;
    Index n_informative = 10;
    Index n_noise = 0;
    int n_classes = 2;
    double class_separation = 1.0;
    double noise_variance = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticDataset {
    LabeledDataset data;
    /// Unshuffled values: columns [0, n_informative) informative, the rest noise.
    Matrix unshuffled;
    /// column_order[c] is the source (unshuffled) column stored at final position c.
    std::vector<Index> column_order;
};

/// Informative features come from class-conditional Gaussians with unit
/// variance around hypercube vertices scaled by class_separation. Classes 0
/// and 1 sit on opposite vertices, so every informative feature separates
/// them; further classes take distinct random vertices. Noise features are
/// N(0, noise_variance). Columns are shuffled; relevant_features records
/// where the informative ones ended up. Class sizes differ by at most one.
SyntheticDataset make_classification(const SynthConfig& cfg);

enum class Mechanism { none, mcar, mnar };
std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);

struct Amputation {
    IncompleteMatrix X;
    Mechanism mechanism = Mechanism::none;
    double target_rate = 0.0;
    double achieved_rate = 0.0;
    /// MNAR only: self-masking columns and the cutoff applied in each.
    std::vector<Index> masked_columns;
    std::vector<double> cutoffs;
};

/// Exactly round(rate * n * m) cells masked, uniformly without replacement.
/// A column left without observations gets its lowest-row masked cell
/// restored and a replacement cell drawn elsewhere.
Amputation ampute_mcar(const Matrix& X, double rate, std::uint64_t seed);

/// Self-masking: a random half of the columns (at least one) lose their
/// largest values. The masked count round(rate * n * m) is split as evenly as
/// possible over those columns; within each, the top values are masked, so
/// every masked value is >= that column's cutoff.
Amputation ampute_mnar(const Matrix& X, double rate, std::uint64_t seed);

Amputation ampute(Mechanism mechanism, const Matrix& X, double rate, std::uint64_t seed);

}  // namespace iwmc::synth
