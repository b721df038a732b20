#pragma once

// Cross-validated imputation benchmark and the rank/beta sensitivity sweep.
//
// Per (dataset, scenario, method, repeat): stratified k-fold CV. Per fold:
// standardize on the training rows, impute the training rows, learn NCFS
// weights on them (IWMC yields both at once), impute the test rows (baselines
// see the test rows alone, IWMC reuses the fitted weights), keep the top-s
// features by weight and classify the test rows with a KNN vote.

#include "iwmc/baselines.hpp"
#include "iwmc/config_json.hpp"
#include "iwmc/iwmc.hpp"
#include "iwmc/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace iwmc::eval {

enum class Method { iwmc, mean, knn, em, isvd, soft };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
std::vector<Method> all_methods();

struct WeightedImputation {
    FeatureWeights weights;
    Matrix train_completed;
};

/// Imputes a standardized training set and learns feature weights on it.
/// `seed` seeds the IWMC factor initialization; baselines ignore it.
WeightedImputation impute_and_weigh(Method method, const LabeledDataset& train, const IwmcConfig& iwmc_cfg,
                                    const baselines::BaselineConfig& baseline_cfg, std::uint64_t seed);

/// Imputes held-out rows: IWMC with frozen weights, baselines from scratch.
Matrix impute_held_out(Method method, const IncompleteMatrix& test, const FeatureWeights& weights,
                       const IwmcConfig& iwmc_cfg, const baselines::BaselineConfig& baseline_cfg,
                       std::uint64_t seed);

struct BenchmarkDataset {
    std::string id;
    LabeledDataset data;
};

struct ProtocolConfig {
    std::vector<Method> methods = all_methods();
    /// `none` evaluates the data as given; mcar/mnar ampute it once per rate and repeat.
    std::vector<synth::Mechanism> mechanisms{synth::Mechanism::none};
    std::vector<double> rates{0.01, 0.05, 0.10};
    int repeats = 10;
    int folds = 5;
    int classifier_k = 5;
    /// Overrides the selection size: otherwise 50 for amputed data and
    /// ceil(m / 2) for data evaluated as given, capped at m.
    std::optional<Index> select_count;
    std::uint64_t seed = 0;
    int jobs = 1;
    /// Timings make reports non-reproducible, so they are opt-in.
    bool record_timings = false;

    void validate() const;
};

Json to_json(const ProtocolConfig& cfg);
void update_from_json(ProtocolConfig& cfg, const Json& j, const std::string& section = "protocol");

struct BenchmarkRecord {
    std::string dataset;
    std::string method;
    std::string mechanism;
    double rate = 0.0;
    int repeat = 0;
    int fold = 0;
    std::uint64_t seed = 0;
    double acc = 0.0;
    double f1 = 0.0;
    std::optional<double> success_rate;
    std::vector<Index> selected_features;
    std::optional<double> wall_ms;
};

struct MeanStd {
    double mean = 0.0;
    /// Population standard deviation.
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& values);

struct BenchmarkAggregate {
    std::string dataset;
    std::string method;
    std::string mechanism;
    double rate = 0.0;
    std::size_t count = 0;
    MeanStd acc;
    MeanStd f1;
    std::optional<MeanStd> success_rate;
};

struct CellError {
    std::string dataset;
    std::string method;
    std::string mechanism;
    double rate = 0.0;
    std::string message;
};

struct BenchmarkReport {
    Json config;
    std::vector<BenchmarkRecord> records;
    std::vector<BenchmarkAggregate> aggregates;
    std::vector<CellError> errors;

    /// Groups records by (dataset, mechanism, rate, method) in record order.
    static std::vector<BenchmarkAggregate> aggregate(const std::vector<BenchmarkRecord>& records);

    Json to_json() const;
    void write_json(const std::filesystem::path& path) const;
    /// One row per record with columns dataset, method, mechanism, rate, fold,
    /// seed, acc, f1, success_rate, wall_ms, repeat, selected.
    void write_csv(const std::filesystem::path& path) const;
};

BenchmarkReport run_benchmark(const std::vector<BenchmarkDataset>& datasets, const ProtocolConfig& protocol,
                              const IwmcConfig& iwmc_cfg, const baselines::BaselineConfig& baseline_cfg);

struct SweepConfig {
    std::vector<Index> ranks{1, 3, 5, 10};
    std::vector<double> betas{0.25, 0.5, 1, 2, 5, 10, 20, 30};
    synth::SynthConfig synth;
    synth::Mechanism mechanism = synth::Mechanism::mcar;
    double rate = 0.05;
    int seeds = 10;
    std::uint64_t seed = 0;
    int jobs = 1;

    void validate() const;
};

Json to_json(const SweepConfig& cfg);
void update_from_json(SweepConfig& cfg, const Json& j, const std::string& section = "sweep");

struct SweepCell {
    Index rank = 0;
    double beta = 0.0;
    /// Top-k success rate per generated dataset, k = number of relevant features.
    std::vector<double> success_rates;
    MeanStd summary;
};

struct SweepReport {
    Json config;
    std::vector<SweepCell> cells;
    std::vector<std::string> errors;

    Json to_json() const;
    void write_json(const std::filesystem::path& path) const;
    void write_csv(const std::filesystem::path& path) const;
};

/// Every (rank, beta) cell fits IWMC on the same `seeds` generated datasets.
/// `iwmc_cfg` supplies everything except rank and beta.
SweepReport run_sweep(const SweepConfig& sweep, const IwmcConfig& iwmc_cfg);

/// Runs tasks [0, count) on up to `jobs` threads; task i writes only slot i.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace iwmc::eval
