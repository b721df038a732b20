#include "commands.hpp"

#include "fetch.hpp"
#include "run_config.hpp"

#include "iwmc/csv.hpp"
#include "iwmc/random.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

namespace iwmc::cli {

namespace {

namespace fs = std::filesystem;

/// Flags that override RunConfig fields. Each flag is bound to private
/// storage seeded with the default, so --help shows the default, and is
/// copied into the effective config only when given on the command line.
class Overrides {
public:
    template <class Field>
    CLI::Option* add(CLI::App* app, const std::string& name, Field field, const std::string& help) {
        using T = std::remove_reference_t<decltype(field(std::declval<RunConfig&>()))>;
        RunConfig defaults;
        auto value = std::make_shared<T>(field(defaults));
        CLI::Option* opt = app->add_option(name, *value, help)->capture_default_str();
        appliers_.push_back([value, opt, field](RunConfig& cfg) {
            if (opt->count() > 0) field(cfg) = *value;
        });
        return opt;
    }

    template <class Field>
    CLI::Option* add_flag(CLI::App* app, const std::string& name, Field field, const std::string& help) {
        auto value = std::make_shared<bool>(false);
        CLI::Option* opt = app->add_flag(name, *value, help);
        appliers_.push_back([value, opt, field](RunConfig& cfg) {
            if (opt->count() > 0) field(cfg) = *value;
        });
        return opt;
    }

    void apply(RunConfig& cfg) const {
        for (const auto& f : appliers_) f(cfg);
    }

private:
    std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct Common {
    std::string config_path;
};

void add_common(CLI::App* app, Common& common) {
    app->add_option("--config", common.config_path, "JSON config file; flags override its values");
}

RunConfig effective_config(const Common& common, const Overrides& overrides) {
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : RunConfig::load(common.config_path);
    overrides.apply(cfg);
    return cfg;
}

void add_seed(CLI::App* app, Overrides& o) {
    o.add(app, "--seed", [](RunConfig& c) -> auto& { return c.seed; }, "Base seed for every random draw");
}

void add_synth_flags(CLI::App* app, Overrides& o) {
    o.add(app, "--samples", [](RunConfig& c) -> auto& { return c.synth.n_samples; }, "Number of samples");
    o.add(app, "--informative", [](RunConfig& c) -> auto& { return c.synth.n_informative; },
          "Number of informative features");
    o.add(app, "--noise", [](RunConfig& c) -> auto& { return c.synth.n_noise; }, "Number of pure-noise features");
    o.add(app, "--classes", [](RunConfig& c) -> auto& { return c.synth.n_classes; }, "Number of classes");
    o.add(app, "--separation", [](RunConfig& c) -> auto& { return c.synth.class_separation; },
          "Distance of class centers from the origin per informative feature");
    o.add(app, "--noise-variance", [](RunConfig& c) -> auto& { return c.synth.noise_variance; },
          "Variance of the noise features");
}

void add_mstage_flags(CLI::App* app, Overrides& o) {
    o.add(app, "--rank", [](RunConfig& c) -> auto& { return c.iwmc.mstage.rank; }, "Factorization rank r");
    o.add(app, "--beta", [](RunConfig& c) -> auto& { return c.iwmc.mstage.beta; }, "Ridge penalty beta");
    o.add(app, "--eta", [](RunConfig& c) -> auto& { return c.iwmc.mstage.eta; }, "Inner convergence threshold");
    o.add(app, "--max-inner-iters", [](RunConfig& c) -> auto& { return c.iwmc.mstage.max_inner_iters; },
          "Inner iteration cap");
    o.add_flag(app, "--paper-exact-h", [](RunConfig& c) -> auto& { return c.iwmc.mstage.paper_exact_h_update; },
               "Use the orthonormal-G shortcut for the H update");
}

void add_ncfs_flags(CLI::App* app, Overrides& o) {
    o.add(app, "--lambda", [](RunConfig& c) -> auto& { return c.iwmc.ncfs.lambda; }, "NCFS weight penalty");
    o.add(app, "--sigma", [](RunConfig& c) -> auto& { return c.iwmc.ncfs.sigma; }, "NCFS kernel width");
    o.add(app, "--step-size", [](RunConfig& c) -> auto& { return c.iwmc.ncfs.step_size; }, "NCFS initial step");
    o.add(app, "--ncfs-max-iters", [](RunConfig& c) -> auto& { return c.iwmc.ncfs.max_iters; },
          "NCFS iteration cap");
    o.add(app, "--ncfs-tol", [](RunConfig& c) -> auto& { return c.iwmc.ncfs.tol; }, "NCFS objective tolerance");
}

void add_iwmc_flags(CLI::App* app, Overrides& o) {
    add_mstage_flags(app, o);
    add_ncfs_flags(app, o);
    o.add(app, "--delta", [](RunConfig& c) -> auto& { return c.iwmc.delta; },
          "Outer convergence threshold on |w|^2 (inf runs one pass)");
    o.add(app, "--max-outer-iters", [](RunConfig& c) -> auto& { return c.iwmc.max_outer_iters; },
          "Outer iteration cap");
    o.add_flag(app, "--normalize-weights", [](RunConfig& c) -> auto& { return c.iwmc.normalize_weights; },
               "Scale weights to max 1 between passes");
}

void add_baseline_flags(CLI::App* app, Overrides& o) {
    o.add(app, "--knn-k", [](RunConfig& c) -> auto& { return c.baselines.knn_k; }, "Neighbors for knn imputation");
    o.add(app, "--em-max-iters", [](RunConfig& c) -> auto& { return c.baselines.em_max_iters; }, "EM iteration cap");
    o.add(app, "--em-tol", [](RunConfig& c) -> auto& { return c.baselines.em_tol; }, "EM tolerance");
    o.add(app, "--em-ridge", [](RunConfig& c) -> auto& { return c.baselines.em_ridge; }, "EM covariance ridge");
    o.add(app, "--isvd-rank", [](RunConfig& c) -> auto& { return c.baselines.isvd_rank; }, "Iterative SVD rank");
    o.add(app, "--isvd-tol", [](RunConfig& c) -> auto& { return c.baselines.isvd_tol; }, "Iterative SVD tolerance");
    o.add(app, "--isvd-max-iters", [](RunConfig& c) -> auto& { return c.baselines.isvd_max_iters; },
          "Iterative SVD iteration cap");
    o.add(app, "--soft-shrinkage", [](RunConfig& c) -> auto& { return c.baselines.soft_shrinkage; },
          "Soft-impute threshold as a fraction of the top singular value");
    o.add(app, "--soft-tol", [](RunConfig& c) -> auto& { return c.baselines.soft_tol; }, "Soft-impute tolerance");
    o.add(app, "--soft-max-iters", [](RunConfig& c) -> auto& { return c.baselines.soft_max_iters; },
          "Soft-impute iteration cap");
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw DataError("failed writing " + path.string());
}

fs::path sidecar(fs::path path, const std::string& suffix) { return path.replace_extension(suffix); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<std::string> csv_header(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    const auto rows = csv::parse(line);
    return rows.empty() ? std::vector<std::string>{} : rows.front();
}

struct LabelChoice {
    std::string name;
    bool disabled = false;
};

void add_label_flags(CLI::App* app, LabelChoice& label) {
    app->add_option("--label", label.name, "Label column name (default: a column named 'label' if present)");
    app->add_flag("--no-label", label.disabled, "Treat every column as a feature");
}

/// Resolves the label column: explicit name, else a column called "label".
std::optional<ColumnSelector> resolve_label(const fs::path& input, const LabelChoice& label) {
    if (label.disabled) return std::nullopt;
    if (!label.name.empty()) return ColumnSelector{label.name};
    const auto header = csv_header(input);
    for (const auto& h : header) {
        std::string trimmed = h;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
        if (trimmed == "label") return ColumnSelector{std::string("label")};
    }
    return std::nullopt;
}

std::optional<std::vector<std::string>> label_strings(const CsvDataset& ds) {
    if (!ds.labels) return std::nullopt;
    std::vector<std::string> out;
    out.reserve(ds.labels->size());
    for (int c : *ds.labels) out.push_back(ds.class_names[static_cast<std::size_t>(c)]);
    return out;
}

std::string label_name(const std::optional<ColumnSelector>& sel) {
    if (sel && std::holds_alternative<std::string>(*sel)) return std::get<std::string>(*sel);
    return "label";
}

template <class Fn>
void config_checked(Fn&& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        throw DataError(std::string("config error: ") + e.what());
    }
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    Common common;
    std::string out_dir;
};

int cmd_generate(const GenerateArgs& args, const Overrides& o) {
    RunConfig cfg = effective_config(args.common, o);
    config_checked([&] { cfg.synth.validate(); });
    synth::SynthConfig scfg = cfg.synth;
    scfg.seed = derive_seed(cfg.seed, {seed_tag::synth});
    const auto generated = synth::make_classification(scfg);
    const LabeledDataset& data = generated.data;

    ensure_dir(args.out_dir);
    const fs::path csv_path = fs::path(args.out_dir) / "data.csv";
    std::vector<std::string> labels;
    for (int c : data.y) labels.push_back(data.class_names[static_cast<std::size_t>(c)]);
    write_csv(csv_path, data.X, data.feature_names, labels);

    write_json(fs::path(args.out_dir) / "data.json",
               Json{{"command", "generate"},
                    {"config", cfg.to_json({"synth"})},
                    {"rows", data.X.rows()},
                    {"features", data.X.cols()},
                    {"label_column", "label"},
                    {"relevant_features", *data.relevant_features},
                    {"column_order", generated.column_order}});
    spdlog::info("generate: wrote {} ({} x {} features)", csv_path.string(), data.X.rows(), data.X.cols());
    return 0;
}

// ------------------------------------------------------------------ ampute

struct AmputeArgs {
    Common common;
    std::string input;
    std::string output;
    LabelChoice label;
    std::string mechanism = "mcar";
    double rate = 0.05;
};

int cmd_ampute(const AmputeArgs& args, const Overrides& o) {
    const RunConfig cfg = effective_config(args.common, o);
    const synth::Mechanism mech = synth::parse_mechanism(args.mechanism);
    if (mech == synth::Mechanism::none) throw DataError("ampute: mechanism must be mcar or mnar");
    if (!(args.rate >= 0.0 && args.rate < 1.0)) throw DataError("ampute: rate must lie in [0, 1)");

    const auto label = resolve_label(args.input, args.label);
    const CsvDataset ds = read_csv_table(args.input, label);
    if (!ds.X.is_complete()) throw DataError("ampute: input already has missing values");
    const auto amputed =
        synth::ampute(mech, ds.X.values(), args.rate, derive_seed(cfg.seed, {seed_tag::amputation}));

    write_csv(args.output, amputed.X, ds.feature_names, label_strings(ds), label_name(label));
    write_json(sidecar(args.output, ".json"),
               Json{{"command", "ampute"},
                    {"config", cfg.to_json({})},
                    {"input", args.input},
                    {"mechanism", synth::to_string(mech)},
                    {"target_rate", amputed.target_rate},
                    {"achieved_rate", amputed.achieved_rate},
                    {"missing_cells", amputed.X.missing_count()},
                    {"masked_columns", amputed.masked_columns},
                    {"cutoffs", amputed.cutoffs}});
    spdlog::info("ampute: achieved rate {}", amputed.achieved_rate);
    return 0;
}

// ------------------------------------------------------------------ impute

struct ImputeArgs {
    Common common;
    std::string input;
    std::string output;
    LabelChoice label;
    std::string method = "iwmc";
    bool no_standardize = false;
};

int cmd_impute(const ImputeArgs& args, const Overrides& o) {
    const RunConfig cfg = effective_config(args.common, o);
    const auto method = eval::parse_method(args.method);
    if (!method) throw DataError("impute: unknown method '" + args.method + "'");
    config_checked([&] {
        if (*method == eval::Method::iwmc) {
            cfg.iwmc.validate();
        } else {
            cfg.baselines.validate();
        }
    });

    const auto label = resolve_label(args.input, args.label);
    const CsvDataset ds = read_csv_table(args.input, label);
    if (*method == eval::Method::iwmc && !ds.labels) throw DataError("iwmc requires labels");

    const bool standardize = !args.no_standardize;
    const StandardizationParams params = standardize ? standardize_fit(ds.X) : StandardizationParams{};
    const IncompleteMatrix work = standardize ? standardize_apply(ds.X, params) : ds.X;

    Matrix completed;
    std::optional<IwmcResult> fitted;
    if (*method == eval::Method::iwmc) {
        IwmcConfig icfg = cfg.iwmc;
        icfg.mstage.seed = derive_seed(cfg.seed, {seed_tag::mstage});
        LabeledDataset data{work, *ds.labels, std::nullopt, ds.feature_names, ds.class_names};
        fitted = fit(data, icfg);
        completed = fitted->completed;
    } else {
        completed = baselines::impute(*baselines::parse_baseline(args.method), work, cfg.baselines);
    }
    if (standardize) completed = standardize_invert(completed, params);
    // observed cells come back verbatim, free of standardization round-off
    completed = ds.X.mask().select(ds.X.values(), completed);

    write_csv(args.output, IncompleteMatrix::fully_observed(completed), ds.feature_names, label_strings(ds),
              label_name(label));
    Json meta{{"command", "impute"},
              {"config", *method == eval::Method::iwmc ? cfg.to_json({"mstage", "ncfs", "iwmc"})
                                                        : cfg.to_json({"baselines"})},
              {"input", args.input},
              {"method", args.method},
              {"standardized", standardize},
              {"rows", ds.X.rows()},
              {"features", ds.X.cols()},
              {"imputed_cells", ds.X.missing_count()}};
    if (fitted) {
        const fs::path weights_path = sidecar(args.output, ".weights.csv");
        std::ofstream out(weights_path, std::ios::binary);
        if (!out) throw DataError("cannot write file " + weights_path.string());
        csv::write_row(out, {"feature", "weight"});
        for (Index l = 0; l < fitted->weights.size(); ++l)
            csv::write_row(out, {ds.feature_names[static_cast<std::size_t>(l)],
                                 csv::format_double(fitted->weights[l])});
        write_json(sidecar(args.output, ".trace.json"),
                   Json{{"command", "impute"},
                        {"config", meta["config"]},
                        {"zeta_trace", fitted->zeta_trace},
                        {"outer_iterations", fitted->outer_iterations},
                        {"converged", fitted->converged}});
        meta["weights_file"] = weights_path.filename().string();
    }
    write_json(sidecar(args.output, ".json"), meta);
    spdlog::info("impute: {} filled {} cells", args.method, ds.X.missing_count());
    return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    Common common;
    std::vector<std::string> data;
    std::string label = "label";
    bool synthetic = false;
    std::vector<std::string> methods;
    std::vector<std::string> mechanisms;
    std::vector<double> rates;
    std::string out_dir;
    CLI::Option* methods_opt = nullptr;
    CLI::Option* mechanisms_opt = nullptr;
    CLI::Option* rates_opt = nullptr;
    Index select = 0;
    CLI::Option* select_opt = nullptr;
};

int cmd_benchmark(const BenchmarkArgs& args, const Overrides& o) {
    RunConfig cfg = effective_config(args.common, o);
    if (args.methods_opt->count() > 0) {
        cfg.protocol.methods.clear();
        for (const auto& name : args.methods) {
            const auto m = eval::parse_method(name);
            if (!m) throw DataError("config error: unknown method '" + name + "'");
            cfg.protocol.methods.push_back(*m);
        }
    }
    if (args.mechanisms_opt->count() > 0) {
        cfg.protocol.mechanisms.clear();
        for (const auto& name : args.mechanisms) cfg.protocol.mechanisms.push_back(synth::parse_mechanism(name));
    }
    if (args.rates_opt->count() > 0) cfg.protocol.rates = args.rates;
    if (args.select_opt->count() > 0) cfg.protocol.select_count = args.select;
    cfg.protocol.seed = cfg.seed;
    config_checked([&] {
        cfg.protocol.validate();
        cfg.iwmc.validate();
        cfg.baselines.validate();
        if (args.synthetic) cfg.synth.validate();
    });
    if (args.data.empty() && !args.synthetic) throw DataError("benchmark: give --data and/or --synthetic");

    std::vector<eval::BenchmarkDataset> datasets;
    for (const auto& path : args.data)
        datasets.push_back({fs::path(path).stem().string(), read_csv(path, ColumnSelector{args.label})});
    if (args.synthetic) {
        synth::SynthConfig scfg = cfg.synth;
        scfg.seed = derive_seed(cfg.seed, {seed_tag::synth});
        datasets.push_back({"synthetic", synth::make_classification(scfg).data});
    }

    const auto report = eval::run_benchmark(datasets, cfg.protocol, cfg.iwmc, cfg.baselines);
    eval::BenchmarkReport out = report;
    out.config = cfg.to_json({"protocol", "mstage", "ncfs", "iwmc", "baselines"});
    if (args.synthetic) out.config["synth"] = iwmc::to_json(cfg.synth);
    Json inputs = Json::array();
    for (const auto& p : args.data) inputs.push_back(p);
    out.config["data"] = inputs;

    ensure_dir(args.out_dir);
    out.write_json(fs::path(args.out_dir) / "benchmark.json");
    out.write_csv(fs::path(args.out_dir) / "benchmark.csv");
    for (const auto& e : out.errors)
        spdlog::error("benchmark: {} / {} / {} {}: {}", e.dataset, e.method, e.mechanism, e.rate, e.message);
    spdlog::info("benchmark: {} records, {} failed cells", out.records.size(), out.errors.size());
    return out.records.empty() ? 1 : 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    Common common;
    std::vector<Index> ranks;
    std::vector<double> betas;
    std::string mechanism;
    std::string out_dir;
    CLI::Option* ranks_opt = nullptr;
    CLI::Option* betas_opt = nullptr;
    CLI::Option* mechanism_opt = nullptr;
};

int cmd_sweep(const SweepArgs& args, const Overrides& o) {
    RunConfig cfg = effective_config(args.common, o);
    if (args.ranks_opt->count() > 0) cfg.sweep.ranks = args.ranks;
    if (args.betas_opt->count() > 0) cfg.sweep.betas = args.betas;
    if (args.mechanism_opt->count() > 0) cfg.sweep.mechanism = synth::parse_mechanism(args.mechanism);
    cfg.sweep.synth = cfg.synth;
    cfg.sweep.seed = cfg.seed;
    config_checked([&] {
        cfg.sweep.validate();
        cfg.iwmc.ncfs.validate();
    });

    eval::SweepReport report = eval::run_sweep(cfg.sweep, cfg.iwmc);
    report.config = cfg.to_json({"sweep", "synth", "mstage", "ncfs", "iwmc"});
    ensure_dir(args.out_dir);
    report.write_json(fs::path(args.out_dir) / "sweep.json");
    report.write_csv(fs::path(args.out_dir) / "sweep.csv");
    for (const auto& e : report.errors) spdlog::error("sweep: {}", e);
    const bool any = std::any_of(report.cells.begin(), report.cells.end(),
                                 [](const eval::SweepCell& c) { return !c.success_rates.empty(); });
    return any ? 0 : 1;
}

// ------------------------------------------------------------------- fetch

struct FetchArgs {
    std::string url;
    std::string sha256;
    std::string output;
};

int cmd_fetch(const FetchArgs& args) {
    const std::optional<std::string> expected =
        args.sha256.empty() ? std::nullopt : std::optional<std::string>(args.sha256);
    const std::string digest = fetch(args.url, args.output, expected);
    std::cout << digest << "  " << args.output << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Feature-weighted matrix completion for classification with missing values"};
    app.require_subcommand(1);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Errors only");
    Overrides overrides;

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic labeled dataset");
    add_common(generate, gen.common);
    add_seed(generate, overrides);
    add_synth_flags(generate, overrides);
    generate->add_option("-o,--out-dir", gen.out_dir, "Output directory (data.csv, data.json)")->required();

    AmputeArgs amp;
    CLI::App* ampute = app.add_subcommand("ampute", "Inject missing values into a complete CSV");
    add_common(ampute, amp.common);
    add_seed(ampute, overrides);
    ampute->add_option("-i,--input", amp.input, "Complete input CSV")->required()->check(CLI::ExistingFile);
    add_label_flags(ampute, amp.label);
    ampute->add_option("--mechanism", amp.mechanism, "mcar or mnar")->capture_default_str();
    ampute->add_option("--rate", amp.rate, "Fraction of cells to mask, in [0, 1)")->capture_default_str();
    ampute->add_option("-o,--output", amp.output, "Output CSV; metadata goes next to it as .json")->required();

    ImputeArgs imp;
    CLI::App* impute = app.add_subcommand("impute", "Fill missing cells of a CSV");
    add_common(impute, imp.common);
    add_seed(impute, overrides);
    impute->add_option("-i,--input", imp.input, "Input CSV")->required()->check(CLI::ExistingFile);
    add_label_flags(impute, imp.label);
    impute->add_option("-m,--method", imp.method, "iwmc, mean, knn, em, isvd or soft")->capture_default_str();
    impute->add_flag("--no-standardize", imp.no_standardize, "Impute raw values instead of z-scores");
    impute->add_option("-o,--output", imp.output, "Completed CSV; sidecars share its stem")->required();
    add_iwmc_flags(impute, overrides);
    add_baseline_flags(impute, overrides);

    BenchmarkArgs bench;
    CLI::App* benchmark = app.add_subcommand("benchmark", "Cross-validated comparison of imputation methods");
    add_common(benchmark, bench.common);
    add_seed(benchmark, overrides);
    benchmark->add_option("--data", bench.data, "Labeled CSV dataset (repeatable)")->check(CLI::ExistingFile);
    benchmark->add_option("--label", bench.label, "Label column of --data files")->capture_default_str();
    benchmark->add_flag("--synthetic", bench.synthetic, "Add a generated dataset (see the synth flags)");
    add_synth_flags(benchmark, overrides);
    bench.methods_opt = benchmark->add_option("--methods", bench.methods, "Comma list (default: all six)")
                            ->delimiter(',');
    bench.mechanisms_opt =
        benchmark->add_option("--mechanisms,--mechanism", bench.mechanisms, "Comma list of none, mcar, mnar "
                                                                            "(default: none)")
            ->delimiter(',');
    bench.rates_opt =
        benchmark->add_option("--rates", bench.rates, "Comma list of amputation rates (default: 0.01,0.05,0.1)")
            ->delimiter(',');
    overrides.add(benchmark, "--repeats", [](RunConfig& c) -> auto& { return c.protocol.repeats; },
                  "Repetitions of the cross-validation");
    overrides.add(benchmark, "--folds", [](RunConfig& c) -> auto& { return c.protocol.folds; }, "Folds per repetition");
    overrides.add(benchmark, "--classifier-k", [](RunConfig& c) -> auto& { return c.protocol.classifier_k; },
                  "Neighbors of the KNN classifier");
    bench.select_opt = benchmark->add_option("--select", bench.select,
                                             "Selected features (default: 50 if amputed, else ceil(m/2))");
    overrides.add(benchmark, "-j,--jobs", [](RunConfig& c) -> auto& { return c.protocol.jobs; }, "Worker threads");
    overrides.add_flag(benchmark, "--timings", [](RunConfig& c) -> auto& { return c.protocol.record_timings; },
                       "Record wall-clock time per fold (makes reports non-reproducible)");
    add_iwmc_flags(benchmark, overrides);
    add_baseline_flags(benchmark, overrides);
    benchmark->add_option("-o,--out-dir", bench.out_dir, "Output directory (benchmark.json, benchmark.csv)")
        ->required();

    SweepArgs sw;
    CLI::App* sweep = app.add_subcommand("sweep", "Success rate over a rank x beta grid on synthetic data");
    add_common(sweep, sw.common);
    add_seed(sweep, overrides);
    add_synth_flags(sweep, overrides);
    sw.ranks_opt = sweep->add_option("--ranks", sw.ranks, "Comma list (default: 1,3,5,10)")->delimiter(',');
    sw.betas_opt =
        sweep->add_option("--betas", sw.betas, "Comma list (default: 0.25,0.5,1,2,5,10,20,30)")->delimiter(',');
    sw.mechanism_opt = sweep->add_option("--mechanism", sw.mechanism, "mcar or mnar (default: mcar)");
    overrides.add(sweep, "--rate", [](RunConfig& c) -> auto& { return c.sweep.rate; }, "Amputation rate");
    overrides.add(sweep, "--seeds", [](RunConfig& c) -> auto& { return c.sweep.seeds; }, "Generated datasets per cell");
    overrides.add(sweep, "-j,--jobs", [](RunConfig& c) -> auto& { return c.sweep.jobs; }, "Worker threads");
    add_ncfs_flags(sweep, overrides);
    overrides.add(sweep, "--eta", [](RunConfig& c) -> auto& { return c.iwmc.mstage.eta; }, "Inner convergence threshold");
    overrides.add(sweep, "--max-inner-iters", [](RunConfig& c) -> auto& { return c.iwmc.mstage.max_inner_iters; },
                  "Inner iteration cap");
    overrides.add(sweep, "--delta", [](RunConfig& c) -> auto& { return c.iwmc.delta; }, "Outer convergence threshold");
    overrides.add(sweep, "--max-outer-iters", [](RunConfig& c) -> auto& { return c.iwmc.max_outer_iters; },
                  "Outer iteration cap");
    sweep->add_option("-o,--out-dir", sw.out_dir, "Output directory (sweep.json, sweep.csv)")->required();

    FetchArgs fa;
    CLI::App* fetch_cmd = app.add_subcommand("fetch", "Download a dataset CSV and verify its checksum");
    fetch_cmd->add_option("--url", fa.url, "Source URL (http, https or file)")->required();
    fetch_cmd->add_option("--sha256", fa.sha256, "Expected SHA-256 hex digest");
    fetch_cmd->add_option("-o,--output", fa.output, "Destination file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);
    spdlog::set_pattern("[%l] %v");

    try {
        if (*generate) return cmd_generate(gen, overrides);
        if (*ampute) return cmd_ampute(amp, overrides);
        if (*impute) return cmd_impute(imp, overrides);
        if (*benchmark) return cmd_benchmark(bench, overrides);
        if (*sweep) return cmd_sweep(sw, overrides);
        if (*fetch_cmd) return cmd_fetch(fa);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 2;
}

}  // namespace iwmc::cli
