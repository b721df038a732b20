#include "iwmc/benchmark.hpp"

#include "iwmc/csv.hpp"
#include "iwmc/eval.hpp"
#include "iwmc/random.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace iwmc::eval {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::iwmc, "iwmc"}, {Method::mean, "mean"}, {Method::knn, "knn"},
    {Method::em, "em"},     {Method::isvd, "isvd"}, {Method::soft, "soft"},
};

baselines::Baseline as_baseline(Method m) {
    return *baselines::parse_baseline(to_string(m));
}

/// Rows of X; a column with no observed entry among them is filled with
/// `fallback` and treated as observed.
IncompleteMatrix fold_subset(const IncompleteMatrix& X, const std::vector<Index>& rows, const Vector& fallback) {
    Matrix v(static_cast<Index>(rows.size()), X.cols());
    Mask m(static_cast<Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        v.row(static_cast<Index>(i)) = X.values().row(rows[i]);
        m.row(static_cast<Index>(i)) = X.mask().row(rows[i]);
    }
    for (Index q = 0; q < X.cols(); ++q) {
        if (m.col(q).any()) continue;
        spdlog::debug("benchmark: column {} unobserved in fold subset; filling with {}", q, fallback(q));
        v.col(q).setConstant(fallback(q));
        m.col(q).setConstant(true);
    }
    return IncompleteMatrix(std::move(v), std::move(m));
}

Matrix select_columns(const Matrix& X, const std::vector<Index>& columns) {
    Matrix out(X.rows(), static_cast<Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) out.col(static_cast<Index>(c)) = X.col(columns[c]);
    return out;
}

Labels pick(const Labels& y, const std::vector<Index>& rows) {
    Labels out;
    out.reserve(rows.size());
    for (Index r : rows) out.push_back(y[r]);
    return out;
}

struct Scenario {
    synth::Mechanism mechanism;
    double rate;
};

std::vector<Scenario> scenarios_for(const BenchmarkDataset& ds, const ProtocolConfig& protocol) {
    std::vector<Scenario> out;
    for (synth::Mechanism mech : protocol.mechanisms) {
        if (mech == synth::Mechanism::none) {
            out.push_back({mech, ds.data.X.missing_rate()});
        } else {
            for (double r : protocol.rates) out.push_back({mech, r});
        }
    }
    return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json mean_std_json(const MeanStd& s) { return Json{{"mean", s.mean}, {"std", s.std}}; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

std::vector<std::string> method_names(const std::vector<Method>& methods) {
    std::vector<std::string> out;
    for (Method m : methods) out.emplace_back(to_string(m));
    return out;
}

}  // namespace

std::string_view to_string(Method m) {
    for (const auto& [value, name] : kMethodNames)
        if (value == m) return name;
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (const auto& [value, label] : kMethodNames)
        if (label == name) return value;
    return std::nullopt;
}

std::vector<Method> all_methods() {
    return {Method::iwmc, Method::mean, Method::knn, Method::em, Method::isvd, Method::soft};
}

WeightedImputation impute_and_weigh(Method method, const LabeledDataset& train, const IwmcConfig& iwmc_cfg,
                                    const baselines::BaselineConfig& baseline_cfg, std::uint64_t seed) {
    if (method == Method::iwmc) {
        IwmcConfig cfg = iwmc_cfg;
        cfg.mstage.seed = seed;
        IwmcResult res = fit(train, cfg);
        return WeightedImputation{std::move(res.weights), std::move(res.completed)};
    }
    Matrix completed = baselines::impute(as_baseline(method), train.X, baseline_cfg);
    ncfs::NcfsResult learned = ncfs::learn_weights(completed, train.y, iwmc_cfg.ncfs);
    return WeightedImputation{std::move(learned.weights), std::move(completed)};
}

Matrix impute_held_out(Method method, const IncompleteMatrix& test, const FeatureWeights& weights,
                       const IwmcConfig& iwmc_cfg, const baselines::BaselineConfig& baseline_cfg,
                       std::uint64_t seed) {
    if (method == Method::iwmc) {
        mstage::MStageConfig cfg = iwmc_cfg.mstage;
        cfg.seed = seed;
        return impute_test(test, weights, cfg);
    }
    return baselines::impute(as_baseline(method), test, baseline_cfg);
}

void ProtocolConfig::validate() const {
    if (methods.empty()) throw DataError("protocol: at least one method is required");
    if (mechanisms.empty()) throw DataError("protocol: at least one mechanism is required");
    for (synth::Mechanism m : mechanisms) {
        if (m != synth::Mechanism::none && rates.empty())
            throw DataError("protocol: amputation mechanisms need at least one rate");
    }
    for (double r : rates)
        if (!(r >= 0.0 && r < 1.0)) throw DataError("protocol: rates must lie in [0, 1)");
    if (repeats < 1) throw DataError("protocol: repeats must be at least 1");
    if (folds < 2) throw DataError("protocol: folds must be at least 2");
    if (classifier_k < 1) throw DataError("protocol: classifier_k must be at least 1");
    if (select_count && *select_count < 1) throw DataError("protocol: select must be at least 1");
    if (jobs < 1) throw DataError("protocol: jobs must be at least 1");
}

Json to_json(const ProtocolConfig& cfg) {
    Json mechanisms = Json::array();
    for (synth::Mechanism m : cfg.mechanisms) mechanisms.push_back(synth::to_string(m));
    return Json{{"methods", method_names(cfg.methods)},
                {"mechanisms", mechanisms},
                {"rates", cfg.rates},
                {"repeats", cfg.repeats},
                {"folds", cfg.folds},
                {"classifier_k", cfg.classifier_k},
                {"select", cfg.select_count ? Json(*cfg.select_count) : Json(nullptr)},
                {"record_timings", cfg.record_timings}};
}

void update_from_json(ProtocolConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j,
                        {"methods", "mechanisms", "rates", "repeats", "folds", "classifier_k", "select",
                         "record_timings"},
                        section);
    try {
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& name : j.at("methods")) {
                const auto m = parse_method(name.get<std::string>());
                if (!m) throw DataError("config: unknown method '" + name.get<std::string>() + "'");
                cfg.methods.push_back(*m);
            }
        }
        if (j.contains("mechanisms")) {
            cfg.mechanisms.clear();
            for (const auto& name : j.at("mechanisms"))
                cfg.mechanisms.push_back(synth::parse_mechanism(name.get<std::string>()));
        }
        if (j.contains("rates")) cfg.rates = j.at("rates").get<std::vector<double>>();
        if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
        if (j.contains("folds")) cfg.folds = j.at("folds").get<int>();
        if (j.contains("classifier_k")) cfg.classifier_k = j.at("classifier_k").get<int>();
        if (j.contains("select")) {
            const auto& s = j.at("select");
            cfg.select_count = s.is_null() ? std::nullopt : std::optional<Index>(s.get<Index>());
        }
        if (j.contains("record_timings")) cfg.record_timings = j.at("record_timings").get<bool>();
    } catch (const nlohmann::json::exception&) {
        throw DataError("config: section '" + section + "' has a mistyped value");
    }
}

MeanStd mean_std(const std::vector<double>& values) {
    if (values.empty()) return {};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return MeanStd{mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::vector<BenchmarkAggregate> BenchmarkReport::aggregate(const std::vector<BenchmarkRecord>& records) {
    std::vector<BenchmarkAggregate> out;
    std::vector<std::vector<const BenchmarkRecord*>> members;
    for (const BenchmarkRecord& r : records) {
        auto it = std::find_if(out.begin(), out.end(), [&](const BenchmarkAggregate& a) {
            return a.dataset == r.dataset && a.method == r.method && a.mechanism == r.mechanism && a.rate == r.rate;
        });
        if (it == out.end()) {
            out.push_back(BenchmarkAggregate{r.dataset, r.method, r.mechanism, r.rate, 0, {}, {}, std::nullopt});
            members.emplace_back();
            it = out.end() - 1;
        }
        members[static_cast<std::size_t>(it - out.begin())].push_back(&r);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        std::vector<double> acc, f1, success;
        for (const BenchmarkRecord* r : members[g]) {
            acc.push_back(r->acc);
            f1.push_back(r->f1);
            if (r->success_rate) success.push_back(*r->success_rate);
        }
        out[g].count = members[g].size();
        out[g].acc = mean_std(acc);
        out[g].f1 = mean_std(f1);
        if (!success.empty()) out[g].success_rate = mean_std(success);
    }
    return out;
}

Json BenchmarkReport::to_json() const {
    Json recs = Json::array();
    for (const BenchmarkRecord& r : records) {
        recs.push_back(Json{{"dataset", r.dataset},
                            {"method", r.method},
                            {"mechanism", r.mechanism},
                            {"rate", r.rate},
                            {"repeat", r.repeat},
                            {"fold", r.fold},
                            {"seed", r.seed},
                            {"acc", r.acc},
                            {"f1", r.f1},
                            {"success_rate", optional_number(r.success_rate)},
                            {"wall_ms", optional_number(r.wall_ms)},
                            {"selected_features", r.selected_features}});
    }
    Json aggs = Json::array();
    for (const BenchmarkAggregate& a : aggregates) {
        aggs.push_back(Json{{"dataset", a.dataset},
                            {"method", a.method},
                            {"mechanism", a.mechanism},
                            {"rate", a.rate},
                            {"count", a.count},
                            {"acc", mean_std_json(a.acc)},
                            {"f1", mean_std_json(a.f1)},
                            {"success_rate", a.success_rate ? mean_std_json(*a.success_rate) : Json(nullptr)}});
    }
    Json errs = Json::array();
    for (const CellError& e : errors) {
        errs.push_back(Json{{"dataset", e.dataset},
                            {"method", e.method},
                            {"mechanism", e.mechanism},
                            {"rate", e.rate},
                            {"message", e.message}});
    }
    return Json{{"schema", "iwmc-benchmark/1"},
                {"f1_average", "macro"},
                {"std", "population"},
                {"config", config},
                {"records", recs},
                {"aggregates", aggs},
                {"errors", errs}};
}

void BenchmarkReport::write_json(const std::filesystem::path& path) const { write_text(path, to_json().dump(2) + "\n"); }

void BenchmarkReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file " + path.string());
    csv::write_row(out, {"dataset", "method", "mechanism", "rate", "fold", "seed", "acc", "f1", "success_rate",
                         "wall_ms", "repeat", "selected"});
    for (const BenchmarkRecord& r : records) {
        std::string selected;
        for (std::size_t i = 0; i < r.selected_features.size(); ++i) {
            if (i > 0) selected += ';';
            selected += std::to_string(r.selected_features[i]);
        }
        csv::write_row(out, {r.dataset, r.method, r.mechanism, csv::format_double(r.rate), std::to_string(r.fold),
                             std::to_string(r.seed), csv::format_double(r.acc), csv::format_double(r.f1),
                             r.success_rate ? csv::format_double(*r.success_rate) : "",
                             r.wall_ms ? csv::format_double(*r.wall_ms) : "", std::to_string(r.repeat), selected});
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

BenchmarkReport run_benchmark(const std::vector<BenchmarkDataset>& datasets, const ProtocolConfig& protocol,
                              const IwmcConfig& iwmc_cfg, const baselines::BaselineConfig& baseline_cfg) {
    protocol.validate();
    iwmc_cfg.validate();
    baseline_cfg.validate();

    struct Job {
        std::size_t dataset;
        std::size_t scenario;
        Scenario spec;
        std::size_t method;
        int repeat;
    };
    struct Outcome {
        std::vector<BenchmarkRecord> records;
        std::optional<std::string> error;
    };

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const auto scenarios = scenarios_for(datasets[d], protocol);
        for (std::size_t s = 0; s < scenarios.size(); ++s)
            for (std::size_t mi = 0; mi < protocol.methods.size(); ++mi)
                for (int rep = 0; rep < protocol.repeats; ++rep) jobs.push_back({d, s, scenarios[s], mi, rep});
    }

    std::vector<Outcome> outcomes(jobs.size());
    parallel_for(jobs.size(), protocol.jobs, [&](std::size_t j) {
        const Job& job = jobs[j];
        const BenchmarkDataset& ds = datasets[job.dataset];
        const Method method = protocol.methods[job.method];
        Outcome& outcome = outcomes[j];
        try {
            LabeledDataset data = ds.data;
            data.require_supervised();
            const bool amputed = job.spec.mechanism != synth::Mechanism::none;
            if (amputed) {
                if (!data.X.is_complete())
                    throw DataError("amputation requires a dataset without missing values");
                const auto seed = derive_seed(protocol.seed, {seed_tag::amputation, job.dataset, job.scenario,
                                                              static_cast<std::uint64_t>(job.repeat)});
                data.X = synth::ampute(job.spec.mechanism, data.X.values(), job.spec.rate, seed).X;
            }

            const Index m = data.X.cols();
            const Index select = std::min(
                m, protocol.select_count.value_or(amputed ? Index{50} : (m + 1) / 2));
            const std::uint64_t repeat_seed = derive_seed(protocol.seed, {static_cast<std::uint64_t>(job.repeat)});
            const auto folds = stratified_kfold(data.y, protocol.folds, repeat_seed);
            const Vector overall_means = data.X.observed_column_means();

            for (int f = 0; f < protocol.folds; ++f) {
                const auto started = std::chrono::steady_clock::now();
                const std::vector<Index>& test_rows = folds[static_cast<std::size_t>(f)];
                std::vector<Index> train_rows;
                for (int g = 0; g < protocol.folds; ++g)
                    if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
                std::sort(train_rows.begin(), train_rows.end());

                const IncompleteMatrix train_raw = fold_subset(data.X, train_rows, overall_means);
                const IncompleteMatrix test_raw =
                    fold_subset(data.X, test_rows, train_raw.observed_column_means());
                const StandardizationParams params = standardize_fit(train_raw);
                LabeledDataset train{standardize_apply(train_raw, params), pick(data.y, train_rows),
                                     std::nullopt, {}, {}};
                const IncompleteMatrix test = standardize_apply(test_raw, params);
                const Labels test_y = pick(data.y, test_rows);

                const std::uint64_t fold_seed =
                    derive_seed(repeat_seed, {seed_tag::mstage, static_cast<std::uint64_t>(f)});
                const WeightedImputation fitted =
                    impute_and_weigh(method, train, iwmc_cfg, baseline_cfg, fold_seed);
                const Matrix test_completed =
                    impute_held_out(method, test, fitted.weights, iwmc_cfg, baseline_cfg, fold_seed);

                const std::vector<Index> selected = top_features(fitted.weights, select);
                const int k = std::min<int>(protocol.classifier_k, static_cast<int>(train_rows.size()));
                const Labels predicted = knn_predict(select_columns(fitted.train_completed, selected), train.y,
                                                     select_columns(test_completed, selected), k);

                BenchmarkRecord rec;
                rec.dataset = ds.id;
                rec.method = std::string(to_string(method));
                rec.mechanism = std::string(synth::to_string(job.spec.mechanism));
                rec.rate = job.spec.rate;
                rec.repeat = job.repeat;
                rec.fold = f;
                rec.seed = repeat_seed;
                rec.acc = accuracy(test_y, predicted);
                rec.f1 = macro_f1(test_y, predicted);
                if (data.relevant_features && !data.relevant_features->empty()) {
                    const auto& rel = *data.relevant_features;
                    rec.success_rate =
                        success_rate(fitted.weights, rel, std::min<Index>(m, static_cast<Index>(rel.size())));
                }
                rec.selected_features = selected;
                if (protocol.record_timings) {
                    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                            started)
                                      .count();
                }
                outcome.records.push_back(std::move(rec));
            }
        } catch (const std::exception& e) {
            outcome.records.clear();
            outcome.error = e.what();
        }
    });

    BenchmarkReport report;
    report.config = Json{{"seed", protocol.seed},
                         {"protocol", to_json(protocol)},
                         {"mstage", iwmc::to_json(iwmc_cfg.mstage)},
                         {"ncfs", iwmc::to_json(iwmc_cfg.ncfs)},
                         {"iwmc", iwmc::to_json(iwmc_cfg)},
                         {"baselines", iwmc::to_json(baseline_cfg)}};

    // any failed repeat drops the whole (dataset, scenario, method) cell
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (!outcomes[j].error) continue;
        const Job& job = jobs[j];
        const std::string dataset = datasets[job.dataset].id;
        const std::string method(to_string(protocol.methods[job.method]));
        const std::string mechanism(synth::to_string(job.spec.mechanism));
        const bool seen = std::any_of(report.errors.begin(), report.errors.end(), [&](const CellError& e) {
            return e.dataset == dataset && e.method == method && e.mechanism == mechanism && e.rate == job.spec.rate;
        });
        if (!seen) report.errors.push_back({dataset, method, mechanism, job.spec.rate, *outcomes[j].error});
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        const bool failed = std::any_of(jobs.begin(), jobs.end(), [&](const Job& other) {
            const std::size_t o = static_cast<std::size_t>(&other - jobs.data());
            return outcomes[o].error && other.dataset == job.dataset && other.scenario == job.scenario &&
                   other.method == job.method;
        });
        if (failed) continue;
        for (auto& rec : outcomes[j].records) report.records.push_back(std::move(rec));
    }
    report.aggregates = BenchmarkReport::aggregate(report.records);
    return report;
}

void SweepConfig::validate() const {
    if (ranks.empty() || betas.empty()) throw DataError("sweep: rank and beta grids must be non-empty");
    for (Index r : ranks)
        if (r < 1) throw DataError("sweep: ranks must be at least 1");
    for (double b : betas)
        if (!(b > 0.0)) throw DataError("sweep: betas must be positive");
    synth.validate();
    if (!(rate >= 0.0 && rate < 1.0)) throw DataError("sweep: rate must lie in [0, 1)");
    if (seeds < 1) throw DataError("sweep: seeds must be at least 1");
    if (jobs < 1) throw DataError("sweep: jobs must be at least 1");
}

Json to_json(const SweepConfig& cfg) {
    return Json{{"ranks", cfg.ranks},
                {"betas", cfg.betas},
                {"mechanism", synth::to_string(cfg.mechanism)},
                {"rate", cfg.rate},
                {"seeds", cfg.seeds}};
}

void update_from_json(SweepConfig& cfg, const Json& j, const std::string& section) {
    reject_unknown_keys(j, {"ranks", "betas", "mechanism", "rate", "seeds"}, section);
    try {
        if (j.contains("ranks")) cfg.ranks = j.at("ranks").get<std::vector<Index>>();
        if (j.contains("betas")) cfg.betas = j.at("betas").get<std::vector<double>>();
        if (j.contains("mechanism")) cfg.mechanism = synth::parse_mechanism(j.at("mechanism").get<std::string>());
        if (j.contains("rate")) cfg.rate = j.at("rate").get<double>();
        if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<int>();
    } catch (const nlohmann::json::exception&) {
        throw DataError("config: section '" + section + "' has a mistyped value");
    }
}

Json SweepReport::to_json() const {
    Json out_cells = Json::array();
    for (const SweepCell& c : cells) {
        out_cells.push_back(Json{{"rank", c.rank},
                                 {"beta", c.beta},
                                 {"success_rates", c.success_rates},
                                 {"mean", c.summary.mean},
                                 {"std", c.summary.std}});
    }
    return Json{{"schema", "iwmc-sweep/1"}, {"std", "population"}, {"config", config}, {"cells", out_cells},
                {"errors", errors}};
}

void SweepReport::write_json(const std::filesystem::path& path) const { write_text(path, to_json().dump(2) + "\n"); }

void SweepReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file " + path.string());
    csv::write_row(out, {"rank", "beta", "runs", "mean", "std"});
    for (const SweepCell& c : cells) {
        csv::write_row(out, {std::to_string(c.rank), csv::format_double(c.beta), std::to_string(c.success_rates.size()),
                             csv::format_double(c.summary.mean), csv::format_double(c.summary.std)});
    }
    if (!out) throw DataError("failed writing " + path.string());
}

SweepReport run_sweep(const SweepConfig& sweep, const IwmcConfig& iwmc_cfg) {
    sweep.validate();
    iwmc_cfg.ncfs.validate();

    struct Prepared {
        LabeledDataset data;
        std::vector<Index> relevant;
        std::uint64_t fit_seed;
    };
    std::vector<Prepared> prepared;
    for (int s = 0; s < sweep.seeds; ++s) {
        const auto tag = static_cast<std::uint64_t>(s);
        synth::SynthConfig scfg = sweep.synth;
        scfg.seed = derive_seed(sweep.seed, {seed_tag::synth, tag});
        synth::SyntheticDataset generated = synth::make_classification(scfg);
        const auto amputed = synth::ampute(sweep.mechanism, generated.data.X.values(), sweep.rate,
                                           derive_seed(sweep.seed, {seed_tag::amputation, tag}));
        LabeledDataset data = std::move(generated.data);
        data.X = standardize_apply(amputed.X, standardize_fit(amputed.X));
        std::vector<Index> relevant = *data.relevant_features;
        prepared.push_back({std::move(data), std::move(relevant), derive_seed(sweep.seed, {seed_tag::mstage, tag})});
    }

    const std::size_t n_cells = sweep.ranks.size() * sweep.betas.size();
    const std::size_t n_seeds = prepared.size();
    std::vector<std::optional<double>> rates(n_cells * n_seeds);
    std::vector<std::string> task_errors(n_cells * n_seeds);

    parallel_for(n_cells * n_seeds, sweep.jobs, [&](std::size_t t) {
        const std::size_t cell = t / n_seeds;
        const std::size_t s = t % n_seeds;
        IwmcConfig cfg = iwmc_cfg;
        cfg.mstage.rank = sweep.ranks[cell / sweep.betas.size()];
        cfg.mstage.beta = sweep.betas[cell % sweep.betas.size()];
        cfg.mstage.seed = prepared[s].fit_seed;
        try {
            const IwmcResult res = fit(prepared[s].data, cfg);
            const auto& rel = prepared[s].relevant;
            rates[t] = success_rate(res.weights, rel, static_cast<Index>(rel.size()));
        } catch (const std::exception& e) {
            task_errors[t] = e.what();
        }
    });

    SweepReport report;
    report.config = Json{{"seed", sweep.seed},
                         {"sweep", to_json(sweep)},
                         {"synth", iwmc::to_json(sweep.synth)},
                         {"mstage", iwmc::to_json(iwmc_cfg.mstage)},
                         {"ncfs", iwmc::to_json(iwmc_cfg.ncfs)},
                         {"iwmc", iwmc::to_json(iwmc_cfg)}};
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        SweepCell out;
        out.rank = sweep.ranks[cell / sweep.betas.size()];
        out.beta = sweep.betas[cell % sweep.betas.size()];
        for (std::size_t s = 0; s < n_seeds; ++s) {
            const std::size_t t = cell * n_seeds + s;
            if (rates[t]) {
                out.success_rates.push_back(*rates[t]);
            } else {
                report.errors.push_back("rank " + std::to_string(out.rank) + ", beta " +
                                        csv::format_double(out.beta) + ", run " + std::to_string(s) + ": " +
                                        task_errors[t]);
            }
        }
        out.summary = mean_std(out.success_rates);
        report.cells.push_back(std::move(out));
    }
    return report;
}

}  // namespace iwmc::eval
