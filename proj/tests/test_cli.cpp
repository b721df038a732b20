#include "iwmc/csv.hpp"
#include "iwmc/data.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string output;
};

const fs::path& workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "iwmc_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args) {
    const fs::path log = workdir() / "last_output.txt";
    const std::string cmd = "cd " + workdir().string() + " && " + IWMC_CLI_PATH + " " + args + " > " + log.string() +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(workdir() / p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

void write_file(const fs::path& p, const std::string& text) { std::ofstream(workdir() / p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("help documents defaults") {
    const Run r = run("impute --help");
    CHECK(r.code == 0);
    CHECK(r.output.find("--beta") != std::string::npos);
    CHECK(r.output.find("20") != std::string::npos);
    CHECK(run("").code != 0);
}

TEST_CASE("generate writes a labeled CSV with metadata, deterministically") {
    REQUIRE(run("generate --samples 300 --informative 10 --noise 100 --seed 1 -o gen1").code == 0);
    const auto rows = iwmc::csv::parse(slurp("gen1/data.csv"));
    CHECK(rows.size() == 301);
    CHECK(rows[0].size() == 111);
    CHECK(rows[0].back() == "label");
    const Json meta = read_json("gen1/data.json");
    CHECK(meta["relevant_features"].size() == 10);
    CHECK(meta["config"]["seed"] == 1);
    CHECK(meta["config"]["synth"]["noise"] == 100);

    REQUIRE(run("generate --samples 300 --informative 10 --noise 100 --seed 1 -o gen2").code == 0);
    CHECK(slurp("gen1/data.csv") == slurp("gen2/data.csv"));
    CHECK(slurp("gen1/data.json") == slurp("gen2/data.json"));

    const Run bad = run("generate --noise -1 -o gen3");
    CHECK(bad.code != 0);
    CHECK(bad.output.find("config error") != std::string::npos);
}

TEST_CASE("ampute hits the requested rate and rejects rate 1") {
    REQUIRE(run("generate --samples 200 --informative 5 --noise 15 --seed 2 -o base").code == 0);
    const std::string before = slurp("base/data.csv");
    REQUIRE(run("ampute -i base/data.csv --mechanism mcar --rate 0.05 --seed 3 -o mcar.csv").code == 0);
    const Json mcar = read_json("mcar.json");
    CHECK(mcar["achieved_rate"].get<double>() == 0.05);
    CHECK(mcar["missing_cells"] == 200);
    const auto ds = iwmc::read_csv(workdir() / "mcar.csv", iwmc::ColumnSelector{std::string("label")});
    CHECK(ds.X.missing_count() == 200);

    REQUIRE(run("ampute -i base/data.csv --mechanism mnar --rate 0.10 --seed 3 -o mnar.csv").code == 0);
    const Json mnar = read_json("mnar.json");
    CHECK(std::abs(mnar["achieved_rate"].get<double>() - 0.10) <= 0.005);
    CHECK(mnar["masked_columns"].size() == 10);

    CHECK(run("ampute -i base/data.csv --mechanism mcar --rate 1.0 -o bad.csv").code != 0);
    CHECK(run("ampute -i base/data.csv --mechanism mar --rate 0.1 -o bad.csv").code != 0);
    CHECK(slurp("base/data.csv") == before);
}

TEST_CASE("impute mean fills column means and keeps observed cells") {
    write_file("toy.csv", "a,b\n1,10\n,20\n3,\n");
    REQUIRE(run("impute -i toy.csv -m mean --no-standardize -o toy_mean.csv").code == 0);
    const auto rows = iwmc::csv::parse(slurp("toy_mean.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[2][0]) == 2.0);
    CHECK(std::stod(rows[3][1]) == 15.0);
    CHECK(rows[1][0] == "1");
    // standardizing first gives the same answer for mean imputation
    REQUIRE(run("impute -i toy.csv -m mean -o toy_mean_std.csv").code == 0);
    const auto std_rows = iwmc::csv::parse(slurp("toy_mean_std.csv"));
    CHECK(std::abs(std::stod(std_rows[2][0]) - 2.0) < 1e-12);
    CHECK(read_json("toy_mean.json")["method"] == "mean");
}

TEST_CASE("impute iwmc needs labels and writes weights and trace") {
    write_file("unlabeled.csv", "a,b\n1,2\n,3\n4,5\n6,\n");
    const Run r = run("impute -i unlabeled.csv -m iwmc -o never.csv");
    CHECK(r.code != 0);
    CHECK(r.output.find("iwmc requires labels") != std::string::npos);

    REQUIRE(run("generate --samples 80 --informative 3 --noise 5 --seed 4 -o small").code == 0);
    REQUIRE(run("ampute -i small/data.csv --rate 0.1 --seed 4 -o small_mcar.csv").code == 0);
    REQUIRE(run("impute -i small_mcar.csv -m iwmc --beta 20 --rank 5 -o small_iwmc.csv").code == 0);
    const auto in = iwmc::read_csv(workdir() / "small_mcar.csv", iwmc::ColumnSelector{std::string("label")});
    const auto out = iwmc::read_csv(workdir() / "small_iwmc.csv", iwmc::ColumnSelector{std::string("label")});
    CHECK(out.X.is_complete());
    CHECK(out.y == in.y);
    for (iwmc::Index p = 0; p < in.X.rows(); ++p)
        for (iwmc::Index q = 0; q < in.X.cols(); ++q)
            if (in.X.observed(p, q)) CHECK(out.X.values()(p, q) == in.X.values()(p, q));
    const auto weights = iwmc::csv::parse(slurp("small_iwmc.weights.csv"));
    CHECK(weights.size() == 9);
    const Json trace = read_json("small_iwmc.trace.json");
    CHECK(trace["zeta_trace"].size() == trace["outer_iterations"].get<std::size_t>());
    CHECK(trace["config"]["mstage"]["beta"] == 20.0);
    CHECK(trace["config"]["mstage"]["rank"] == 5);
    CHECK(run("impute -i small_mcar.csv -m median -o x.csv").code != 0);
}

TEST_CASE("config file precedence and unknown keys") {
    write_file("cfg.json", R"({"seed": 9, "mstage": {"rank": 3, "beta": 2.5}})");
    REQUIRE(run("impute -i small_mcar.csv -m iwmc --config cfg.json --rank 2 --max-outer-iters 2 -o cfg_out.csv")
                .code == 0);
    const Json meta = read_json("cfg_out.json");
    CHECK(meta["config"]["seed"] == 9);
    CHECK(meta["config"]["mstage"]["rank"] == 2);
    CHECK(meta["config"]["mstage"]["beta"] == 2.5);
    CHECK(meta["config"]["iwmc"]["max_outer_iters"] == 2);

    write_file("bad_cfg.json", R"({"mstage": {"rnak": 3}})");
    const Run r = run("impute -i small_mcar.csv -m mean --config bad_cfg.json -o bad_out.csv");
    CHECK(r.code != 0);
    CHECK(r.output.find("unknown key 'mstage.rnak'") != std::string::npos);
}

TEST_CASE("benchmark record counts and reproducibility") {
    const std::string args =
        "benchmark --data small/data.csv --methods mean,iwmc --mechanisms mcar --rates 0.1 --repeats 2 --folds 5 "
        "--max-outer-iters 2 --seed 7 -o ";
    REQUIRE(run(args + "bench1").code == 0);
    REQUIRE(run(args + "bench2 --jobs 2").code == 0);
    const Json report = read_json("bench1/benchmark.json");
    CHECK(report["records"].size() == 20);
    CHECK(report["config"]["seed"] == 7);
    CHECK(slurp("bench1/benchmark.json") == slurp("bench2/benchmark.json"));
    CHECK(slurp("bench1/benchmark.csv") == slurp("bench2/benchmark.csv"));
    const auto csv_rows = iwmc::csv::parse(slurp("bench1/benchmark.csv"));
    CHECK(csv_rows.size() == 21);
    CHECK(csv_rows[0] == iwmc::csv::Row{"dataset", "method", "mechanism", "rate", "fold", "seed", "acc", "f1",
                                        "success_rate", "wall_ms", "repeat", "selected"});
    CHECK(run("benchmark -o nothing").code != 0);
}

TEST_CASE("sweep emits the full grid") {
    REQUIRE(run("sweep --samples 30 --informative 2 --noise 2 --seeds 1 --max-outer-iters 1 --ncfs-max-iters 5 "
                "-o sweep1")
                .code == 0);
    const Json report = read_json("sweep1/sweep.json");
    CHECK(report["cells"].size() == 32);
    for (const auto& c : report["cells"]) {
        CHECK(c.contains("mean"));
        CHECK(c.contains("std"));
    }
    CHECK(iwmc::csv::parse(slurp("sweep1/sweep.csv")).size() == 33);
}

TEST_CASE("fetch verifies the checksum") {
    write_file("remote.csv", "a,label\n1,x\n2,y\n");
    // sha256 of the bytes above
    const Run ok = run("fetch --url file://" + (workdir() / "remote.csv").string() + " -o fetched.csv");
    REQUIRE(ok.code == 0);
    CHECK(slurp("fetched.csv") == slurp("remote.csv"));
    const std::string digest = ok.output.substr(0, 64);
    CHECK(run("fetch --url file://" + (workdir() / "remote.csv").string() + " --sha256 " + digest +
              " -o fetched2.csv")
              .code == 0);
    const Run bad = run("fetch --url file://" + (workdir() / "remote.csv").string() + " --sha256 " +
                        std::string(64, '0') + " -o fetched3.csv");
    CHECK(bad.code != 0);
    CHECK(bad.output.find("mismatch") != std::string::npos);
    CHECK_FALSE(fs::exists(workdir() / "fetched3.csv"));
    CHECK(run("fetch --url file:///nonexistent/x.csv -o fetched4.csv").code != 0);
}
