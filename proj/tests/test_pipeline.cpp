#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/pipeline.hpp"

using namespace solarcast;
namespace fs = std::filesystem;

namespace {

PipelineConfig tiny_config(const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.source = "synthetic";
    cfg.synthetic_days = 15;
    cfg.split_ratio = 0.8;
    cfg.selection = "none";
    cfg.models = {"GBR", "BSTS_long"};
    cfg.horizon = 24;
    cfg.combiners = {"QRA"};
    cfg.tau_grid = {0.1, 0.5, 0.9};
    cfg.output_dir = out_dir;
    cfg.seed = 7;
    cfg.gp_restarts = 1;
    cfg.gbr_trees = 50;
    cfg.bsts_iterations = 80;
    cfg.bsts_burn_in = 30;
    cfg.bsts_thin = 2;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(SOLARCAST_CLI_PATH) + " " + args +
                      " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config: defaults, parse failures, field validation") {
    PipelineConfig defaults = PipelineConfig::from_json("{}");
    CHECK(defaults.source == "synthetic");
    CHECK(defaults.horizon == 48);
    CHECK(defaults.split_ratio == 0.8);
    CHECK(defaults.models ==
          std::vector<std::string>{"GPR", "GBR", "BSTS_long"});
    CHECK(defaults.combiners == std::vector<std::string>{"QRA"});

    CHECK_THROWS_AS(PipelineConfig::from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(R"({"horizon": 0})"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(R"({"models": []})"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(R"({"models": ["Oracle"]})"),
                    ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(R"({"split_ratio": 1.0})"),
                    ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(R"({"data": {"source": "ftp"}})"),
                    ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(
                        R"({"budgets": {"bsts_iterations": 10, "bsts_burn_in": 10}})"),
                    ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_file("/nonexistent/config.json"),
                    ConfigError);
}

TEST_CASE("config: json round trip is lossless") {
    PipelineConfig cfg = tiny_config("somewhere");
    cfg.scoring.exclude_night_hours = true;
    cfg.persistence_covariates = true;
    PipelineConfig back = PipelineConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.models == cfg.models);
    CHECK(back.seed == cfg.seed);
    CHECK(back.scoring.exclude_night_hours);
    CHECK(back.persistence_covariates);
}

TEST_CASE("rolling_forecast: block arithmetic at 96 and 1759 rows") {
    struct BlockLog {
        std::vector<std::size_t> origins;
        std::vector<std::size_t> sizes;
    };
    auto run_blocks = [](std::size_t rows, int horizon) {
        TimeSeriesFrame test = testutil::make_hourly_frame(rows, 200);
        BlockLog log;
        std::vector<double> out = rolling_forecast(
            [&](const TimeSeriesFrame& block, std::size_t origin) {
                log.origins.push_back(origin);
                log.sizes.push_back(block.rows());
                return std::vector<double>(block.ghi);
            },
            test, horizon);
        CHECK(out.size() == rows);
        CHECK(out == test.ghi);  // stitched identity forecast
        return log;
    };

    BlockLog two = run_blocks(96, 48);
    REQUIRE(two.origins.size() == 2);
    CHECK(two.origins == std::vector<std::size_t>{0, 48});
    CHECK(two.sizes == std::vector<std::size_t>{48, 48});

    BlockLog long_window = run_blocks(1759, 48);
    REQUIRE(long_window.origins.size() == 37);
    for (std::size_t b = 0; b < 37; ++b) {
        CHECK(long_window.origins[b] == 48 * b);
        CHECK(long_window.sizes[b] == (b + 1 < 37 ? 48u : 31u));
    }

    BlockLog truncated = run_blocks(30, 48);
    REQUIRE(truncated.origins.size() == 1);
    CHECK(truncated.sizes[0] == 30);
}

TEST_CASE("rolling_forecast: argument validation") {
    TimeSeriesFrame test = testutil::make_hourly_frame(24, 201);
    auto echo = [](const TimeSeriesFrame& block, std::size_t) {
        return std::vector<double>(block.ghi);
    };
    CHECK_THROWS_AS(rolling_forecast(echo, test, 0), ArgumentError);
    CHECK_THROWS_AS(rolling_forecast(echo, TimeSeriesFrame{}, 24),
                    ArgumentError);
}

TEST_CASE("model_forecast: later test rows cannot leak into earlier blocks") {
    TimeSeriesFrame frame = make_synthetic_frame(12, 31);
    DatasetSplit ds = split(frame, 0.75);
    PipelineConfig cfg = tiny_config("unused");
    std::vector<std::string> features(kCovariateNames.begin(),
                                      kCovariateNames.end());

    std::vector<double> base =
        model_forecast("GBR", ds, features, ds.test, cfg);

    // Scramble everything after the first block.
    TimeSeriesFrame tampered = ds.test;
    const std::size_t h = static_cast<std::size_t>(cfg.horizon);
    for (auto& col : tampered.covariates)
        std::reverse(col.begin() + static_cast<std::ptrdiff_t>(h), col.end());
    std::reverse(tampered.ghi.begin() + static_cast<std::ptrdiff_t>(h),
                 tampered.ghi.end());
    std::vector<double> scrambled =
        model_forecast("GBR", ds, features, tampered, cfg);

    REQUIRE(base.size() == scrambled.size());
    for (std::size_t t = 0; t < h; ++t) CHECK(base[t] == scrambled[t]);
}

TEST_CASE("run: smoke bundle, score rows, and bitwise determinism") {
    fs::path dir_a = fresh_dir("solarcast_run_a");
    PipelineConfig cfg = tiny_config(dir_a.string());
    RunResult res = run(cfg);

    // One score row per roster model plus one per combiner.
    REQUIRE(res.scores.rows.size() == 3);
    CHECK(res.scores.rows[0].model == "GBR");
    CHECK(res.scores.rows[1].model == "BSTS_long");
    CHECK(res.scores.rows[2].model == "QRA");
    for (const ScoreRow& r : res.scores.rows) {
        CHECK(r.mae >= 0.0);
        CHECK(r.rmse >= r.mae - 1e-9);
    }

    for (const std::string& name : res.artifacts)
        CHECK(fs::exists(dir_a / name));
    for (const char* expected :
         {"cleaned.csv", "forecast_GBR.csv", "forecast_BSTS_long.csv",
          "combined_QRA.csv", "scores.csv", "murphy.csv", "murphy.svg",
          "forecast.svg", "density.svg", "manifest.json", "report.txt"})
        CHECK(fs::exists(dir_a / expected));
    CHECK_FALSE(fs::exists(dir_a / "FAILED"));

    // The report echoes a best model per metric from the same scores file.
    std::string summary = slurp(dir_a / "report.txt");
    CHECK(summary.find("MAE:") != std::string::npos);
    CHECK(summary.find("RMSE:") != std::string::npos);
    CHECK(summary.find("CRPS:") != std::string::npos);

    // Manifest embeds a replayable config and the audit timestamps.
    std::string manifest = slurp(dir_a / "manifest.json");
    CHECK(manifest.find("\"config\"") != std::string::npos);
    CHECK(manifest.find("\"audit\"") != std::string::npos);

    // Re-running the identical config elsewhere gives byte-identical CSVs.
    fs::path dir_b = fresh_dir("solarcast_run_b");
    PipelineConfig cfg_b = cfg;
    cfg_b.output_dir = dir_b.string();
    run(cfg_b);
    for (const char* name : {"cleaned.csv", "forecast_GBR.csv",
                             "forecast_BSTS_long.csv", "combined_QRA.csv",
                             "scores.csv", "murphy.csv"}) {
        INFO("artifact " << name);
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("run: stage failure leaves a FAILED marker naming the stage") {
    fs::path dir = fresh_dir("solarcast_run_fail");
    PipelineConfig cfg = tiny_config(dir.string());
    cfg.source = "csv";
    cfg.path = (dir / "missing.csv").string();
    CHECK_THROWS_AS(run(cfg), DataError);
    REQUIRE(fs::exists(dir / "FAILED"));
    std::string marker = slurp(dir / "FAILED");
    CHECK(marker.find("stage: ingest") != std::string::npos);
    CHECK(marker.find("cause:") != std::string::npos);
}

TEST_CASE("report: ties and missing artifacts are called out") {
    fs::path dir = fresh_dir("solarcast_report");
    {
        std::ofstream scores(dir / "scores.csv");
        scores << "model,mae,rmse,crps,logs,dss,pinball,zero_density\n"
               << "A,1.5,2,3.5,4,5,6,0\n"
               << "B,1.5,2.5,3.25,4,5,6,0\n";
    }
    std::string summary = report(dir.string());
    CHECK(summary.find("tie between A, B") != std::string::npos);
    CHECK(summary.find("RMSE: A") != std::string::npos);
    CHECK(summary.find("CRPS: B") != std::string::npos);
    CHECK(summary.find("Missing artifacts:") != std::string::npos);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(slurp(dir / "report.txt") == summary);
}

}  // TEST_SUITE("pipeline")

TEST_SUITE("cli") {

TEST_CASE("cli: invocation and configuration failures exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run --config /nonexistent/config.json") == 2);

    fs::path dir = fresh_dir("solarcast_cli_badcfg");
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);
    std::ofstream(dir / "invalid.json") << R"({"horizon": -1})";
    CHECK(run_cli("run --config " + (dir / "invalid.json").string()) == 2);
}

TEST_CASE("cli: unreadable data exits with code 3") {
    fs::path dir = fresh_dir("solarcast_cli_nodata");
    std::ofstream(dir / "cfg.json")
        << R"({"data": {"source": "csv", "path": ")"
        << (dir / "absent.csv").string() << R"("}})";
    CHECK(run_cli("ingest --config " + (dir / "cfg.json").string()) == 3);
}

TEST_CASE("cli: full tiny run succeeds and report replays the bundle") {
    fs::path dir = fresh_dir("solarcast_cli_run");
    PipelineConfig cfg = tiny_config((dir / "bundle").string());
    std::ofstream(dir / "cfg.json") << cfg.to_json();
    CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 0);
    CHECK(fs::exists(dir / "bundle" / "scores.csv"));
    CHECK(fs::exists(dir / "bundle" / "report.txt"));
    CHECK(run_cli("report --config " + (dir / "cfg.json").string()) == 0);

    // --out overrides the configured output directory.
    CHECK(run_cli("ingest --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "elsewhere").string()) == 0);
    CHECK(fs::exists(dir / "elsewhere" / "cleaned.csv"));
}

}  // TEST_SUITE("cli")
