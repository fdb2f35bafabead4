#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "solarcast/quantile.hpp"
#include "solarcast/scoring.hpp"
#include "solarcast/timeseries.hpp"

namespace solarcast {

/// Whole-run configuration, loaded from a single JSON document. Every
/// default is explicit so the manifest echo replays the run exactly.
struct PipelineConfig {
    // Data source: "synthetic" (bundled generator), "csv", or "url".
    std::string source = "synthetic";
    std::string path;  // CSV path or endpoint URL when source != synthetic
    int synthetic_days = 30;

    double split_ratio = 0.8;
    std::string selection = "gbr";  // gbr | lasso | elasticnet | none
    std::vector<std::string> models = {"GPR", "GBR", "BSTS_long"};
    int horizon = 48;
    std::vector<std::string> combiners = {"QRA"};
    std::vector<double> tau_grid;  // empty = default grid
    ScoringOptions scoring;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    // Forecast-time covariates: realized values by default; previous-day
    // persistence values when set.
    bool persistence_covariates = false;

    // Per-model budgets.
    int gp_restarts = 3;
    int gbr_trees = 300;
    int bsts_iterations = 300;
    int bsts_burn_in = 100;
    int bsts_thin = 2;
    int bsts_short_days = 30;
    int dgp_iterations = 600;
    int dgp_burn_in = 300;
    int dgp_thin = 5;

    void validate() const;  // throws ConfigError
    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_file(const std::string& path);
    std::string to_json() const;
};

/// Produces the point forecast for one 48-hour (or truncated) block given
/// the block's rows and its origin offset within the test window.
using BlockForecaster = std::function<std::vector<double>(
    const TimeSeriesFrame& block, std::size_t origin_row)>;

/// Advance the origin through the test window in `horizon`-hour blocks and
/// stitch the block forecasts together. The last block may be truncated.
std::vector<double> rolling_forecast(const BlockForecaster& forecast_block,
                                     const TimeSeriesFrame& test, int horizon);

/// Fit one roster model ("GPR", "GBR", "BSTS_long", "BSTS_short", "DGP")
/// on the training window and emit its stitched rolling point forecast
/// over `test_inputs`.
std::vector<double> model_forecast(const std::string& model,
                                   const DatasetSplit& split,
                                   const std::vector<std::string>& features,
                                   const TimeSeriesFrame& test_inputs,
                                   const PipelineConfig& config);

struct RunResult {
    ScoreReport scores;
    std::vector<std::string> artifacts;  // file names inside output_dir
};

/// Execute the full workflow: ingest, select, fit, rolling forecasts,
/// combine, score, plots, manifest, report. On any stage failure a FAILED
/// marker naming the stage is left in the output directory and the error
/// propagates.
RunResult run(const PipelineConfig& config);

/// Summarize an existing bundle into report.txt: artifact index plus the
/// best model per metric (MAE, RMSE, CRPS), ties reported explicitly.
/// Returns the report text.
std::string report(const std::string& output_dir);

}  // namespace solarcast
