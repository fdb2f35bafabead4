#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solarcast/timeseries.hpp"

namespace solarcast {

/// Maps canonical column names ("timestamp", "GHI", "Temp", ...) to the
/// header names used by a particular CSV export.
struct CsvSchema {
    std::map<std::string, std::string> columns;

    /// Identity schema: canonical names are the CSV header names.
    static CsvSchema canonical();
};

TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema);
TimeSeriesFrame load_csv_text(const std::string& text, const CsvSchema& schema,
                              const std::string& provenance);

/// Re-emit a frame as CSV with canonical column order. Numeric values are
/// printed with round-trip precision so load_csv reproduces them exactly.
void write_csv(const TimeSeriesFrame& frame, std::ostream& out);
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

struct GapPolicy {
    int max_interp_hours = 2;
};

struct CleanReport {
    std::size_t rows_dropped = 0;
    std::size_t values_interpolated = 0;
    std::size_t ghi_clamped = 0;
};

/// Validate and repair a raw frame: interpolate short gaps, drop rows in
/// longer ones, clamp negative GHI to zero. Refuses (DataError) when more
/// than half the rows would be dropped. Idempotent.
TimeSeriesFrame clean(const TimeSeriesFrame& frame, const GapPolicy& policy,
                      CleanReport* report = nullptr);

/// Asserts the post-clean invariants (hour-grid timestamps, value ranges,
/// no missing entries). Throws DataError on violation.
void validate_clean(const TimeSeriesFrame& frame);

DatasetSplit split(const TimeSeriesFrame& frame, double ratio);

struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> features;
    Eigen::VectorXd means;   // per-column centering offsets (0 when raw)
    Eigen::VectorXd scales;  // per-column divisors (1 when raw)
    bool standardized = false;

    /// Map new raw covariate rows through the stored scaling.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& raw) const;
};

DesignMatrix design_matrix(const TimeSeriesFrame& frame,
                           const std::vector<std::string>& features,
                           bool standardize);

/// Raw covariate matrix for the named features, no target, no scaling.
Eigen::MatrixXd covariate_matrix(const TimeSeriesFrame& frame,
                                 const std::vector<std::string>& features);

/// Synthetic diurnal dataset used by smoke tests and the bundled demo
/// pipeline: `days` full days of plausible hourly GHI plus covariates.
TimeSeriesFrame make_synthetic_frame(int days, std::uint64_t seed);

}  // namespace solarcast
