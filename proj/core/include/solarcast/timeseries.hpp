#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace solarcast {

// Covariate order follows the station export: air temperature, relative
// humidity, wind speed, barometric pressure, wind direction, wind direction
// standard deviation, total rain, maximum wind speed.
inline constexpr std::array<const char*, 8> kCovariateNames = {
    "Temp", "RH", "WS", "BP", "WD", "WD_Stv", "Rain_Tot", "WS_Max"};

inline constexpr int kNumCovariates = 8;

/// Timestamped hourly GHI series plus meteorological covariates.
/// Immutable by convention once cleaned; all downstream consumers share it
/// read-only. Timestamps are wall-clock seconds in station-local time with
/// the UTC offset recorded alongside.
struct TimeSeriesFrame {
    std::vector<std::int64_t> timestamps;  // local wall-clock, seconds
    int utc_offset_minutes = 0;
    std::vector<double> ghi;  // W/m^2
    std::array<std::vector<double>, kNumCovariates> covariates;
    std::string provenance;

    std::size_t rows() const { return timestamps.size(); }
    bool empty() const { return timestamps.empty(); }

    const std::vector<double>& covariate(const std::string& name) const;
    static int covariate_index(const std::string& name);  // -1 if unknown

    /// Row-range copy [begin, end).
    TimeSeriesFrame slice(std::size_t begin, std::size_t end) const;
};

struct DatasetSplit {
    TimeSeriesFrame train;
    TimeSeriesFrame test;
    double ratio = 0.8;
};

/// Parse "YYYY-MM-DDTHH:MM:SS[+HH:MM|-HH:MM|Z]". Returns local wall-clock
/// seconds and the offset in minutes. Throws DataError on malformed input.
std::pair<std::int64_t, int> parse_iso8601(const std::string& text);

std::string format_iso8601(std::int64_t local_seconds, int utc_offset_minutes);

}  // namespace solarcast
