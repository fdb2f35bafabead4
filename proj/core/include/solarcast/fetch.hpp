#pragma once

#include <optional>
#include <string>

#include "solarcast/dataset.hpp"
#include "solarcast/timeseries.hpp"

namespace solarcast {

/// Inclusive date window passed through to the data endpoint as query
/// parameters; rows outside it are filtered after download.
struct DateWindow {
    std::string start;  // ISO-8601
    std::string end;
};

/// Transport failure that is worth retrying (connection refused, timeout).
struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& what)
        : std::runtime_error(what) {}
};

/// HTTP GET of a CSV export. The result is identical to load_csv applied to
/// the downloaded payload. Non-2xx responses raise DataError carrying the
/// status code; connection failures raise TransportError.
TimeSeriesFrame fetch_remote(const std::string& url, const DateWindow& window,
                             const CsvSchema& schema);

}  // namespace solarcast
