#include "solarcast/timeseries.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>

#include "solarcast/errors.hpp"

namespace solarcast {

namespace {

// Days from civil date (proleptic Gregorian), Hinnant's algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

int TimeSeriesFrame::covariate_index(const std::string& name) {
    for (int i = 0; i < kNumCovariates; ++i)
        if (name == kCovariateNames[i]) return i;
    return -1;
}

const std::vector<double>& TimeSeriesFrame::covariate(
    const std::string& name) const {
    int idx = covariate_index(name);
    if (idx < 0) throw ArgumentError("unknown covariate: " + name);
    return covariates[static_cast<std::size_t>(idx)];
}

TimeSeriesFrame TimeSeriesFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows())
        throw ArgumentError("slice range out of bounds");
    TimeSeriesFrame out;
    out.utc_offset_minutes = utc_offset_minutes;
    out.provenance = provenance;
    auto b = static_cast<std::ptrdiff_t>(begin);
    auto e = static_cast<std::ptrdiff_t>(end);
    out.timestamps.assign(timestamps.begin() + b, timestamps.begin() + e);
    out.ghi.assign(ghi.begin() + b, ghi.begin() + e);
    for (int c = 0; c < kNumCovariates; ++c)
        out.covariates[c].assign(covariates[c].begin() + b,
                                 covariates[c].begin() + e);
    return out;
}

std::pair<std::int64_t, int> parse_iso8601(const std::string& text) {
    int y, mo, d, h, mi, s;
    int n = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%n", &y, &mo, &d, &h, &mi,
                    &s, &n) != 6)
        throw DataError("unparseable timestamp: " + text);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59 || s < 0 || s > 60)
        throw DataError("timestamp out of range: " + text);

    int offset_minutes = 0;
    const char* rest = text.c_str() + n;
    if (*rest == 'Z') {
        offset_minutes = 0;
    } else if (*rest == '+' || *rest == '-') {
        int oh = 0, om = 0;
        if (std::sscanf(rest + 1, "%d:%d", &oh, &om) < 1)
            throw DataError("bad UTC offset in timestamp: " + text);
        offset_minutes = oh * 60 + om;
        if (*rest == '-') offset_minutes = -offset_minutes;
    } else if (*rest != '\0') {
        throw DataError("trailing characters in timestamp: " + text);
    }

    std::int64_t secs =
        days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
    return {secs, offset_minutes};
}

std::string format_iso8601(std::int64_t local_seconds, int utc_offset_minutes) {
    std::int64_t days = local_seconds / 86400;
    std::int64_t rem = local_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    int h = static_cast<int>(rem / 3600);
    int mi = static_cast<int>((rem % 3600) / 60);
    int s = static_cast<int>(rem % 60);

    char buf[48];
    int off = utc_offset_minutes;
    char sign = off < 0 ? '-' : '+';
    if (off < 0) off = -off;
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02d:%02d",
                  y, mo, d, h, mi, s, sign, off / 60, off % 60);
    return buf;
}

}  // namespace solarcast
