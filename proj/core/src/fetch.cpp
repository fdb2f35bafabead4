#include "solarcast/fetch.hpp"

#include <httplib.h>

#include "solarcast/errors.hpp"

namespace solarcast {

namespace {

// Split "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ArgumentError("fetch_remote: URL missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

TimeSeriesFrame fetch_remote(const std::string& url, const DateWindow& window,
                             const CsvSchema& schema) {
    if (window.start.empty() || window.end.empty())
        throw ArgumentError("fetch_remote: empty date window");

    auto [base, path] = split_url(url);
    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);

    httplib::Params params{{"start", window.start}, {"end", window.end}};
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res)
        throw TransportError("fetch_remote: transport failure contacting " +
                             base + " (" + httplib::to_string(res.error()) +
                             ")");
    if (res->status < 200 || res->status >= 300)
        throw DataError("fetch_remote: HTTP status " +
                        std::to_string(res->status) + " from " + url);

    TimeSeriesFrame frame = load_csv_text(res->body, schema, url);

    auto start_t = parse_iso8601(window.start).first;
    auto end_t = parse_iso8601(window.end).first;
    std::size_t lo = 0, hi = frame.rows();
    while (lo < hi && frame.timestamps[lo] < start_t) ++lo;
    while (hi > lo && frame.timestamps[hi - 1] > end_t) --hi;
    return (lo == 0 && hi == frame.rows()) ? frame : frame.slice(lo, hi);
}

}  // namespace solarcast
