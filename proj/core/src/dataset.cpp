#include "solarcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "solarcast/errors.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

namespace {

// RFC 4180 record reader: handles quoted fields and embedded commas/newlines.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        records.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            row_has_content = true;
        } else if (c == ',') {
            end_field();
            row_has_content = true;
        } else if (c == '\r') {
            // swallow; \n terminates the record
        } else if (c == '\n') {
            if (row_has_content || !field.empty() || !row.empty()) end_row();
        } else {
            field += c;
            row_has_content = true;
        }
    }
    if (row_has_content || !field.empty() || !row.empty()) end_row();
    return records;
}

double parse_value(const std::string& s, std::size_t line) {
    if (s.empty() || s == "NA" || s == "NaN" || s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw DataError("unparseable numeric value '" + s + "' at line " +
                        std::to_string(line));
    return v;
}

std::string format_value(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Trim to the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

constexpr std::int64_t kHour = 3600;

}  // namespace

CsvSchema CsvSchema::canonical() {
    CsvSchema s;
    s.columns["timestamp"] = "timestamp";
    s.columns["GHI"] = "GHI";
    for (const char* name : kCovariateNames) s.columns[name] = name;
    return s;
}

TimeSeriesFrame load_csv_text(const std::string& text, const CsvSchema& schema,
                              const std::string& provenance) {
    auto records = parse_csv_records(text);
    if (records.empty()) throw DataError("CSV has no header row");

    const auto& header = records.front();
    auto find_col = [&](const std::string& canonical) {
        auto it = schema.columns.find(canonical);
        if (it == schema.columns.end())
            throw ConfigError("schema missing required column: " + canonical);
        auto pos = std::find(header.begin(), header.end(), it->second);
        if (pos == header.end())
            throw DataError("CSV missing column '" + it->second + "' (" +
                            canonical + ")");
        return static_cast<std::size_t>(pos - header.begin());
    };

    std::size_t ts_col = find_col("timestamp");
    std::size_t ghi_col = find_col("GHI");
    std::array<std::size_t, kNumCovariates> cov_cols;
    for (int c = 0; c < kNumCovariates; ++c)
        cov_cols[c] = find_col(kCovariateNames[c]);

    TimeSeriesFrame frame;
    frame.provenance = provenance;
    bool offset_set = false;

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        std::size_t line = r + 1;
        if (rec.size() < header.size())
            throw DataError("short record at line " + std::to_string(line));
        auto [secs, offset] = parse_iso8601(rec[ts_col]);
        if (!offset_set) {
            frame.utc_offset_minutes = offset;
            offset_set = true;
        }
        frame.timestamps.push_back(secs);
        frame.ghi.push_back(parse_value(rec[ghi_col], line));
        for (int c = 0; c < kNumCovariates; ++c)
            frame.covariates[c].push_back(parse_value(rec[cov_cols[c]], line));
    }
    return frame;
}

TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), schema, path);
}

void write_csv(const TimeSeriesFrame& frame, std::ostream& out) {
    out << "timestamp,GHI";
    for (const char* name : kCovariateNames) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        out << format_iso8601(frame.timestamps[i], frame.utc_offset_minutes)
            << ',' << format_value(frame.ghi[i]);
        for (int c = 0; c < kNumCovariates; ++c)
            out << ',' << format_value(frame.covariates[c][i]);
        out << '\n';
    }
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    write_csv(frame, out);
}

namespace {

bool row_is_complete(const TimeSeriesFrame& f, std::size_t i) {
    if (std::isnan(f.ghi[i])) return false;
    for (int c = 0; c < kNumCovariates; ++c)
        if (std::isnan(f.covariates[c][i])) return false;
    return true;
}

// Linear interpolation of NaN runs no longer than max_len; returns false if
// some run is too long or touches the series boundary.
bool interpolate_column(std::vector<double>& col, int max_len,
                        std::vector<bool>& bad_rows, std::size_t* filled) {
    const std::size_t n = col.size();
    std::size_t i = 0;
    while (i < n) {
        if (!std::isnan(col[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && std::isnan(col[j])) ++j;
        std::size_t run = j - i;
        bool interior = i > 0 && j < n;
        if (interior && run <= static_cast<std::size_t>(max_len)) {
            double lo = col[i - 1], hi = col[j];
            for (std::size_t k = i; k < j; ++k) {
                double t = static_cast<double>(k - i + 1) /
                           static_cast<double>(run + 1);
                col[k] = lo + t * (hi - lo);
                ++*filled;
            }
        } else {
            for (std::size_t k = i; k < j; ++k) bad_rows[k] = true;
        }
        i = j;
    }
    return true;
}

TimeSeriesFrame drop_rows(const TimeSeriesFrame& f,
                          const std::vector<bool>& bad) {
    TimeSeriesFrame out;
    out.utc_offset_minutes = f.utc_offset_minutes;
    out.provenance = f.provenance;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        if (bad[i]) continue;
        out.timestamps.push_back(f.timestamps[i]);
        out.ghi.push_back(f.ghi[i]);
        for (int c = 0; c < kNumCovariates; ++c)
            out.covariates[c].push_back(f.covariates[c][i]);
    }
    return out;
}

}  // namespace

TimeSeriesFrame clean(const TimeSeriesFrame& frame, const GapPolicy& policy,
                      CleanReport* report) {
    if (frame.empty()) throw DataError("clean: empty frame");
    CleanReport local;
    CleanReport& rep = report ? *report : local;

    // Expand onto the hourly grid so that missing rows become NaN rows.
    TimeSeriesFrame grid;
    grid.utc_offset_minutes = frame.utc_offset_minutes;
    grid.provenance = frame.provenance;
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        std::int64_t t = frame.timestamps[i];
        if (i > 0) {
            if (t <= prev)
                throw DataError("timestamps not strictly increasing at row " +
                                std::to_string(i));
            if ((t - prev) % kHour != 0)
                throw DataError("timestamp off the hourly grid at row " +
                                std::to_string(i));
            for (std::int64_t g = prev + kHour; g < t; g += kHour) {
                grid.timestamps.push_back(g);
                grid.ghi.push_back(std::numeric_limits<double>::quiet_NaN());
                for (int c = 0; c < kNumCovariates; ++c)
                    grid.covariates[c].push_back(
                        std::numeric_limits<double>::quiet_NaN());
            }
        }
        grid.timestamps.push_back(t);
        grid.ghi.push_back(frame.ghi[i]);
        for (int c = 0; c < kNumCovariates; ++c)
            grid.covariates[c].push_back(frame.covariates[c][i]);
        prev = t;
    }

    std::vector<bool> bad(grid.rows(), false);
    interpolate_column(grid.ghi, policy.max_interp_hours, bad,
                       &rep.values_interpolated);
    for (int c = 0; c < kNumCovariates; ++c)
        interpolate_column(grid.covariates[c], policy.max_interp_hours, bad,
                           &rep.values_interpolated);

    for (std::size_t i = 0; i < grid.rows(); ++i)
        if (!bad[i] && !row_is_complete(grid, i)) bad[i] = true;

    rep.rows_dropped =
        static_cast<std::size_t>(std::count(bad.begin(), bad.end(), true));
    if (2 * rep.rows_dropped > grid.rows())
        throw DataError("clean: more than half of the rows (" +
                        std::to_string(rep.rows_dropped) + "/" +
                        std::to_string(grid.rows()) + ") would be dropped");

    TimeSeriesFrame out = drop_rows(grid, bad);
    for (auto& g : out.ghi) {
        if (g < 0.0) {
            g = 0.0;
            ++rep.ghi_clamped;
        }
    }
    validate_clean(out);
    return out;
}

void validate_clean(const TimeSeriesFrame& frame) {
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        if (i > 0) {
            std::int64_t dt = frame.timestamps[i] - frame.timestamps[i - 1];
            if (dt <= 0 || dt % kHour != 0)
                throw DataError("validate: non-hourly timestamp spacing at row " +
                                std::to_string(i));
        }
        if (!row_is_complete(frame, i))
            throw DataError("validate: missing value at row " +
                            std::to_string(i));
        if (frame.ghi[i] < 0)
            throw DataError("validate: negative GHI at row " +
                            std::to_string(i));
        double rh = frame.covariates[1][i];
        if (rh < 0 || rh > 100)
            throw DataError("validate: RH out of [0,100] at row " +
                            std::to_string(i));
        double wd = frame.covariates[4][i];
        if (wd < 0 || wd >= 360)
            throw DataError("validate: WD out of [0,360) at row " +
                            std::to_string(i));
    }
}

DatasetSplit split(const TimeSeriesFrame& frame, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ArgumentError("split ratio must lie in (0,1)");
    std::size_t n = frame.rows();
    auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    DatasetSplit out;
    out.ratio = ratio;
    out.train = frame.slice(0, n_train);
    out.test = frame.slice(n_train, n);
    return out;
}

Eigen::MatrixXd covariate_matrix(const TimeSeriesFrame& frame,
                                 const std::vector<std::string>& features) {
    const auto n = static_cast<Eigen::Index>(frame.rows());
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& col = frame.covariate(features[j]);
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)];
    }
    return X;
}

DesignMatrix design_matrix(const TimeSeriesFrame& frame,
                           const std::vector<std::string>& features,
                           bool standardize) {
    DesignMatrix dm;
    dm.features = features;
    dm.X = covariate_matrix(frame, features);
    dm.y = Eigen::Map<const Eigen::VectorXd>(
        frame.ghi.data(), static_cast<Eigen::Index>(frame.rows()));
    const auto p = dm.X.cols();
    dm.means = Eigen::VectorXd::Zero(p);
    dm.scales = Eigen::VectorXd::Ones(p);
    dm.standardized = standardize;
    if (!standardize || dm.X.rows() < 2) return dm;

    const double n = static_cast<double>(dm.X.rows());
    for (Eigen::Index j = 0; j < p; ++j) {
        double mean = dm.X.col(j).mean();
        double sd = std::sqrt((dm.X.col(j).array() - mean).square().sum() /
                              (n - 1.0));
        if (sd <= 0.0) {
            // Constant column: pass through unscaled.
            continue;
        }
        dm.means(j) = mean;
        dm.scales(j) = sd;
        dm.X.col(j) = (dm.X.col(j).array() - mean) / sd;
    }
    return dm;
}

Eigen::MatrixXd DesignMatrix::transform(const Eigen::MatrixXd& raw) const {
    if (raw.cols() != means.size())
        throw ArgumentError("transform: column count mismatch");
    Eigen::MatrixXd out = raw;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        out.col(j) = (out.col(j).array() - means(j)) / scales(j);
    return out;
}

TimeSeriesFrame make_synthetic_frame(int days, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 7001);
    TimeSeriesFrame f;
    f.utc_offset_minutes = 120;
    f.provenance = "synthetic";
    const std::int64_t start = parse_iso8601("2021-01-01T00:00:00+02:00").first;
    for (int day = 0; day < days; ++day) {
        double cloudiness = 0.5 + 0.4 * std::sin(day * 0.7) +
                            0.1 * rand_normal(rng);
        cloudiness = std::clamp(cloudiness, 0.05, 0.95);
        for (int h = 0; h < 24; ++h) {
            std::int64_t t = start + (day * 24 + h) * kHour;
            double elev = std::sin((h - 6) * M_PI / 12.0);  // up 06:00-18:00
            double clear = elev > 0 ? 950.0 * elev : 0.0;
            double ghi = clear * (1.0 - 0.8 * cloudiness);
            if (ghi > 0) ghi += 12.0 * rand_normal(rng);
            ghi = std::max(ghi, 0.0);

            double temp = 18.0 + 9.0 * std::sin((h - 9) * M_PI / 12.0) +
                          0.5 * rand_normal(rng);
            double rh = std::clamp(65.0 - 25.0 * std::sin((h - 9) * M_PI / 12.0) +
                                       15.0 * cloudiness + rand_normal(rng),
                                   5.0, 100.0);
            double ws = std::max(0.0, 2.5 + 1.2 * rand_normal(rng));
            double bp = 870.0 + 2.0 * std::sin(h * M_PI / 12.0) +
                        0.3 * rand_normal(rng);
            double wd = std::fmod(180.0 + 90.0 * std::sin(day + h * 0.26) +
                                      10.0 * rand_normal(rng) + 720.0,
                                  360.0);
            double wd_stv = std::clamp(15.0 + 5.0 * rand_normal(rng), 0.0, 90.0);
            double rain = (cloudiness > 0.8 && rand_uniform(rng) < 0.2)
                              ? 2.0 * rand_uniform(rng)
                              : 0.0;
            double ws_max = ws + std::abs(1.5 * rand_normal(rng));

            f.timestamps.push_back(t);
            f.ghi.push_back(ghi);
            f.covariates[0].push_back(temp);
            f.covariates[1].push_back(rh);
            f.covariates[2].push_back(ws);
            f.covariates[3].push_back(bp);
            f.covariates[4].push_back(wd);
            f.covariates[5].push_back(wd_stv);
            f.covariates[6].push_back(rain);
            f.covariates[7].push_back(ws_max);
        }
    }
    return f;
}

}  // namespace solarcast
