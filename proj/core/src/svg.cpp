#include "solarcast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "solarcast/errors.hpp"

namespace solarcast {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// "Nice" tick spacing covering [lo, hi] with about `target` intervals.
std::vector<double> ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) {
        hi = lo + 1;
        lo -= 1;
    }
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
    std::vector<double> out;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-9 * step; t += step) out.push_back(t);
    return out;
}

}  // namespace

std::string line_chart_svg(const std::vector<Series>& series,
                           const ChartOptions& options) {
    const double W = options.width, H = options.height;
    const double ml = 64, mr = 24, mt = 40, mb = 48;  // margins
    const double pw = W - ml - mr, ph = H - mt - mb;  // plot area

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (!std::isfinite(xlo)) {
        xlo = 0;
        xhi = 1;
        ylo = 0;
        yhi = 1;
    }
    if (xhi == xlo) xhi = xlo + 1;
    if (yhi == ylo) yhi = ylo + 1;
    double ypad = 0.04 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    auto sx = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
    auto sy = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
        << options.width << ' ' << options.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<style>text{font-family:sans-serif;font-size:12px;}"
           ".title{font-size:15px;font-weight:bold;}</style>\n";

    // Grid and ticks.
    for (double t : ticks(xlo, xhi)) {
        double px = sx(t);
        svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt) << "\" x2=\""
            << fmt(px) << "\" y2=\"" << fmt(mt + ph)
            << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(ylo, yhi)) {
        double py = sy(t);
        svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(ml + pw) << "\" y2=\"" << fmt(py)
            << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\""
        << fmt(pw) << "\" height=\"" << fmt(ph)
        << "\" fill=\"none\" stroke=\"#404040\"/>\n";

    // Series polylines (split at non-finite points).
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % kPaletteSize];
        std::ostringstream pts;
        bool open = false;
        auto flush = [&]() {
            if (open)
                svg << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << pts.str()
                    << "\"/>\n";
            pts.str("");
            open = false;
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            pts << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
            open = true;
        }
        flush();
    }

    // Legend.
    double lx = ml + 10, ly = mt + 14;
    for (std::size_t si = 0; si < series.size(); ++si) {
        svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4)
            << "\" x2=\"" << fmt(lx + 18) << "\" y2=\"" << fmt(ly - 4)
            << "\" stroke=\"" << kPalette[si % kPaletteSize]
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fmt(lx + 24) << "\" y=\"" << fmt(ly) << "\">"
            << escape_xml(series[si].label) << "</text>\n";
        ly += 16;
    }

    // Labels.
    if (!options.title.empty())
        svg << "<text class=\"title\" x=\"" << fmt(W / 2)
            << "\" y=\"22\" text-anchor=\"middle\">" << escape_xml(options.title)
            << "</text>\n";
    if (!options.x_label.empty())
        svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 10)
            << "\" text-anchor=\"middle\">" << escape_xml(options.x_label)
            << "</text>\n";
    if (!options.y_label.empty())
        svg << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
            << fmt(mt + ph / 2) << ")\">" << escape_xml(options.y_label)
            << "</text>\n";

    svg << "</svg>\n";
    return svg.str();
}

void write_line_chart(const std::string& path, const std::vector<Series>& series,
                      const ChartOptions& options) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << line_chart_svg(series, options);
}

Series kernel_density(const std::vector<double>& values, const std::string& label,
                      int grid_size) {
    if (values.size() < 2)
        throw ArgumentError("kernel_density: need at least 2 values");
    if (grid_size < 2) throw ArgumentError("kernel_density: grid too small");

    double n = static_cast<double>(values.size());
    double mean = 0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (n - 1);
    double sd = std::sqrt(var);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
    double spread = std::min(sd, (q3 - q1) / 1.349);
    if (spread <= 0) spread = sd > 0 ? sd : 1.0;
    double h = 0.9 * spread * std::pow(n, -0.2);  // Silverman's rule

    double lo = sorted.front() - 3 * h, hi = sorted.back() + 3 * h;
    Series out;
    out.label = label;
    out.x.resize(static_cast<std::size_t>(grid_size));
    out.y.resize(static_cast<std::size_t>(grid_size));
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * M_PI));
    for (int g = 0; g < grid_size; ++g) {
        double x = lo + (hi - lo) * g / (grid_size - 1);
        double dens = 0;
        for (double v : values) {
            double u = (x - v) / h;
            dens += std::exp(-0.5 * u * u);
        }
        out.x[static_cast<std::size_t>(g)] = x;
        out.y[static_cast<std::size_t>(g)] = dens * norm;
    }
    return out;
}

}  // namespace solarcast
