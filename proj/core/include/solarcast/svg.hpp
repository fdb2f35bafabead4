#pragma once

#include <string>
#include <vector>

namespace solarcast {

/// One polyline on a chart.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 900;
    int height = 480;
};

/// Self-contained SVG line chart: axes, ticks, legend, one polyline per
/// series. Non-finite points break the line.
std::string line_chart_svg(const std::vector<Series>& series,
                           const ChartOptions& options);

void write_line_chart(const std::string& path, const std::vector<Series>& series,
                      const ChartOptions& options);

/// Gaussian kernel density estimate on an even grid, bandwidth by
/// Silverman's rule of thumb.
Series kernel_density(const std::vector<double>& values, const std::string& label,
                      int grid_size = 256);

}  // namespace solarcast
