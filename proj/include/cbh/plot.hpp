#pragma once

// Minimal SVG charts for the figure recipes. Data tables are the contract;
// these are for eyeballing.

#include <limits>
#include <string>
#include <vector>

namespace cbh {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<PlotSeries> series;
    /// Horizontal reference line (e.g. g2 = 1); NaN for none.
    double reference_y = std::numeric_limits<double>::quiet_NaN();
};

std::string svg_line_chart(const PlotSpec& spec);

/// Grouped bars: one group per category, one bar per series.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<PlotSeries>& series);

}  // namespace cbh
