#pragma once

#include <string>
#include <vector>

namespace farmakit {

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    std::string label;
};

/// Static SVG line plot with axes, ticks and an optional legend.
void write_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel);

}  // namespace farmakit
