#include "farmakit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace farmakit {

namespace {

constexpr double kWidth = 820;
constexpr double kHeight = 500;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

void write_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const SvgSeries& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin) || !std::isfinite(ymin))
        throw std::invalid_argument("svg: nothing to plot");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight); };
    auto sy = [&](double y) {
        return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";

    // Axes with five ticks per side.
    out << "<line x1='" << kLeft << "' y1='" << kHeight - kBottom << "' x2='" << kWidth - kRight
        << "' y2='" << kHeight - kBottom << "' stroke='black'/>\n";
    out << "<line x1='" << kLeft << "' y1='" << kTop << "' x2='" << kLeft << "' y2='"
        << kHeight - kBottom << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = xmin + (xmax - xmin) * i / 4.0;
        double yv = ymin + (ymax - ymin) * i / 4.0;
        out << "<line x1='" << sx(xv) << "' y1='" << kHeight - kBottom << "' x2='" << sx(xv)
            << "' y2='" << kHeight - kBottom + 5 << "' stroke='black'/>\n";
        out << "<text x='" << sx(xv) << "' y='" << kHeight - kBottom + 20
            << "' text-anchor='middle' font-size='11'>" << num(xv) << "</text>\n";
        out << "<line x1='" << kLeft - 5 << "' y1='" << sy(yv) << "' x2='" << kLeft << "' y2='"
            << sy(yv) << "' stroke='black'/>\n";
        out << "<text x='" << kLeft - 8 << "' y='" << sy(yv) + 4
            << "' text-anchor='end' font-size='11'>" << num(yv) << "</text>\n";
    }
    out << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='" << kHeight - 14
        << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
    out << "<text x='18' y='" << (kTop + kHeight - kBottom) / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
        << (kTop + kHeight - kBottom) / 2 << ")'>" << ylabel << "</text>\n";

    double legend_y = kTop + 6;
    for (const SvgSeries& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        }
        out << "'/>\n";
        if (!s.label.empty()) {
            out << "<line x1='" << kWidth - kRight - 150 << "' y1='" << legend_y << "' x2='"
                << kWidth - kRight - 130 << "' y2='" << legend_y << "' stroke='" << s.color
                << "' stroke-width='2'/>\n";
            out << "<text x='" << kWidth - kRight - 124 << "' y='" << legend_y + 4
                << "' font-size='11'>" << s.label << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
}

}  // namespace farmakit
