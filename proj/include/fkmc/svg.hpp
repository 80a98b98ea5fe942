// Minimal standalone SVG line plots rendered from table columns.

#pragma once

#include <string>
#include <vector>

namespace fkmc {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<std::string> annotations; // extra text lines (fit results etc.)
};

// Renders a self-contained SVG document. In log mode a non-positive datum is
// an error naming the series and index.
std::string emit_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

} // namespace fkmc
