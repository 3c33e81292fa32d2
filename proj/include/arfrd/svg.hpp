#pragma once

#include <limits>
#include <string>
#include <vector>

namespace arfrd {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points = false; //!< scatter markers instead of a polyline
    std::string color = "#1f77b4";
    //! Break the polyline wherever consecutive x straddle this value (e.g. a cutoff).
    bool split_at_zero = false;
};

//! Minimal static line/scatter plot with axes, ticks and a legend.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series,
                    double vline = std::numeric_limits<double>::quiet_NaN());

} // namespace arfrd
