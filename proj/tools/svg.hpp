#pragma once

#include <string>
#include <utility>
#include <vector>

namespace loadcast::svg {

/// One polyline for line_plot; x is the 0-based index.
struct Series {
    std::string label;
    std::vector<double> values;
};

/// Self-contained SVG line chart. Output depends only on the arguments
/// (numbers are formatted with fixed precision), so identical inputs give
/// byte-identical files. Non-finite values break the polyline instead of
/// being drawn.
std::string line_plot(const std::string& title, const std::vector<Series>& series,
                      const std::string& x_label, const std::string& y_label);

/// Self-contained SVG bar chart over (label, value) pairs.
std::string bar_chart(const std::string& title,
                      const std::vector<std::pair<std::string, double>>& bars,
                      const std::string& y_label);

}  // namespace loadcast::svg
