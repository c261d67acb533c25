#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace loadcast::svg {

namespace {

constexpr double k_width = 640.0;
constexpr double k_height = 400.0;
constexpr double k_left = 64.0;
constexpr double k_right = 16.0;
constexpr double k_top = 40.0;
constexpr double k_bottom = 48.0;

const char* k_palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    /// Pads degenerate ranges so the scale below never divides by zero.
    void finish() {
        if (lo > hi) {  // nothing finite at all
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::string header(const std::string& title) {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    out += "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" +
           escape(title) + "</text>\n";
    return out;
}

std::string axes(const Range& xr, const Range& yr, const std::string& x_label,
                 const std::string& y_label) {
    std::string out;
    const double x0 = k_left, x1 = k_width - k_right;
    const double y0 = k_height - k_bottom, y1 = k_top;
    out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) + "\" y2=\"" +
           fmt(y0) + "\" stroke=\"#333333\"/>\n";
    out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x0) + "\" y2=\"" +
           fmt(y1) + "\" stroke=\"#333333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
        const double px = x0 + (x1 - x0) * t / 4.0;
        out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(y0 + 16.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_tick(fx) + "</text>\n";
        const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        const double py = y0 + (y1 - y0) * t / 4.0;
        out += "<text x=\"" + fmt(x0 - 6.0) + "\" y=\"" + fmt(py + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_tick(fy) + "</text>\n";
    }
    out += "<text x=\"" + fmt((x0 + x1) / 2.0) + "\" y=\"" + fmt(k_height - 10.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(x_label) + "</text>\n";
    out += "<text x=\"14\" y=\"" + fmt((y0 + y1) / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 14 " +
           fmt((y0 + y1) / 2.0) + ")\">" + escape(y_label) + "</text>\n";
    return out;
}

}  // namespace

std::string line_plot(const std::string& title, const std::vector<Series>& series,
                      const std::string& x_label, const std::string& y_label) {
    Range xr, yr;
    for (const auto& s : series) {
        if (!s.values.empty()) {
            xr.include(0.0);
            xr.include(static_cast<double>(s.values.size() - 1));
        }
        for (double v : s.values) yr.include(v);
    }
    xr.finish();
    yr.finish();

    const double x0 = k_left, x1 = k_width - k_right;
    const double y0 = k_height - k_bottom, y1 = k_top;
    auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto py = [&](double v) { return y0 + (v - yr.lo) / (yr.hi - yr.lo) * (y1 - y0); };

    std::string out = header(title);
    out += axes(xr, yr, x_label, y_label);

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = k_palette[s % 6];
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                       "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
                points.clear();
            }
        };
        for (std::size_t i = 0; i < series[s].values.size(); ++i) {
            const double v = series[s].values[i];
            if (!std::isfinite(v)) {
                flush();
                continue;
            }
            if (!points.empty()) points += " ";
            points += fmt(px(static_cast<double>(i))) + "," + fmt(py(v));
        }
        flush();
        const double ly = k_top + 14.0 * static_cast<double>(s);
        out += "<line x1=\"" + fmt(x1 - 110.0) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(x1 - 90.0) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(x1 - 84.0) + "\" y=\"" + fmt(ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[s].label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string bar_chart(const std::string& title,
                      const std::vector<std::pair<std::string, double>>& bars,
                      const std::string& y_label) {
    Range yr;
    yr.include(0.0);
    for (const auto& [label, v] : bars) yr.include(v);
    yr.finish();

    const double x0 = k_left, x1 = k_width - k_right;
    const double y0 = k_height - k_bottom, y1 = k_top;
    auto py = [&](double v) { return y0 + (v - yr.lo) / (yr.hi - yr.lo) * (y1 - y0); };

    std::string out = header(title);
    Range xr;
    xr.lo = 0.0;
    xr.hi = static_cast<double>(bars.empty() ? 1 : bars.size());
    out += axes(xr, yr, "", y_label);

    const double slot = (x1 - x0) / static_cast<double>(bars.empty() ? 1 : bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double v = bars[i].second;
        const double bx = x0 + slot * static_cast<double>(i) + slot * 0.15;
        const double bw = slot * 0.7;
        const double top = std::isfinite(v) ? py(v) : py(0.0);
        out += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(std::min(top, py(0.0))) + "\" width=\"" +
               fmt(bw) + "\" height=\"" + fmt(std::fabs(py(0.0) - top)) + "\" fill=\"" +
               k_palette[i % 6] + "\"/>\n";
        out += "<text x=\"" + fmt(bx + bw / 2.0) + "\" y=\"" + fmt(y0 + 16.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               escape(bars[i].first) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace loadcast::svg
