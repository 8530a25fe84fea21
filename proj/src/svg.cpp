#include "bnptrack/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bnptrack/csv.hpp"

namespace bnpt {

const std::string& palette(std::size_t i) {
    static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % colors.size()];
}

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

// Round step for about five ticks.
double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int width, int panel_height) {
    std::ostringstream os;
    const int height = panel_height * static_cast<int>(panels.size());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double left = 70, right = 160, top = 30, bottom = 45;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const PlotPanel& panel = panels[p];
        const double y0 = p * panel_height;
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
        for (const auto& s : panel.series) {
            for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
            for (double v : s.y)
                if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
        }
        if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
        if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
        const double pw = width - left - right, ph = panel_height - top - bottom;
        auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
        auto sy = [&](double v) { return y0 + top + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };
        os << "<text x=\"" << left << "\" y=\"" << y0 + 18 << "\" font-size=\"14\">" << esc(panel.title) << "</text>\n";
        os << "<rect x=\"" << left << "\" y=\"" << y0 + top << "\" width=\"" << pw << "\" height=\"" << ph
           << "\" fill=\"none\" stroke=\"#333\"/>\n";
        const double xs = nice_step(xmax - xmin), ys = nice_step(ymax - ymin);
        for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs)
            os << "<line x1=\"" << sx(t) << "\" y1=\"" << y0 + top + ph << "\" x2=\"" << sx(t) << "\" y2=\""
               << y0 + top + ph + 5 << "\" stroke=\"#333\"/><text x=\"" << sx(t) << "\" y=\"" << y0 + top + ph + 18
               << "\" text-anchor=\"middle\">" << format_number(std::round(t / xs) * xs) << "</text>\n";
        for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys)
            os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(t)
               << "\" stroke=\"#ddd\"/><text x=\"" << left - 8 << "\" y=\"" << sy(t) + 4
               << "\" text-anchor=\"end\">" << format_number(std::round(t / ys) * ys) << "</text>\n";
        os << "<text x=\"" << left + pw / 2 << "\" y=\"" << y0 + panel_height - 8 << "\" text-anchor=\"middle\">"
           << esc(panel.xlabel) << "</text>\n";
        os << "<text transform=\"translate(16," << y0 + top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
           << esc(panel.ylabel) << "</text>\n";
        for (std::size_t i = 0; i < panel.series.size(); ++i) {
            const PlotSeries& s = panel.series[i];
            const std::size_t n = std::min(s.x.size(), s.y.size());
            if (s.markers) {
                for (std::size_t k = 0; k < n; ++k)
                    if (std::isfinite(s.y[k]))
                        os << "<circle cx=\"" << sx(s.x[k]) << "\" cy=\"" << sy(s.y[k]) << "\" r=\"2\" fill=\""
                           << s.color << "\"/>\n";
            } else {
                os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
                   << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
                for (std::size_t k = 0; k < n; ++k)
                    if (std::isfinite(s.y[k])) os << sx(s.x[k]) << "," << sy(s.y[k]) << " ";
                os << "\"/>\n";
            }
            if (!s.name.empty()) {
                const double ly = y0 + top + 14 + 16 * static_cast<double>(i);
                os << "<rect x=\"" << left + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
                   << s.color << "\"/><text x=\"" << left + pw + 28 << "\" y=\"" << ly << "\">" << esc(s.name)
                   << "</text>\n";
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const std::vector<PlotPanel>& panels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << render_svg(panels);
}

}  // namespace bnpt
