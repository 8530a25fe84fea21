#pragma once

#include <string>
#include <vector>

namespace bnpt {

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool markers = false;  // draw points instead of a polyline
    bool dashed = false;
};

struct PlotPanel {
    std::string title, xlabel, ylabel;
    std::vector<PlotSeries> series;
};

// Panels stacked vertically in one SVG document.
std::string render_svg(const std::vector<PlotPanel>& panels, int width = 900, int panel_height = 320);
void write_svg(const std::string& path, const std::vector<PlotPanel>& panels);

const std::string& palette(std::size_t i);

}  // namespace bnpt
