#pragma once

#include <string>
#include <vector>

namespace primerace {

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<std::pair<double, double>> points;
};

// Minimal line-plot emitter for overlay figures (reconstruction vs sieve).
// Linear axes, auto-scaled to the data, with a simple legend.
void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::vector<SvgSeries>& series, bool log_x = false,
                        int width = 960, int height = 540);

}  // namespace primerace
