#include "primerace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "primerace/errors.hpp"

namespace primerace {

void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::vector<SvgSeries>& series, bool log_x,
                        int width, int height) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            const double xv = log_x ? std::log10(x) : x;
            x0 = std::min(x0, xv); x1 = std::max(x1, xv);
            y0 = std::min(y0, y); y1 = std::max(y1, y);
        }
    }
    if (!(x0 < x1)) { x0 -= 1; x1 += 1; }
    if (!(y0 < y1)) { y0 -= 1; y1 += 1; }
    const double mx = 60, my = 40;  // margins
    const double pw = width - 2 * mx, ph = height - 2 * my;
    auto px = [&](double x) {
        const double xv = log_x ? std::log10(x) : x;
        return mx + (xv - x0) / (x1 - x0) * pw;
    };
    auto py = [&](double y) { return my + (y1 - y) / (y1 - y0) * ph; };

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  mx, my + ph, mx + pw, my + ph);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  mx, my, mx, my + ph);
    out << buf;
    // zero line when visible
    if (y0 < 0 && y1 > 0) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n",
                      mx, py(0.0), mx + pw, py(0.0));
        out << buf;
    }
    // axis labels
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"11\">%s%.4g</text>\n",
                  mx, height - 8, log_x ? "1e" : "", x0);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%s%.4g</text>\n",
                  mx + pw, height - 8, log_x ? "1e" : "", x1);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"4\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\">%.4g</text>\n",
                  my + 4, y1);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"4\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\">%.4g</text>\n",
                  my + ph, y0);
    out << buf;

    int legend_y = static_cast<int>(my) + 14;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.2\" points=\"";
        for (auto [x, y] : s.points) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
            out << buf;
        }
        out << "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                      "font-size=\"11\" fill=\"%s\">%s</text>\n",
                      width - 220, legend_y, s.color.c_str(), s.label.c_str());
        out << buf;
        legend_y += 15;
    }
    out << "</svg>\n";
}

}  // namespace primerace
