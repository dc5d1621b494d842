#include "lining/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace lining {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

/// Blue -> pale yellow -> red, linear between fixed stops.
std::string color_for(double t) {
    static const int stops[5][3] = {
        {49, 54, 149}, {116, 173, 209}, {255, 255, 191}, {244, 109, 67}, {165, 0, 38}};
    t = std::clamp(t, 0.0, 1.0);
    const double scaled = t * 4.0;
    const int lo = std::min(3, static_cast<int>(scaled));
    const double frac = scaled - lo;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[lo][0] + frac * (stops[lo + 1][0] - stops[lo][0]))),
                  static_cast<int>(std::lround(stops[lo][1] + frac * (stops[lo + 1][1] - stops[lo][1]))),
                  static_cast<int>(std::lround(stops[lo][2] + frac * (stops[lo + 1][2] - stops[lo][2]))));
    return buf;
}

struct Point {
    double x, y;
};

/// Screen position at clockwise-from-crown angle phi and radius r.
Point polar(double cx, double cy, double r, double phi) {
    return {cx + r * std::sin(phi), cy - r * std::cos(phi)};
}

} // namespace

std::string heatmap_svg(const DeductionResult& result) {
    const int m = result.grid.layers, n = result.grid.parts;
    const Matrix& dense = result.dense;

    double vmin = dense(0, 0), vmax = dense(0, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            vmin = std::min(vmin, dense(i, j));
            vmax = std::max(vmax, dense(i, j));
        }
    const double span = vmax - vmin;
    auto value_t = [&](double v) { return span > 0.0 ? (v - vmin) / span : 0.5; };

    std::set<std::pair<int, int>> observed;
    for (const CellIndex& c : result.observed)
        observed.insert({c.layer, c.part});

    const double width = 640.0;
    const double cx = width / 2.0, cy = 340.0;
    const double outer_radius = 280.0;
    const double inner_radius = outer_radius * 0.55;
    const double band = (outer_radius - inner_radius) / m;

    const double rect_top = 700.0;
    const double rect_left = 40.0;
    const double rect_cell = std::min(11.0, (width - 2 * rect_left) / n);
    const double rect_height = rect_cell * m;

    const double legend_top = rect_top + rect_height + 40.0;
    const double height = legend_top + 60.0;

    std::string svg;
    svg.reserve(65536);
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
           fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + fmt(cx) + "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
           " font-size=\"16\">" + result.section_id + " " + result.date + "</text>\n";
    svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(cy - outer_radius - 10.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">crown</text>\n";

    // Annular cells. Layer 1 is innermost; part n spans
    // [2*pi*(n-1)/N, 2*pi*n/N) clockwise from the crown.
    for (int layer = 1; layer <= m; ++layer) {
        const double r_in = inner_radius + (layer - 1) * band;
        const double r_out = r_in + band;
        for (int part = 1; part <= n; ++part) {
            const double a0 = 2.0 * kPi * (part - 1) / n;
            const double a1 = 2.0 * kPi * part / n;
            const Point p0 = polar(cx, cy, r_out, a0);
            const Point p1 = polar(cx, cy, r_out, a1);
            const Point p2 = polar(cx, cy, r_in, a1);
            const Point p3 = polar(cx, cy, r_in, a0);
            const bool is_obs = observed.count({layer, part}) > 0;
            svg += "<path id=\"cell-" + std::to_string(layer) + "-" + std::to_string(part) +
                   "\" class=\"cell\" d=\"M " + fmt(p0.x) + " " + fmt(p0.y) + " A " + fmt(r_out) +
                   " " + fmt(r_out) + " 0 0 1 " + fmt(p1.x) + " " + fmt(p1.y) + " L " + fmt(p2.x) +
                   " " + fmt(p2.y) + " A " + fmt(r_in) + " " + fmt(r_in) + " 0 0 0 " + fmt(p3.x) +
                   " " + fmt(p3.y) + " Z\" fill=\"" + color_for(value_t(dense(layer - 1, part - 1))) +
                   "\" stroke=\"" + (is_obs ? "#000000" : "#888888") + "\" stroke-width=\"" +
                   (is_obs ? "2.0" : "0.4") + "\"/>\n";
        }
    }

    // Flattened matrix view: row 1 (inner layer) on top, parts left to right.
    svg += "<text x=\"" + fmt(rect_left) + "\" y=\"" + fmt(rect_top - 10.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\">flattened (layer rows, parts clockwise "
           "from crown)</text>\n";
    for (int layer = 1; layer <= m; ++layer) {
        for (int part = 1; part <= n; ++part) {
            const bool is_obs = observed.count({layer, part}) > 0;
            svg += "<rect id=\"mcell-" + std::to_string(layer) + "-" + std::to_string(part) +
                   "\" class=\"mcell\" x=\"" + fmt(rect_left + (part - 1) * rect_cell) + "\" y=\"" +
                   fmt(rect_top + (layer - 1) * rect_cell) + "\" width=\"" + fmt(rect_cell) +
                   "\" height=\"" + fmt(rect_cell) + "\" fill=\"" +
                   color_for(value_t(dense(layer - 1, part - 1))) + "\" stroke=\"" +
                   (is_obs ? "#000000" : "#bbbbbb") + "\" stroke-width=\"" +
                   (is_obs ? "1.5" : "0.3") + "\"/>\n";
        }
    }

    // Legend: 64 bands from vmin to vmax.
    const double legend_width = 320.0;
    const double legend_x = (width - legend_width) / 2.0;
    for (int i = 0; i < 64; ++i) {
        svg += "<rect x=\"" + fmt(legend_x + i * legend_width / 64.0) + "\" y=\"" +
               fmt(legend_top) + "\" width=\"" + fmt(legend_width / 64.0 + 0.5) +
               "\" height=\"14\" fill=\"" + color_for((i + 0.5) / 64.0) + "\"/>\n";
    }
    svg += "<text x=\"" + fmt(legend_x - 8.0) + "\" y=\"" + fmt(legend_top + 12.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(vmin) +
           " kN</text>\n";
    svg += "<text x=\"" + fmt(legend_x + legend_width + 8.0) + "\" y=\"" + fmt(legend_top + 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(vmax) + " kN</text>\n";
    svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(legend_top + 40.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">max " +
           fmt(result.max_value) + " kN at (" + std::to_string(result.max_cell.layer) + "," +
           std::to_string(result.max_cell.part) + ")</text>\n";
    svg += "</svg>\n";
    return svg;
}

void render_heatmap(const DeductionResult& result, const std::filesystem::path& path) {
    const std::string svg = heatmap_svg(result);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write heatmap '" + path.string() + "'");
    out << svg;
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

} // namespace lining
