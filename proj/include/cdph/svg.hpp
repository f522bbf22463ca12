#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cdph/core.hpp"
#include "cdph/persistence.hpp"

namespace cdph {

/**
 * Self-contained birth/death scatter plot of a persistence diagram: fixed
 * 600x600 viewport, diagonal, one marker per distinct (birth, death) with a
 * multiplicity label, infinite deaths drawn as triangles along the top
 * margin.
 */
inline std::string diagram_to_svg(const PersistenceDiagram& d) {
    constexpr double view = 600.0, margin = 70.0, inf_band = 34.0;
    const double plot = view - 2.0 * margin;

    double lo = 0.0, hi = 1.0;
    bool any = false;
    for (const auto& deg : d.degrees)
        for (const PersistenceInterval& iv : deg) {
            if (!any) {
                lo = iv.birth;
                hi = iv.birth;
                any = true;
            }
            lo = std::min(lo, iv.birth);
            hi = std::max(hi, iv.birth);
            if (!iv.infinite()) {
                lo = std::min(lo, iv.death);
                hi = std::max(hi, iv.death);
            }
        }
    if (!any) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto sx = [&](double v) { return margin + (v - lo) / (hi - lo) * plot; };
    auto sy = [&](double v) { return view - margin - (v - lo) / (hi - lo) * plot; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
    svg << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << margin << "\" y1=\"" << view - margin << "\" x2=\"" << view - margin << "\" y2=\"" << view - margin
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << view - margin << "\" x2=\"" << margin << "\" y2=\"" << margin << "\" stroke=\"black\"/>\n";
    // diagonal
    svg << "<line x1=\"" << sx(lo) << "\" y1=\"" << sy(lo) << "\" x2=\"" << sx(hi) << "\" y2=\"" << sy(hi)
        << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    // infinity band
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin + inf_band << "\" x2=\"" << view - margin << "\" y2=\"" << margin + inf_band
        << "\" stroke=\"#cccccc\" stroke-dasharray=\"2 3\"/>\n";
    svg << "<text x=\"" << margin - 8 << "\" y=\"" << margin + inf_band + 4 << "\" text-anchor=\"end\" font-size=\"13\">inf</text>\n";
    // axis labels
    svg << "<text x=\"" << view / 2 << "\" y=\"" << view - margin + 40 << "\" text-anchor=\"middle\" font-size=\"14\">birth</text>\n";
    svg << "<text x=\"" << margin - 45 << "\" y=\"" << view / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << margin - 45
        << " " << view / 2 << ")\">death</text>\n";
    for (double v : {lo + pad, hi - pad}) {
        svg << "<text x=\"" << sx(v) << "\" y=\"" << view - margin + 20 << "\" text-anchor=\"middle\" font-size=\"11\">" << v << "</text>\n";
        svg << "<text x=\"" << margin - 8 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << v << "</text>\n";
    }

    for (std::size_t p = 0; p < d.degrees.size(); ++p) {
        const char* color = palette[p % 6];
        // collapse overlapping dots into one marker with a multiplicity label
        std::map<std::pair<double, double>, std::size_t> mult;
        for (const PersistenceInterval& iv : d.degrees[p]) ++mult[{iv.birth, iv.death}];
        for (const auto& [bd, count] : mult) {
            const auto [birth, death] = bd;
            const double x = sx(birth);
            if (std::isinf(death)) {
                const double y = margin + inf_band / 2.0;
                svg << "<path d=\"M " << x << " " << y - 6 << " L " << x - 6 << " " << y + 5 << " L " << x + 6 << " " << y + 5
                    << " Z\" fill=\"" << color << "\"/>\n";
                if (count > 1)
                    svg << "<text x=\"" << x + 8 << "\" y=\"" << y - 4 << "\" font-size=\"12\" fill=\"" << color << "\">" << count << "</text>\n";
            } else {
                const double y = sy(death);
                svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color << "\" fill-opacity=\"0.85\"/>\n";
                if (count > 1)
                    svg << "<text x=\"" << x + 6 << "\" y=\"" << y - 6 << "\" font-size=\"12\" fill=\"" << color << "\">" << count << "</text>\n";
            }
        }
        // legend
        svg << "<circle cx=\"" << view - margin - 90 << "\" cy=\"" << margin + 18.0 * static_cast<double>(p) << "\" r=\"4\" fill=\"" << color
            << "\"/>\n";
        svg << "<text x=\"" << view - margin - 80 << "\" y=\"" << margin + 18.0 * static_cast<double>(p) + 4 << "\" font-size=\"13\">H" << p
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void save_diagram_svg(const PersistenceDiagram& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << diagram_to_svg(d);
}

}  // namespace cdph
