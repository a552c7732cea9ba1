#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>

#include "vema/mesh.hpp"

namespace vema {

struct PlotSeries {
    std::string name;
    std::string color;
    std::vector<std::array<double, 2>> points;  // (x, y)
};

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

// Minimal log-log (or linear) line plot with markers, axis ticks and a
// legend; a pure view of the numbers handed in.
inline void write_line_plot_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                                const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_x = true,
                                bool log_y = true) {
    const double W = 760, H = 540, L = 90, R = 190, T = 56, B = 70;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double v) { return log_x ? std::log10(std::max(v, 1e-300)) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
    for (const auto& s : series)
        for (const auto& p : s.points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
            xmin = std::min(xmin, tx(p[0]));
            xmax = std::max(xmax, tx(p[0]));
            ymin = std::min(ymin, ty(p[1]));
            ymax = std::max(ymax, ty(p[1]));
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double v) { return L + (tx(v) - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - ymin) / (ymax - ymin) * (H - T - B); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"#333\"/>\n";

    auto ticks = [&](double lo, double hi, bool log_scale) {
        std::vector<double> t;
        if (log_scale) {
            for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e)
                if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(e);
        } else {
            const double span = hi - lo;
            const double step = std::pow(10, std::floor(std::log10(span / 4)));
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
        }
        return t;
    };
    for (double t : ticks(xmin, xmax, log_x)) {
        const double x = L + (t - xmin) / (xmax - xmin) * (W - L - R);
        os << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 6
           << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << H - B + 22 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << (log_x ? "1e" + detail::svg_num(t) : detail::svg_num(t)) << "</text>\n";
    }
    for (double t : ticks(ymin, ymax, log_y)) {
        const double y = H - B - (t - ymin) / (ymax - ymin) * (H - T - B);
        os << "<line x1=\"" << L - 6 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
           << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << L - 10 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << (log_y ? "1e" + detail::svg_num(t) : detail::svg_num(t)) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << xlabel << "</text>\n";
    os << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
       << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";

    int idx = 0;
    for (const auto& s : series) {
        const std::string color = s.color.empty() ? detail::kPalette[idx % 10] : s.color;
        std::ostringstream path;
        bool first = true;
        for (const auto& p : s.points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
            path << (first ? "M" : "L") << detail::svg_num(px(p[0])) << ' ' << detail::svg_num(py(p[1])) << ' ';
            first = false;
        }
        os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
        for (const auto& p : s.points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
            os << "<circle cx=\"" << detail::svg_num(px(p[0])) << "\" cy=\"" << detail::svg_num(py(p[1]))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = T + 16 + 18 * idx;
        os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly << "\" font-size=\"12\">" << s.name << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
}

inline void write_line_plot_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                                const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_x = true,
                                bool log_y = true) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_line_plot_svg(f, title, xlabel, ylabel, series, log_x, log_y);
}

// Per-element heat map of an indicator (or any scalar) field.
inline void write_heatmap_svg(std::ostream& os, const Mesh& m, const std::vector<double>& values,
                              const std::string& title) {
    if (values.size() != static_cast<std::size_t>(m.element_count())) throw Error("heatmap: value count mismatch");
    Vec2 lo, hi;
    detail::bounding_box(m.vertices, lo, hi);
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double S = 640.0 / span, pad = 20, legend = 120;
    const double W = (hi.x - lo.x) * S + 2 * pad + legend, H = (hi.y - lo.y) * S + 2 * pad + 36;
    double vmin = 1e300, vmax = -1e300;
    for (double v : values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax <= vmin) vmax = vmin + 1;
    auto color = [&](double v) {
        const double t = std::clamp((v - vmin) / (vmax - vmin), 0.0, 1.0);
        // blue -> cyan -> yellow -> red
        const double stops[4][3] = {{0.17, 0.2, 0.6}, {0.1, 0.7, 0.75}, {0.95, 0.9, 0.2}, {0.85, 0.15, 0.1}};
        const double x = t * 3;
        const int k = std::min(2, static_cast<int>(x));
        const double f = x - k;
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<int>(255 * (stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                      static_cast<int>(255 * (stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                      static_cast<int>(255 * (stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
        return std::string(buf);
    };
    auto px = [&](double x) { return pad + (x - lo.x) * S; };
    auto py = [&](double y) { return H - pad - 36 - (y - lo.y) * S + 36; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    for (long e = 0; e < m.element_count(); ++e) {
        os << "<polygon points=\"";
        for (int v : m.elements[static_cast<std::size_t>(e)])
            os << detail::svg_num(px(m.vertices[static_cast<std::size_t>(v)].x)) << ','
               << detail::svg_num(py(m.vertices[static_cast<std::size_t>(v)].y)) << ' ';
        os << "\" fill=\"" << color(values[static_cast<std::size_t>(e)]) << "\" stroke=\"#222\" stroke-width=\"0.4\"/>\n";
    }
    // legend ramp
    const double lx = W - legend + 14, ly0 = 60, lh = H - 120;
    for (int i = 0; i < 64; ++i) {
        const double t0 = static_cast<double>(i) / 64;
        os << "<rect x=\"" << lx << "\" y=\"" << ly0 + (1 - t0 - 1.0 / 64) * lh << "\" width=\"16\" height=\""
           << lh / 64 + 0.5 << "\" fill=\"" << color(vmin + t0 * (vmax - vmin)) << "\"/>\n";
    }
    os << "<text x=\"" << lx + 22 << "\" y=\"" << ly0 + lh + 4 << "\" font-size=\"11\">" << detail::svg_num(vmin)
       << "</text>\n";
    os << "<text x=\"" << lx + 22 << "\" y=\"" << ly0 + 10 << "\" font-size=\"11\">" << detail::svg_num(vmax)
       << "</text>\n";
    os << "</svg>\n";
}

inline void write_heatmap_svg(const std::string& path, const Mesh& m, const std::vector<double>& values,
                              const std::string& title) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_heatmap_svg(f, m, values, title);
}

}  // namespace vema
