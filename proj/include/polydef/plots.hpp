#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bz.hpp"
#include "spectra.hpp"

namespace polydef {

// Copy cumulative path distances onto eigenvalue k-points so band plots get a
// proper x axis. External eigenvalue files carry no s column; pairing is by
// index and the fractional coordinates must agree.
inline void attach_path_distances(EigenvalueSet& set, const KPath& path) {
    if (set.n_k() != path.points.size())
        fail_domain("eigenvalue set has " + std::to_string(set.n_k()) +
                    " k-points but the path has " + std::to_string(path.points.size()));
    for (std::size_t k = 0; k < set.n_k(); ++k) {
        const Vec3& a = set.kpoints[k].frac;
        const Vec3& b = path.points[k].frac;
        double miss = std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)});
        if (miss > 1e-8)
            fail_domain("k-point " + std::to_string(k) +
                        " of the eigenvalue set does not lie on the path");
        set.kpoints[k].s = path.points[k].s;
    }
}

// Vertex ticks for a band plot: (label, s) in path order.
inline std::vector<std::pair<std::string, double>> path_ticks(const KPath& path) {
    std::vector<std::pair<std::string, double>> ticks;
    for (const auto& p : path.points)
        if (!p.label.empty()) ticks.push_back({p.label, p.s});
    return ticks;
}

// --- CSV ------------------------------------------------------------------

inline std::string band_csv_text(const EigenvalueSet& set) {
    validate_eigenvalue_set(set, "band csv");
    std::string out = "s";
    for (std::size_t n = 0; n < set.n_bands(); ++n) out += ",band_" + std::to_string(n + 1);
    out += "\n";
    for (std::size_t k = 0; k < set.n_k(); ++k) {
        out += fmt_g12(set.kpoints[k].s);
        for (double e : set.bands[k]) out += "," + fmt_g12(e);
        out += "\n";
    }
    return out;
}

inline void write_band_csv(const EigenvalueSet& set, const std::string& path) {
    detail::write_text_file(path, band_csv_text(set));
}

inline std::string dos_csv_text(const DosCurve& dos) {
    if (dos.grid.empty()) fail_domain("empty density-of-states curve");
    if (dos.grid.size() != dos.values.size())
        fail_domain("density-of-states grid and values differ in length");
    std::string out = "energy_eV,dos_per_eV\n";
    for (std::size_t i = 0; i < dos.grid.size(); ++i)
        out += fmt_g12(dos.grid[i]) + "," + fmt_g12(dos.values[i]) + "\n";
    return out;
}

inline void write_dos_csv(const DosCurve& dos, const std::string& path) {
    detail::write_text_file(path, dos_csv_text(dos));
}

// --- SVG --------------------------------------------------------------------
//
// Self-contained figures from polyline primitives; no plotting package in the
// loop, so output bytes depend only on the data.

namespace detail {

struct PlotFrame {
    double width = 960, height = 600;
    double left = 64, right = 18, top = 18, bottom = 48;

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1; // data ranges

    double px(double x) const {
        return left + (x - x0) / (x1 - x0) * (width - left - right);
    }
    double py(double y) const {
        return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
    }
};

inline std::string fmt_px(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Round tick step (1, 2 or 5 times a power of ten) targeting ~n intervals.
inline double nice_step(double range, int n) {
    double raw = range / n;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double m = raw / mag;
    if (m <= 1.0) return mag;
    if (m <= 2.0) return 2.0 * mag;
    if (m <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

inline void pad_if_flat(double& lo, double& hi, double pad) {
    if (!(hi > lo)) {
        lo -= pad;
        hi += pad;
    }
}

inline std::string svg_open(const PlotFrame& f) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(f.width) +
           "\" height=\"" + fmt_px(f.height) + "\" viewBox=\"0 0 " + fmt_px(f.width) + " " +
           fmt_px(f.height) + "\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string svg_frame_rect(const PlotFrame& f) {
    return "<rect x=\"" + fmt_px(f.left) + "\" y=\"" + fmt_px(f.top) + "\" width=\"" +
           fmt_px(f.width - f.left - f.right) + "\" height=\"" +
           fmt_px(f.height - f.top - f.bottom) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
}

inline std::string svg_yaxis_ticks(const PlotFrame& f, int target = 6) {
    double step = nice_step(f.y1 - f.y0, target);
    double first = std::ceil(f.y0 / step) * step;
    std::string out;
    for (double v = first; v <= f.y1 + 1e-12 * step; v += step) {
        double y = f.py(v);
        out += "<line x1=\"" + fmt_px(f.left - 4) + "\" y1=\"" + fmt_px(y) + "\" x2=\"" +
               fmt_px(f.left) + "\" y2=\"" + fmt_px(y) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt_px(f.left - 8) + "\" y=\"" + fmt_px(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt_tick(v) + "</text>\n";
    }
    return out;
}

inline std::string svg_polyline(const std::vector<std::pair<double, double>>& pts,
                                const std::string& color) {
    std::string out = "<polyline fill=\"none\" stroke=\"" + color +
                      "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += " ";
        out += fmt_px(pts[i].first) + "," + fmt_px(pts[i].second);
    }
    out += "\"/>\n";
    return out;
}

inline std::string tick_display(const std::string& label) {
    return label == "Gamma" ? "\xce\x93" : label; // Greek capital gamma
}

} // namespace detail

// Band structure figure: one polyline per band over cumulative path distance,
// vertical rules and labels at the high-symmetry vertices.
inline std::string band_svg_text(const EigenvalueSet& set,
                                 const std::vector<std::pair<std::string, double>>& ticks = {}) {
    validate_eigenvalue_set(set, "band svg");
    detail::PlotFrame f;
    f.x0 = set.kpoints.front().s;
    f.x1 = set.kpoints.back().s;
    for (const auto& kp : set.kpoints) {
        f.x0 = std::min(f.x0, kp.s);
        f.x1 = std::max(f.x1, kp.s);
    }
    detail::pad_if_flat(f.x0, f.x1, 0.5);
    f.y0 = f.y1 = set.bands[0][0];
    for (const auto& row : set.bands)
        for (double e : row) {
            f.y0 = std::min(f.y0, e);
            f.y1 = std::max(f.y1, e);
        }
    detail::pad_if_flat(f.y0, f.y1, 0.5);
    double margin = 0.05 * (f.y1 - f.y0);
    f.y0 -= margin;
    f.y1 += margin;

    std::string out = detail::svg_open(f);
    for (const auto& [label, s] : ticks) {
        double x = f.px(std::clamp(s, f.x0, f.x1));
        out += "<line x1=\"" + detail::fmt_px(x) + "\" y1=\"" + detail::fmt_px(f.top) +
               "\" x2=\"" + detail::fmt_px(x) + "\" y2=\"" +
               detail::fmt_px(f.height - f.bottom) +
               "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
        out += "<text x=\"" + detail::fmt_px(x) + "\" y=\"" +
               detail::fmt_px(f.height - f.bottom + 18) +
               "\" font-size=\"14\" text-anchor=\"middle\">" + detail::tick_display(label) +
               "</text>\n";
    }
    out += detail::svg_yaxis_ticks(f);
    for (std::size_t n = 0; n < set.n_bands(); ++n) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(set.n_k());
        for (std::size_t k = 0; k < set.n_k(); ++k)
            pts.push_back({f.px(set.kpoints[k].s), f.py(set.bands[k][n])});
        out += detail::svg_polyline(pts, "#1f77b4");
    }
    out += detail::svg_frame_rect(f);
    out += "<text x=\"16\" y=\"" + detail::fmt_px(f.height / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::fmt_px(f.height / 2) + ")\">energy (eV)</text>\n";
    out += "</svg>\n";
    return out;
}

inline void write_band_svg(const EigenvalueSet& set, const KPath& path, const std::string& file) {
    detail::write_text_file(file, band_svg_text(set, path_ticks(path)));
}

// Density-of-states figure: single polyline, energy on the x axis.
inline std::string dos_svg_text(const DosCurve& dos) {
    if (dos.grid.size() < 2) fail_domain("density-of-states curve needs at least 2 grid points");
    if (dos.grid.size() != dos.values.size())
        fail_domain("density-of-states grid and values differ in length");
    detail::PlotFrame f;
    f.bottom = 58;
    f.x0 = dos.grid.front();
    f.x1 = dos.grid.back();
    detail::pad_if_flat(f.x0, f.x1, 0.5);
    f.y0 = 0.0;
    f.y1 = *std::max_element(dos.values.begin(), dos.values.end());
    detail::pad_if_flat(f.y0, f.y1, 0.5);
    f.y1 *= 1.05;

    std::string out = detail::svg_open(f);
    out += detail::svg_yaxis_ticks(f);
    double step = detail::nice_step(f.x1 - f.x0, 8);
    double first = std::ceil(f.x0 / step) * step;
    for (double v = first; v <= f.x1 + 1e-12 * step; v += step) {
        double x = f.px(v);
        out += "<line x1=\"" + detail::fmt_px(x) + "\" y1=\"" +
               detail::fmt_px(f.height - f.bottom) + "\" x2=\"" + detail::fmt_px(x) +
               "\" y2=\"" + detail::fmt_px(f.height - f.bottom + 4) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fmt_px(x) + "\" y=\"" +
               detail::fmt_px(f.height - f.bottom + 18) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + detail::fmt_tick(v) + "</text>\n";
    }
    std::vector<std::pair<double, double>> pts;
    pts.reserve(dos.grid.size());
    for (std::size_t i = 0; i < dos.grid.size(); ++i)
        pts.push_back({f.px(dos.grid[i]), f.py(dos.values[i])});
    out += detail::svg_polyline(pts, "#d62728");
    out += detail::svg_frame_rect(f);
    out += "<text x=\"" + detail::fmt_px((f.left + f.width - f.right) / 2) + "\" y=\"" +
           detail::fmt_px(f.height - 12) +
           "\" font-size=\"13\" text-anchor=\"middle\">energy (eV)</text>\n";
    out += "<text x=\"16\" y=\"" + detail::fmt_px(f.height / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::fmt_px(f.height / 2) + ")\">DOS (states/eV)</text>\n";
    out += "</svg>\n";
    return out;
}

inline void write_dos_svg(const DosCurve& dos, const std::string& file) {
    detail::write_text_file(file, dos_svg_text(dos));
}

} // namespace polydef
