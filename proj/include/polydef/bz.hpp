#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "crystal.hpp"
#include "geometry.hpp"

namespace polydef {

// Reciprocal basis in the 2pi convention: rows b_i with b_i . a_j = 2pi d_ij.
inline Mat3 reciprocal_lattice(const Mat3& cell) {
    Mat3 b = inverse(cell).transposed();
    for (auto& row : b.m)
        for (double& v : row) v *= two_pi;
    return b;
}

inline Mat3 reciprocal_lattice(const LatticeCell& cell) { return reciprocal_lattice(cell.vectors); }

// Standard hexagonal Brillouin-zone vertices in reciprocal fractional
// coordinates.
inline const std::vector<std::pair<std::string, Vec3>>& hex_high_symmetry_points() {
    static const std::vector<std::pair<std::string, Vec3>> table = {
        {"Gamma", {0.0, 0.0, 0.0}},          {"M", {0.5, 0.0, 0.0}},
        {"K", {1.0 / 3.0, 1.0 / 3.0, 0.0}},  {"A", {0.0, 0.0, 0.5}},
        {"L", {0.5, 0.0, 0.5}},              {"H", {1.0 / 3.0, 1.0 / 3.0, 0.5}},
    };
    return table;
}

inline Vec3 hex_point(const std::string& label) {
    for (const auto& [name, frac] : hex_high_symmetry_points())
        if (name == label) return frac;
    fail_domain("unknown high-symmetry label '" + label + "'");
}

// "Gamma-M-K-Gamma" or comma-separated; "G" is accepted for Gamma.
inline std::vector<std::string> parse_path_labels(const std::string& text) {
    std::vector<std::string> labels;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            labels.push_back(cur == "G" ? "Gamma" : cur);
            cur.clear();
        }
    };
    for (char c : text) {
        if (c == '-' || c == ',' || c == ' ')
            flush();
        else
            cur += c;
    }
    flush();
    return labels;
}

struct KPoint {
    Vec3 frac;
    Vec3 cart;         // 1/angstrom
    std::string label; // empty for interior points
    double s = 0.0;    // cumulative path distance, 1/angstrom
};

struct KPath {
    std::vector<KPoint> points;
    std::vector<std::string> vertices;
    Mat3 reciprocal;
};

// Interior counts per segment: proportional to Cartesian segment length,
// rounded by largest remainder so the grand total is exact. Ties go to the
// earlier segment.
inline std::vector<int> allocate_interior_points(const std::vector<double>& seg_len, int extras) {
    const std::size_t nseg = seg_len.size();
    double total_len = std::accumulate(seg_len.begin(), seg_len.end(), 0.0);
    if (!(total_len > 0.0)) fail_domain("k-path has zero total length");
    std::vector<int> counts(nseg, 0);
    std::vector<double> remainder(nseg, 0.0);
    int assigned = 0;
    for (std::size_t i = 0; i < nseg; ++i) {
        double quota = extras * seg_len[i] / total_len;
        counts[i] = static_cast<int>(std::floor(quota));
        remainder[i] = quota - counts[i];
        assigned += counts[i];
    }
    std::vector<std::size_t> order(nseg);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return a < b;
    });
    for (int left = extras - assigned, i = 0; left > 0; --left, ++i) ++counts[order[i]];
    return counts;
}

inline KPath build_kpath(const LatticeCell& cell, const std::vector<std::string>& labels,
                         int total_points) {
    if (labels.size() < 2) fail_domain("a k-path needs at least 2 vertices");
    if (total_points < static_cast<int>(labels.size()))
        fail_domain("total_points " + std::to_string(total_points) + " below the vertex count " +
                    std::to_string(labels.size()));
    for (std::size_t i = 0; i + 1 < labels.size(); ++i)
        if (labels[i] == labels[i + 1])
            fail_domain("adjacent duplicate vertex '" + labels[i] + "' makes a zero-length segment");

    KPath path;
    path.vertices = labels;
    path.reciprocal = reciprocal_lattice(cell);

    std::vector<Vec3> vfrac, vcart;
    for (const auto& label : labels) {
        Vec3 f = hex_point(label); // rejects unknown labels by name
        vfrac.push_back(f);
        vcart.push_back(mul(f, path.reciprocal));
    }
    const std::size_t nseg = labels.size() - 1;
    std::vector<double> seg_len(nseg);
    for (std::size_t i = 0; i < nseg; ++i) seg_len[i] = norm(vcart[i + 1] - vcart[i]);

    auto interior = allocate_interior_points(seg_len, total_points - static_cast<int>(labels.size()));

    auto push = [&](const Vec3& frac, const std::string& label) {
        KPoint p;
        p.frac = frac;
        p.cart = mul(frac, path.reciprocal);
        p.label = label;
        p.s = path.points.empty() ? 0.0
                                  : path.points.back().s + norm(p.cart - path.points.back().cart);
        path.points.push_back(p);
    };

    for (std::size_t i = 0; i < nseg; ++i) {
        push(vfrac[i], labels[i]);
        for (int j = 1; j <= interior[i]; ++j) {
            double t = static_cast<double>(j) / (interior[i] + 1);
            push(vfrac[i] + (vfrac[i + 1] - vfrac[i]) * t, "");
        }
    }
    push(vfrac.back(), labels.back());
    return path;
}

// Text form: comment headers carry the reciprocal matrix and one line per
// vertex; each record is index, frac (3), cumulative s, optional label.
inline std::string kpath_to_text(const KPath& path) {
    std::string out = "# k-path, 2pi convention, units 1/angstrom\n";
    out += "# reciprocal";
    for (int r = 0; r < 3; ++r) {
        Vec3 v = path.reciprocal.row(r);
        out += " " + fmt_g12(v.x) + " " + fmt_g12(v.y) + " " + fmt_g12(v.z);
    }
    out += "\n";
    for (const auto& label : path.vertices) {
        Vec3 f = hex_point(label);
        out += "# " + label + " " + fmt_g12(f.x) + " " + fmt_g12(f.y) + " " + fmt_g12(f.z) + "\n";
    }
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const auto& p = path.points[i];
        out += std::to_string(i) + " " + fmt_g12(p.frac.x) + " " + fmt_g12(p.frac.y) + " " +
               fmt_g12(p.frac.z) + " " + fmt_g12(p.s);
        if (!p.label.empty()) out += " " + p.label;
        out += "\n";
    }
    return out;
}

inline void write_kpath(const KPath& path, const std::string& file) {
    detail::write_text_file(file, kpath_to_text(path));
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) tokens.push_back(t);
    return tokens;
}

inline bool parse_double(const std::string& t, double& out) {
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && !t.empty();
}

} // namespace detail

inline KPath kpath_from_text(const std::string& text, const std::string& source) {
    KPath path;
    bool have_reciprocal = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    long expect_index = 0;
    auto here = [&] { return source + ":" + std::to_string(lineno); };
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) continue;
        if (tokens[0] == "#" || tokens[0][0] == '#') {
            // strip the marker; it may be glued to the first word
            if (tokens[0] == "#")
                tokens.erase(tokens.begin());
            else
                tokens[0] = tokens[0].substr(1);
            if (tokens.empty()) continue;
            if (tokens[0] == "reciprocal") {
                if (tokens.size() != 10) fail_parse(here() + ": reciprocal header needs 9 numbers");
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) {
                        double v;
                        if (!detail::parse_double(tokens[1 + 3 * r + c], v))
                            fail_parse(here() + ": bad reciprocal component '" +
                                       tokens[1 + 3 * r + c] + "'");
                        path.reciprocal.m[r][c] = v;
                    }
                have_reciprocal = true;
                continue;
            }
            // vertex declaration: label + 3 coordinates
            if (tokens.size() == 4) {
                double x, y, z;
                if (detail::parse_double(tokens[1], x) && detail::parse_double(tokens[2], y) &&
                    detail::parse_double(tokens[3], z)) {
                    path.vertices.push_back(tokens[0]);
                }
            }
            continue; // any other comment is free text
        }
        if (tokens.size() != 5 && tokens.size() != 6)
            fail_parse(here() + ": k-point record needs 5 or 6 fields, got " +
                       std::to_string(tokens.size()));
        double idx;
        if (!detail::parse_double(tokens[0], idx) || idx != static_cast<double>(expect_index))
            fail_parse(here() + ": expected point index " + std::to_string(expect_index) +
                       ", got '" + tokens[0] + "'");
        ++expect_index;
        KPoint p;
        double v[4];
        for (int i = 0; i < 4; ++i)
            if (!detail::parse_double(tokens[1 + i], v[i]))
                fail_parse(here() + ": bad number '" + tokens[1 + i] + "'");
        p.frac = {v[0], v[1], v[2]};
        p.s = v[3];
        if (tokens.size() == 6) p.label = tokens[5];
        if (!path.points.empty() && p.s < path.points.back().s)
            fail_domain(here() + ": cumulative distance decreases");
        path.points.push_back(p);
    }
    if (!have_reciprocal)
        fail_parse(source + ": missing '# reciprocal' header; cannot reconstruct Cartesian k-points");
    if (path.points.empty()) fail_parse(source + ": no k-points found");
    for (auto& p : path.points) p.cart = mul(p.frac, path.reciprocal);
    std::size_t labelled = 0;
    for (const auto& p : path.points)
        if (!p.label.empty()) ++labelled;
    if (!path.vertices.empty() && labelled != path.vertices.size())
        fail_domain(source + ": " + std::to_string(path.vertices.size()) +
                    " declared vertices but " + std::to_string(labelled) + " labelled points");
    return path;
}

inline KPath read_kpath(const std::string& file) {
    return kpath_from_text(detail::read_text_file(file), file);
}

} // namespace polydef
