#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "geometry.hpp"
#include "numio.hpp"

namespace polydef {

enum class SiteClass { unclassified, h, k };

inline std::string to_string(SiteClass c) {
    switch (c) {
        case SiteClass::h: return "h";
        case SiteClass::k: return "k";
        default: return "unclassified";
    }
}

inline SiteClass site_class_from_string(const std::string& s) {
    if (s == "h") return SiteClass::h;
    if (s == "k") return SiteClass::k;
    if (s == "unclassified") return SiteClass::unclassified;
    fail_parse("unknown site class '" + s + "' (expected h, k or unclassified)");
}

// Hexagonal cell: a1 = (a,0,0), a2 = (-a/2, a*sqrt(3)/2, 0), a3 = (0,0,c).
struct LatticeCell {
    double a = 0.0;
    double c = 0.0;
    Mat3 vectors;
};

inline LatticeCell make_hexagonal_cell(double a, double c) {
    if (!(a > 0.0) || !(c > 0.0))
        fail_domain("lattice constants must be positive (a=" + fmt_g12(a) + ", c=" + fmt_g12(c) + ")");
    LatticeCell cell;
    cell.a = a;
    cell.c = c;
    cell.vectors.set_row(0, {a, 0.0, 0.0});
    cell.vectors.set_row(1, {-a / 2.0, a * std::sqrt(3.0) / 2.0, 0.0});
    cell.vectors.set_row(2, {0.0, 0.0, c});
    return cell;
}

inline double cell_volume(const LatticeCell& cell) { return std::fabs(cell.vectors.det()); }

struct AtomSite {
    std::string species;
    Vec3 frac;
    int layer = -1;
    SiteClass site_class = SiteClass::unclassified;
};

struct CrystalStructure {
    LatticeCell cell;
    std::vector<AtomSite> sites;
    std::string stacking; // provenance; empty if unknown

    std::size_t count_species(const std::string& sym) const {
        std::size_t n = 0;
        for (const auto& s : sites)
            if (s.species == sym) ++n;
        return n;
    }
};

inline const std::set<std::string>& known_species() {
    static const std::set<std::string> table = {
        "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si",
        "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni",
        "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo",
        "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba",
        "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
        "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
        "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf",
        "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
        "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
    return table;
}

inline void validate_species(const std::string& sym) {
    if (!known_species().count(sym)) fail_domain("unknown chemical species '" + sym + "'");
}

// Close-packing check: letters over {A,B,C}, length >= 2, no equal cyclic
// neighbours.
inline void validate_stacking(const std::string& letters) {
    if (letters.size() < 2)
        fail_domain("stacking sequence needs at least 2 layers, got " +
                    std::to_string(letters.size()));
    for (std::size_t i = 0; i < letters.size(); ++i) {
        char ch = letters[i];
        if (ch != 'A' && ch != 'B' && ch != 'C')
            fail_domain("stacking letter at index " + std::to_string(i) +
                        " must be A, B or C, got '" + std::string(1, ch) + "'");
    }
    for (std::size_t i = 0; i < letters.size(); ++i) {
        std::size_t j = (i + 1) % letters.size();
        if (letters[i] == letters[j])
            fail_domain("stacking has equal adjacent layers at index " + std::to_string(i) +
                        " ('" + std::string(1, letters[i]) + "')");
    }
}

inline Vec3 lateral_position(char letter) {
    switch (letter) {
        case 'A': return {0.0, 0.0, 0.0};
        case 'B': return {1.0 / 3.0, 2.0 / 3.0, 0.0};
        case 'C': return {2.0 / 3.0, 1.0 / 3.0, 0.0};
        default: fail_domain("invalid stacking letter '" + std::string(1, letter) + "'");
    }
}

// One Si-C bilayer per stacking letter, ideal tetrahedral geometry: Si of
// layer i at frac_z = i/n, its C at i/n + 3/(4n).
inline CrystalStructure build_polytype(const std::string& stacking, double a, double c) {
    validate_stacking(stacking);
    CrystalStructure s;
    s.cell = make_hexagonal_cell(a, c);
    s.stacking = stacking;
    const std::size_t n = stacking.size();
    s.sites.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 lat = lateral_position(stacking[i]);
        double zi = static_cast<double>(i) / static_cast<double>(n);
        AtomSite si;
        si.species = "Si";
        si.frac = {lat.x, lat.y, wrap01(zi)};
        si.layer = static_cast<int>(i);
        s.sites.push_back(si);
        AtomSite cc;
        cc.species = "C";
        cc.frac = {lat.x, lat.y, wrap01(zi + 3.0 / (4.0 * static_cast<double>(n)))};
        cc.layer = static_cast<int>(i);
        s.sites.push_back(cc);
    }
    return s;
}

// c/a giving equal nearest-neighbour distances for all bonds in the ideal
// geometry: c = n * a * sqrt(2/3).
inline double ideal_c_for(double a, std::size_t n_layers) {
    if (!(a > 0.0) || n_layers < 2) fail_domain("ideal_c_for needs a > 0 and at least 2 layers");
    return static_cast<double>(n_layers) * a * std::sqrt(2.0 / 3.0);
}

// Layer i is hexagonal when its two cyclic neighbour layers carry the same
// letter, quasi-cubic otherwise. Si and C of a bilayer share the class.
inline CrystalStructure classify_sites(CrystalStructure s) {
    if (s.stacking.empty())
        fail_domain("structure carries no stacking provenance; sites cannot be classified");
    validate_stacking(s.stacking);
    const int n = static_cast<int>(s.stacking.size());
    for (auto& site : s.sites) {
        if (site.layer < 0 || site.layer >= n)
            fail_domain("site layer " + std::to_string(site.layer) +
                        " outside stacking of length " + std::to_string(n));
        char prev = s.stacking[(site.layer - 1 + n) % n];
        char next = s.stacking[(site.layer + 1) % n];
        site.site_class = (prev == next) ? SiteClass::h : SiteClass::k;
    }
    return s;
}

// Minimum-image distance between two sites. i == j is a degenerate query
// and reports 0.
inline double interatomic_distance(const CrystalStructure& s, std::size_t i, std::size_t j) {
    if (i >= s.sites.size() || j >= s.sites.size())
        fail_domain("site index out of range: " + std::to_string(i) + ", " + std::to_string(j) +
                    " in structure of " + std::to_string(s.sites.size()) + " sites");
    if (i == j) return 0.0;
    return min_image_distance(s.cell.vectors, s.sites[i].frac - s.sites[j].frac);
}

inline double min_interatomic_distance(const CrystalStructure& s) {
    double best = 1e300;
    for (std::size_t i = 0; i < s.sites.size(); ++i)
        for (std::size_t j = i + 1; j < s.sites.size(); ++j)
            best = std::min(best, interatomic_distance(s, i, j));
    return best;
}

namespace detail {

inline void append_vec3(std::string& out, const Vec3& v) {
    out += "[" + fmt_g12(v.x) + ", " + fmt_g12(v.y) + ", " + fmt_g12(v.z) + "]";
}

inline int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail_parse(source + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail_io("write to '" + path + "' failed");
}

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& source) {
    if (!j.contains(key) || !j[key].is_number())
        fail_parse(source + ": missing or non-numeric '" + key + "'");
    return j[key].get<double>();
}

} // namespace detail

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace detail

// `extra` holds pre-rendered top-level members (each ending in ",\n"),
// inserted between "stacking" and "sites"; used by the defect and
// supercell writers that extend this schema.
inline std::string structure_to_json_text(const CrystalStructure& s, const std::string& extra = {}) {
    std::string out;
    out += "{\n";
    out += "  \"cell\": {\n";
    out += "    \"a\": " + fmt_g12(s.cell.a) + ",\n";
    out += "    \"c\": " + fmt_g12(s.cell.c) + ",\n";
    out += "    \"vectors\": [\n";
    for (int r = 0; r < 3; ++r) {
        out += "      ";
        detail::append_vec3(out, s.cell.vectors.row(r));
        out += (r < 2) ? ",\n" : "\n";
    }
    out += "    ]\n";
    out += "  },\n";
    out += "  \"stacking\": \"" + s.stacking + "\",\n";
    out += extra;
    out += "  \"sites\": [\n";
    for (std::size_t i = 0; i < s.sites.size(); ++i) {
        const auto& site = s.sites[i];
        out += "    {\"species\": \"" + site.species + "\", \"frac\": ";
        detail::append_vec3(out, site.frac);
        out += ", \"layer\": " + std::to_string(site.layer);
        out += ", \"site_class\": \"" + to_string(site.site_class) + "\"}";
        out += (i + 1 < s.sites.size()) ? ",\n" : "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

inline CrystalStructure structure_from_json(const nlohmann::json& j, const std::string& source) {
    if (!j.is_object() || !j.contains("cell") || !j.contains("sites"))
        fail_parse(source + ": structure file needs top-level 'cell' and 'sites'");
    const auto& jc = j["cell"];
    CrystalStructure s;
    s.cell.a = detail::require_number(jc, "a", source);
    s.cell.c = detail::require_number(jc, "c", source);
    if (!(s.cell.a > 0.0) || !(s.cell.c > 0.0))
        fail_domain(source + ": lattice constants must be positive");
    if (!jc.contains("vectors") || !jc["vectors"].is_array() || jc["vectors"].size() != 3)
        fail_parse(source + ": 'cell.vectors' must be an array of 3 vectors");
    for (int r = 0; r < 3; ++r) {
        const auto& row = jc["vectors"][r];
        if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() ||
            !row[2].is_number())
            fail_parse(source + ": cell vector " + std::to_string(r) + " must hold 3 numbers");
        s.cell.vectors.set_row(r, {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    // Hexagonal-volume consistency; tolerance allows for the 12-digit
    // decimal rounding of the stored vectors.
    double vol = cell_volume(s.cell);
    double expect = std::sqrt(3.0) / 2.0 * s.cell.a * s.cell.a * s.cell.c;
    if (std::fabs(vol - expect) > 1e-9 * expect)
        fail_domain(source + ": cell vectors inconsistent with hexagonal a, c (volume " +
                    fmt_g12(vol) + " vs " + fmt_g12(expect) + ")");
    if (j.contains("stacking")) {
        if (!j["stacking"].is_string()) fail_parse(source + ": 'stacking' must be a string");
        s.stacking = j["stacking"].get<std::string>();
        if (!s.stacking.empty()) validate_stacking(s.stacking);
    }
    if (!j["sites"].is_array()) fail_parse(source + ": 'sites' must be an array");
    for (std::size_t i = 0; i < j["sites"].size(); ++i) {
        const auto& js = j["sites"][i];
        if (!js.is_object() || !js.contains("species") || !js.contains("frac"))
            fail_parse(source + ": site " + std::to_string(i) + " needs 'species' and 'frac'");
        AtomSite site;
        if (!js["species"].is_string())
            fail_parse(source + ": site " + std::to_string(i) + " species must be a string");
        site.species = js["species"].get<std::string>();
        validate_species(site.species);
        const auto& fr = js["frac"];
        if (!fr.is_array() || fr.size() != 3 || !fr[0].is_number() || !fr[1].is_number() ||
            !fr[2].is_number())
            fail_parse(source + ": site " + std::to_string(i) + " frac must hold 3 numbers");
        site.frac = {fr[0].get<double>(), fr[1].get<double>(), fr[2].get<double>()};
        for (int d = 0; d < 3; ++d)
            if (!(site.frac[d] >= 0.0 && site.frac[d] < 1.0))
                fail_domain(source + ": site " + std::to_string(i) + " frac component " +
                            fmt_g12(site.frac[d]) + " outside [0,1)");
        if (js.contains("layer")) {
            if (!js["layer"].is_number_integer())
                fail_parse(source + ": site " + std::to_string(i) + " layer must be an integer");
            site.layer = js["layer"].get<int>();
        }
        if (js.contains("site_class")) {
            if (!js["site_class"].is_string())
                fail_parse(source + ": site " + std::to_string(i) + " site_class must be a string");
            site.site_class = site_class_from_string(js["site_class"].get<std::string>());
        }
        s.sites.push_back(site);
    }
    return s;
}

inline CrystalStructure structure_from_json_text(const std::string& text,
                                                 const std::string& source) {
    return structure_from_json(detail::parse_json_text(text, source), source);
}

inline void write_structure(const CrystalStructure& s, const std::string& path) {
    detail::write_text_file(path, structure_to_json_text(s));
}

inline CrystalStructure read_structure(const std::string& path) {
    return structure_from_json_text(detail::read_text_file(path), path);
}

// Extended-XYZ export for visualization tools; Cartesian coordinates, cell
// vectors on the comment line.
inline std::string structure_to_xyz_text(const CrystalStructure& s) {
    std::string out = std::to_string(s.sites.size()) + "\n";
    out += "Lattice=\"";
    for (int r = 0; r < 3; ++r) {
        Vec3 v = s.cell.vectors.row(r);
        out += fmt_g12(v.x) + " " + fmt_g12(v.y) + " " + fmt_g12(v.z);
        if (r < 2) out += " ";
    }
    out += "\" Properties=species:S:1:pos:R:3\n";
    for (const auto& site : s.sites) {
        Vec3 cart = mul(site.frac, s.cell.vectors);
        out += site.species + " " + fmt_g12(cart.x) + " " + fmt_g12(cart.y) + " " +
               fmt_g12(cart.z) + "\n";
    }
    return out;
}

inline void write_xyz(const CrystalStructure& s, const std::string& path) {
    detail::write_text_file(path, structure_to_xyz_text(s));
}

} // namespace polydef
