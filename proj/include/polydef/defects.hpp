#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "crystal.hpp"

namespace polydef {

enum class DefectKind { ErH, ErK, ErHV, ErKV };

inline std::string to_string(DefectKind k) {
    switch (k) {
        case DefectKind::ErH: return "ErH";
        case DefectKind::ErK: return "ErK";
        case DefectKind::ErHV: return "ErHV";
        default: return "ErKV";
    }
}

inline DefectKind defect_kind_from_string(const std::string& s) {
    if (s == "ErH") return DefectKind::ErH;
    if (s == "ErK") return DefectKind::ErK;
    if (s == "ErHV") return DefectKind::ErHV;
    if (s == "ErKV") return DefectKind::ErKV;
    fail_parse("unknown defect kind '" + s + "' (expected ErH, ErK, ErHV or ErKV)");
}

inline bool kind_has_vacancy(DefectKind k) {
    return k == DefectKind::ErHV || k == DefectKind::ErKV;
}

inline SiteClass kind_site_class(DefectKind k) {
    return (k == DefectKind::ErH || k == DefectKind::ErHV) ? SiteClass::h : SiteClass::k;
}

struct Supercell {
    CrystalStructure structure;
    std::array<int, 3> multipliers{1, 1, 1};
    std::vector<std::size_t> parent_index;
};

// Replicates the cell n1 x n2 x n3. Site order is parent-index major with
// images in lexicographic (i1, i2, i3) order. The in-plane constant of the
// scaled cell is recorded as a*sqrt(n1*n2) so the hexagonal volume relation
// stays exact even for n1 != n2.
inline Supercell expand_supercell(const CrystalStructure& s, int n1, int n2, int n3) {
    if (n1 < 1 || n2 < 1 || n3 < 1)
        fail_domain("supercell multipliers must be >= 1, got (" + std::to_string(n1) + ", " +
                    std::to_string(n2) + ", " + std::to_string(n3) + ")");
    Supercell sc;
    sc.multipliers = {n1, n2, n3};
    sc.structure.stacking = s.stacking;
    sc.structure.cell.a = s.cell.a * std::sqrt(static_cast<double>(n1) * n2);
    sc.structure.cell.c = s.cell.c * n3;
    sc.structure.cell.vectors.set_row(0, s.cell.vectors.row(0) * static_cast<double>(n1));
    sc.structure.cell.vectors.set_row(1, s.cell.vectors.row(1) * static_cast<double>(n2));
    sc.structure.cell.vectors.set_row(2, s.cell.vectors.row(2) * static_cast<double>(n3));
    const double d1 = n1, d2 = n2, d3 = n3;
    sc.structure.sites.reserve(s.sites.size() * n1 * n2 * n3);
    for (std::size_t p = 0; p < s.sites.size(); ++p) {
        const auto& parent = s.sites[p];
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2)
                for (int i3 = 0; i3 < n3; ++i3) {
                    AtomSite img = parent;
                    img.frac = {wrap01((parent.frac.x + i1) / d1),
                                wrap01((parent.frac.y + i2) / d2),
                                wrap01((parent.frac.z + i3) / d3)};
                    sc.structure.sites.push_back(img);
                    sc.parent_index.push_back(p);
                }
    }
    return sc;
}

// Matching site nearest the geometric cell centre (frac 1/2,1/2,1/2);
// near-ties (1e-9 A) keep the lowest index.
inline std::size_t select_site(const Supercell& sc, const std::string& species,
                               std::optional<SiteClass> cls = std::nullopt) {
    const auto& st = sc.structure;
    Vec3 center = mul(Vec3{0.5, 0.5, 0.5}, st.cell.vectors);
    std::size_t winner = st.sites.size();
    double best = 1e300;
    for (std::size_t i = 0; i < st.sites.size(); ++i) {
        const auto& site = st.sites[i];
        if (site.species != species) continue;
        if (cls && site.site_class != *cls) continue;
        double d = norm(mul(site.frac, st.cell.vectors) - center);
        if (d + 1e-9 < best) {
            best = d;
            winner = i;
        }
    }
    if (winner == st.sites.size()) {
        std::string want = species + (cls ? (" with site class " + to_string(*cls)) : "");
        fail_not_found("no " + want + " site in supercell");
    }
    return winner;
}

struct DefectedStructure {
    CrystalStructure structure;
    DefectKind kind = DefectKind::ErH;
    std::size_t substituted_site = 0;          // pre-removal supercell index
    std::optional<std::size_t> removed_site;   // pre-removal supercell index
    std::string log;

    std::size_t pristine_atom_count() const {
        return structure.sites.size() + (removed_site ? 1 : 0);
    }
};

namespace detail {

// Nearest carbon neighbour of `center` by minimum-image distance; among
// near-ties (1e-6 A) the neighbour most aligned with the c-axis wins, then
// the lowest index.
inline std::size_t nearest_carbon(const CrystalStructure& st, std::size_t center) {
    double dmin = 1e300;
    for (std::size_t j = 0; j < st.sites.size(); ++j) {
        if (j == center || st.sites[j].species != "C") continue;
        dmin = std::min(dmin, min_image_distance(st.cell.vectors,
                                                 st.sites[j].frac - st.sites[center].frac));
    }
    if (dmin == 1e300) fail_not_found("no carbon site available for vacancy");
    std::size_t winner = st.sites.size();
    double best_axial = -1.0;
    for (std::size_t j = 0; j < st.sites.size(); ++j) {
        if (j == center || st.sites[j].species != "C") continue;
        Vec3 delta = min_image_delta(st.cell.vectors, st.sites[j].frac - st.sites[center].frac);
        double d = norm(delta);
        if (d > dmin + 1e-6) continue;
        double axial = std::fabs(delta.z) / d;
        if (axial > best_axial + 1e-9) {
            best_axial = axial;
            winner = j;
        }
    }
    return winner;
}

} // namespace detail

// Substitutes Er on the class-matching Si site nearest the cell centre; for
// the vacancy kinds additionally removes the adjacent carbon (or the one
// named by remove_override). Recorded indices refer to the supercell before
// removal.
inline DefectedStructure apply_defect(const Supercell& sc, DefectKind kind,
                                      std::optional<std::size_t> remove_override = std::nullopt) {
    if (sc.structure.count_species("Er") != 0)
        fail_domain("supercell already contains erbium; defects apply to pristine cells only");
    DefectedStructure d;
    d.kind = kind;
    d.structure = sc.structure;
    std::size_t sub = select_site(sc, "Si", kind_site_class(kind));
    d.substituted_site = sub;
    auto& site = d.structure.sites[sub];
    site.species = "Er";
    d.log = "Er substituted at site " + std::to_string(sub) + " (Si " +
            to_string(site.site_class) + ", layer " + std::to_string(site.layer) + ", frac " +
            fmt_g12(site.frac.x) + " " + fmt_g12(site.frac.y) + " " + fmt_g12(site.frac.z) + ")";
    if (kind_has_vacancy(kind)) {
        std::size_t rm;
        if (remove_override) {
            rm = *remove_override;
            if (rm >= d.structure.sites.size())
                fail_domain("vacancy override index " + std::to_string(rm) + " out of range");
            if (rm == sub) fail_domain("vacancy override coincides with the substitution site");
            if (d.structure.sites[rm].species != "C")
                fail_domain("vacancy override site " + std::to_string(rm) + " is " +
                            d.structure.sites[rm].species + ", not C");
        } else {
            rm = detail::nearest_carbon(d.structure, sub);
        }
        double dist = min_image_distance(d.structure.cell.vectors,
                                         d.structure.sites[rm].frac - d.structure.sites[sub].frac);
        d.removed_site = rm;
        d.log += "; C removed at site " + std::to_string(rm) + " (d = " + fmt_g12(dist) + " A" +
                 (remove_override ? ", explicit override)" : ")");
        d.structure.sites.erase(d.structure.sites.begin() + static_cast<std::ptrdiff_t>(rm));
    }
    return d;
}

// Er fraction relative to the pristine supercell atom count, so vacancy
// configurations report the same concentration as their parents.
inline double doping_concentration(const DefectedStructure& d) {
    std::size_t n_er = d.structure.count_species("Er");
    if (n_er != 1)
        fail_domain("doping concentration needs exactly one erbium site, found " +
                    std::to_string(n_er));
    return static_cast<double>(n_er) / static_cast<double>(d.pristine_atom_count());
}

inline std::string supercell_to_json_text(const Supercell& sc) {
    std::string extra = "  \"supercell\": {\"multipliers\": [" +
                        std::to_string(sc.multipliers[0]) + ", " +
                        std::to_string(sc.multipliers[1]) + ", " +
                        std::to_string(sc.multipliers[2]) + "]},\n";
    return structure_to_json_text(sc.structure, extra);
}

inline void write_supercell(const Supercell& sc, const std::string& path) {
    detail::write_text_file(path, supercell_to_json_text(sc));
}

inline Supercell supercell_from_json_text(const std::string& text, const std::string& source) {
    nlohmann::json j = detail::parse_json_text(text, source);
    Supercell sc;
    sc.structure = structure_from_json(j, source);
    if (j.contains("supercell")) {
        const auto& js = j["supercell"];
        if (!js.is_object() || !js.contains("multipliers") || !js["multipliers"].is_array() ||
            js["multipliers"].size() != 3)
            fail_parse(source + ": 'supercell.multipliers' must hold 3 integers");
        for (int d = 0; d < 3; ++d) {
            if (!js["multipliers"][d].is_number_integer())
                fail_parse(source + ": supercell multiplier " + std::to_string(d) +
                           " must be an integer");
            sc.multipliers[d] = js["multipliers"][d].get<int>();
            if (sc.multipliers[d] < 1) fail_domain(source + ": supercell multipliers must be >= 1");
        }
    }
    // Parent-major site order makes the parent map implicit.
    std::size_t images = static_cast<std::size_t>(sc.multipliers[0]) * sc.multipliers[1] *
                         sc.multipliers[2];
    if (sc.structure.sites.size() % images != 0)
        fail_domain(source + ": site count " + std::to_string(sc.structure.sites.size()) +
                    " is not a multiple of the image count " + std::to_string(images));
    sc.parent_index.resize(sc.structure.sites.size());
    for (std::size_t i = 0; i < sc.parent_index.size(); ++i) sc.parent_index[i] = i / images;
    return sc;
}

inline Supercell read_supercell(const std::string& path) {
    return supercell_from_json_text(detail::read_text_file(path), path);
}

inline std::string defected_to_json_text(const DefectedStructure& d) {
    std::string extra = "  \"defect\": {\"kind\": \"" + to_string(d.kind) +
                        "\", \"substituted_site\": " + std::to_string(d.substituted_site);
    if (d.removed_site) extra += ", \"removed_site\": " + std::to_string(*d.removed_site);
    extra += ", \"log\": \"" + detail::json_escape(d.log) + "\"},\n";
    return structure_to_json_text(d.structure, extra);
}

inline void write_defected(const DefectedStructure& d, const std::string& path) {
    detail::write_text_file(path, defected_to_json_text(d));
}

inline DefectedStructure defected_from_json_text(const std::string& text,
                                                 const std::string& source) {
    nlohmann::json j = detail::parse_json_text(text, source);
    DefectedStructure d;
    d.structure = structure_from_json(j, source);
    if (!j.contains("defect") || !j["defect"].is_object())
        fail_parse(source + ": defected structure file needs a 'defect' object");
    const auto& jd = j["defect"];
    if (!jd.contains("kind") || !jd["kind"].is_string())
        fail_parse(source + ": 'defect.kind' must be a string");
    d.kind = defect_kind_from_string(jd["kind"].get<std::string>());
    if (!jd.contains("substituted_site") || !jd["substituted_site"].is_number_integer())
        fail_parse(source + ": 'defect.substituted_site' must be an integer");
    d.substituted_site = jd["substituted_site"].get<std::size_t>();
    if (jd.contains("removed_site")) {
        if (!jd["removed_site"].is_number_integer())
            fail_parse(source + ": 'defect.removed_site' must be an integer");
        d.removed_site = jd["removed_site"].get<std::size_t>();
    }
    if (kind_has_vacancy(d.kind) != d.removed_site.has_value())
        fail_domain(source + ": defect kind " + to_string(d.kind) +
                    (d.removed_site ? " cannot carry a removed site" : " requires a removed site"));
    if (jd.contains("log")) {
        if (!jd["log"].is_string()) fail_parse(source + ": 'defect.log' must be a string");
        d.log = jd["log"].get<std::string>();
    }
    if (d.structure.count_species("Er") != 1)
        fail_domain(source + ": defected structure must contain exactly one erbium site");
    return d;
}

inline DefectedStructure read_defected(const std::string& path) {
    return defected_from_json_text(detail::read_text_file(path), path);
}

} // namespace polydef
