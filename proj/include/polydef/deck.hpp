#pragma once

#include <cmath>
#include <string>

#include "bz.hpp"
#include "crystal.hpp"

namespace polydef {

// Settings for the external ground-state engine. The deck stays
// engine-agnostic: plain key = value lines any plane-wave front end can map
// onto its own input format. hubbard_u is carried as metadata for the f-shell
// correction; nothing here evaluates it.
struct DeckSettings {
    double scf_tolerance = 1e-4;   // Ry
    long max_iterations = 100;
    double hubbard_u = 7.21;       // eV
    int scf_kpoints = 2;           // ground-state grid size; coordinates are engine-side
    int nscf_kpoints = 113;        // band-path sampling
    std::string functional = "PBE-GGA+U";
    std::string structure;         // structure file the deck belongs to, optional
};

inline void validate_deck_settings(const DeckSettings& s) {
    if (!(s.scf_tolerance > 0.0) || !std::isfinite(s.scf_tolerance))
        fail_domain("scf tolerance must be > 0");
    if (s.max_iterations < 1) fail_domain("max iterations must be >= 1");
    if (!std::isfinite(s.hubbard_u)) fail_domain("hubbard U is not finite");
    if (s.scf_kpoints < 1) fail_domain("scf k-point count must be >= 1");
    if (s.nscf_kpoints < 1) fail_domain("nscf k-point count must be >= 1");
    if (s.functional.empty()) fail_domain("functional tag is empty");
}

// One "key = value  # unit" line per setting, then the band-path k-point
// block when a path is supplied (the block and the nscf count both come from
// the path in that case).
inline std::string deck_text(const DeckSettings& settings, const KPath* nscf_path = nullptr) {
    DeckSettings s = settings;
    if (nscf_path) {
        if (nscf_path->points.empty()) fail_domain("band path for the deck is empty");
        s.nscf_kpoints = static_cast<int>(nscf_path->points.size());
    }
    validate_deck_settings(s);

    std::string out;
    if (!s.structure.empty()) out += "structure = " + s.structure + "  # file\n";
    out += "functional = " + s.functional + "  # exchange-correlation tag\n";
    out += "hubbard_u = " + fmt_g12(s.hubbard_u) + "  # eV\n";
    out += "scf_tolerance = " + fmt_g12(s.scf_tolerance) + "  # Ry\n";
    out += "max_iterations = " + std::to_string(s.max_iterations) + "  # count\n";
    out += "scf_kpoints = " + std::to_string(s.scf_kpoints) + "  # count, grid chosen engine-side\n";
    out += "nscf_kpoints = " + std::to_string(s.nscf_kpoints) + "  # count\n";
    if (nscf_path) {
        out += "\nbegin kpoints  # fractional, band path\n";
        for (const auto& p : nscf_path->points) {
            out += fmt_g12(p.frac.x) + " " + fmt_g12(p.frac.y) + " " + fmt_g12(p.frac.z);
            if (!p.label.empty()) out += "  # " + p.label;
            out += "\n";
        }
        out += "end kpoints\n";
    }
    return out;
}

inline void write_deck(const DeckSettings& settings, const std::string& path,
                       const KPath* nscf_path = nullptr) {
    detail::write_text_file(path, deck_text(settings, nscf_path));
}

// Manifest fragment -> settings; absent keys keep their defaults.
inline DeckSettings deck_settings_from_json(const nlohmann::json& j, const std::string& source) {
    if (!j.is_object()) fail_parse(source + ": deck settings must be an object");
    DeckSettings s;
    auto num = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) fail_parse(source + ": '" + std::string(key) + "' must be a number");
        slot = j[key].get<double>();
    };
    auto count = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer())
            fail_parse(source + ": '" + std::string(key) + "' must be an integer");
        slot = j[key].get<long>();
    };
    auto text = [&](const char* key, std::string& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) fail_parse(source + ": '" + std::string(key) + "' must be a string");
        slot = j[key].get<std::string>();
    };
    num("scf_tolerance", s.scf_tolerance);
    count("max_iterations", s.max_iterations);
    num("hubbard_u", s.hubbard_u);
    count("scf_kpoints", s.scf_kpoints);
    count("nscf_kpoints", s.nscf_kpoints);
    text("functional", s.functional);
    text("structure", s.structure);
    validate_deck_settings(s);
    return s;
}

} // namespace polydef
