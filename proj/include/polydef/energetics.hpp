#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crystal.hpp"
#include "numio.hpp"

namespace polydef {

struct EnergyEntry {
    std::string name;
    double energy = 0.0; // eV; per atom in the usual workflow
};

// Energies of competing defect configurations. Chemical potentials and
// charge corrections are out of scope here, so only differences between
// entries carry meaning; normalize per atom upstream if cells differ in size.
struct EnergyLedger {
    double pristine_energy = 0.0; // optional context, not a ranked entry
    bool has_pristine = false;
    std::vector<EnergyEntry> entries;
    std::string reference; // empty: least stable entry becomes the zero
};

inline void validate_ledger(const EnergyLedger& ledger) {
    if (ledger.entries.empty()) fail_domain("energy ledger has no entries");
    std::map<std::string, int> seen;
    for (const auto& e : ledger.entries) {
        if (e.name.empty()) fail_domain("energy ledger entry with an empty name");
        if (!std::isfinite(e.energy)) fail_domain("energy of '" + e.name + "' is not finite");
        if (++seen[e.name] > 1) fail_domain("duplicate ledger entry '" + e.name + "'");
    }
    if (ledger.has_pristine && !std::isfinite(ledger.pristine_energy))
        fail_domain("pristine energy is not finite");
}

// Reference entry: the named one if set, otherwise the highest energy
// (ties broken toward the lexicographically smallest name).
inline const EnergyEntry& reference_entry(const EnergyLedger& ledger) {
    validate_ledger(ledger);
    if (!ledger.reference.empty()) {
        for (const auto& e : ledger.entries)
            if (e.name == ledger.reference) return e;
        fail_not_found("reference entry '" + ledger.reference + "' is not in the ledger");
    }
    const EnergyEntry* best = &ledger.entries[0];
    for (const auto& e : ledger.entries)
        if (e.energy > best->energy || (e.energy == best->energy && e.name < best->name))
            best = &e;
    return *best;
}

// Energy of each configuration relative to the reference one; the reference
// itself lands on an exact zero.
inline std::map<std::string, double> relative_formation_energies(const EnergyLedger& ledger) {
    const EnergyEntry& ref = reference_entry(ledger);
    std::map<std::string, double> rel;
    for (const auto& e : ledger.entries) rel[e.name] = e.energy - ref.energy;
    return rel;
}

struct StabilityRanking {
    std::vector<std::pair<std::string, double>> order; // most stable first
    std::vector<std::pair<std::string, std::string>> near_degenerate;
};

inline StabilityRanking stability_ranking(const std::map<std::string, double>& energies,
                                          double degeneracy_tol = 1e-3) {
    if (energies.empty()) fail_domain("nothing to rank");
    if (!(degeneracy_tol >= 0.0)) fail_domain("degeneracy tolerance must be >= 0");
    StabilityRanking rank;
    rank.order.assign(energies.begin(), energies.end());
    std::sort(rank.order.begin(), rank.order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    for (std::size_t i = 0; i + 1 < rank.order.size(); ++i)
        if (std::fabs(rank.order[i + 1].second - rank.order[i].second) < degeneracy_tol)
            rank.near_degenerate.push_back({rank.order[i].first, rank.order[i + 1].first});
    return rank;
}

inline double energy_per_atom(double total_energy, long atom_count) {
    if (atom_count < 1) fail_domain("atom count must be positive, got " + std::to_string(atom_count));
    if (!std::isfinite(total_energy)) fail_domain("total energy is not finite");
    return total_energy / static_cast<double>(atom_count);
}

// Aligned summary in ledger order, relative energies at 4 decimals.
inline std::string formation_table(const EnergyLedger& ledger) {
    std::map<std::string, double> rel = relative_formation_energies(ledger);
    std::size_t name_w = 6;
    for (const auto& e : ledger.entries) name_w = std::max(name_w, e.name.size());
    auto pad = [](std::string s, std::size_t w) {
        while (s.size() < w) s += ' ';
        return s;
    };
    auto rpad = [](std::string s, std::size_t w) {
        while (s.size() < w) s.insert(s.begin(), ' ');
        return s;
    };
    std::string out = pad("system", name_w) + rpad("E_R (eV)", 12) + "\n";
    for (const auto& e : ledger.entries)
        out += pad(e.name, name_w) + rpad(fmt_fixed(rel[e.name], 4), 12) + "\n";
    return out;
}

// --- ledger file I/O -----------------------------------------------------------
//
//   {"pristine_E_T": <num>, "entries": {<name>: <energy>, ...}, "reference": <name>}
//
// pristine_E_T and reference are optional; entry order in the file is kept.

inline std::string ledger_to_json_text(const EnergyLedger& ledger) {
    std::string out = "{\n";
    if (ledger.has_pristine)
        out += "  \"pristine_E_T\": " + fmt_g12(ledger.pristine_energy) + ",\n";
    out += "  \"entries\": {\n";
    for (std::size_t i = 0; i < ledger.entries.size(); ++i) {
        const auto& e = ledger.entries[i];
        out += "    \"" + detail::json_escape(e.name) + "\": " + fmt_g12(e.energy);
        out += i + 1 < ledger.entries.size() ? ",\n" : "\n";
    }
    out += "  }";
    if (!ledger.reference.empty())
        out += ",\n  \"reference\": \"" + detail::json_escape(ledger.reference) + "\"";
    out += "\n}\n";
    return out;
}

inline void write_energy_ledger(const EnergyLedger& ledger, const std::string& path) {
    validate_ledger(ledger);
    detail::write_text_file(path, ledger_to_json_text(ledger));
}

inline EnergyLedger ledger_from_json_text(const std::string& text, const std::string& source) {
    // ordered parse so table rows keep the author's entry order
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        fail_parse(source + ":" + std::to_string(detail::line_of_byte(text, ex.byte)) +
                   ": " + ex.what());
    }
    if (!j.is_object() || !j.contains("entries"))
        fail_parse(source + ": energy ledger needs an 'entries' object");
    EnergyLedger ledger;
    if (j.contains("pristine_E_T")) {
        if (!j["pristine_E_T"].is_number())
            fail_parse(source + ": 'pristine_E_T' must be a number");
        ledger.pristine_energy = j["pristine_E_T"].get<double>();
        ledger.has_pristine = true;
    }
    if (!j["entries"].is_object()) fail_parse(source + ": 'entries' must be an object");
    for (const auto& [name, jv] : j["entries"].items()) {
        if (!jv.is_number())
            fail_parse(source + ": energy of '" + name + "' must be a number");
        ledger.entries.push_back({name, jv.get<double>()});
    }
    if (j.contains("reference")) {
        if (!j["reference"].is_string()) fail_parse(source + ": 'reference' must be a string");
        ledger.reference = j["reference"].get<std::string>();
    }
    validate_ledger(ledger);
    if (!ledger.reference.empty()) reference_entry(ledger); // must resolve
    return ledger;
}

inline EnergyLedger read_energy_ledger(const std::string& path) {
    return ledger_from_json_text(detail::read_text_file(path), path);
}

} // namespace polydef
