#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "deck.hpp"
#include "defects.hpp"

namespace polydef {

// Everything a full pipeline run needs, so a result is reproducible from one
// file. Either an existing structure file or polytype build parameters; the
// band stage takes exactly one of a hopping-parameter file or a synthetic
// band spec.
struct RunManifest {
    std::string structure_path;              // read when set, build otherwise
    std::string stacking = "ABCB";
    double a = 3.09;                         // angstrom
    double c = 0.0;                          // 0: ideal for the layer count
    std::array<int, 3> supercell{1, 1, 1};
    std::string defect;                      // empty: pristine run
    std::optional<long> remove_site;
    std::string kpath_labels = "G-M-K-G-A-L-H-A";
    int kpath_total = 113;
    DeckSettings deck;
    std::string bands_model;                 // hopping parameters
    std::string bands_spec;                  // synthetic band spec
    std::optional<long> electrons;
    double sigma = 0.05;                     // eV, DOS smearing
    double delta = 0.2;                      // eV, flat-band threshold
    long grid = 800;                         // DOS grid points
    std::optional<std::pair<double, double>> flat_window;
    std::string output_dir = "out";
};

inline void validate_manifest(const RunManifest& m) {
    if (m.structure_path.empty()) {
        validate_stacking(m.stacking);
        if (!(m.a > 0.0)) fail_domain("lattice constant a must be positive");
        if (m.c != 0.0 && !(m.c > 0.0)) fail_domain("lattice constant c must be positive");
    }
    for (int n : m.supercell)
        if (n < 1) fail_domain("supercell multipliers must be >= 1");
    if (!m.defect.empty()) defect_kind_from_string(m.defect);
    if (m.kpath_total < 2) fail_domain("k-path total must be >= 2");
    validate_deck_settings(m.deck);
    if (!m.bands_model.empty() && !m.bands_spec.empty())
        fail_domain("bands.model and bands.spec are mutually exclusive");
    if (!(m.sigma > 0.0)) fail_domain("sigma must be positive");
    if (!(m.delta > 0.0)) fail_domain("delta must be positive");
    if (m.grid < 2) fail_domain("DOS grid needs at least 2 points");
    if (m.flat_window && !(m.flat_window->first < m.flat_window->second))
        fail_domain("flat-band window is empty");
    if (m.output_dir.empty()) fail_domain("output directory is empty");
}

inline RunManifest manifest_from_json_text(const std::string& text, const std::string& source) {
    nlohmann::json j = detail::parse_json_text(text, source);
    if (!j.is_object()) fail_parse(source + ": manifest must be an object");
    RunManifest m;
    auto text_field = [&](const char* key, std::string& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) fail_parse(source + ": '" + std::string(key) + "' must be a string");
        slot = j[key].get<std::string>();
    };
    auto num_field = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) fail_parse(source + ": '" + std::string(key) + "' must be a number");
        slot = j[key].get<double>();
    };
    auto int_field = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer())
            fail_parse(source + ": '" + std::string(key) + "' must be an integer");
        slot = j[key].get<long>();
    };
    text_field("structure", m.structure_path);
    text_field("stacking", m.stacking);
    num_field("a", m.a);
    num_field("c", m.c);
    if (j.contains("supercell")) {
        const auto& sj = j["supercell"];
        if (!sj.is_array() || sj.size() != 3)
            fail_parse(source + ": 'supercell' must be an array of 3 integers");
        for (int i = 0; i < 3; ++i) {
            if (!sj[i].is_number_integer())
                fail_parse(source + ": 'supercell' must be an array of 3 integers");
            m.supercell[i] = sj[i].get<int>();
        }
    }
    text_field("defect", m.defect);
    if (j.contains("remove_site")) {
        if (!j["remove_site"].is_number_integer())
            fail_parse(source + ": 'remove_site' must be an integer");
        m.remove_site = j["remove_site"].get<long>();
    }
    if (j.contains("kpath")) {
        const auto& kj = j["kpath"];
        if (!kj.is_object()) fail_parse(source + ": 'kpath' must be an object");
        if (kj.contains("labels")) {
            if (!kj["labels"].is_string()) fail_parse(source + ": 'kpath.labels' must be a string");
            m.kpath_labels = kj["labels"].get<std::string>();
        }
        if (kj.contains("total")) {
            if (!kj["total"].is_number_integer())
                fail_parse(source + ": 'kpath.total' must be an integer");
            m.kpath_total = kj["total"].get<int>();
        }
    }
    if (j.contains("deck")) m.deck = deck_settings_from_json(j["deck"], source);
    if (j.contains("bands")) {
        const auto& bj = j["bands"];
        if (!bj.is_object()) fail_parse(source + ": 'bands' must be an object");
        if (bj.contains("model")) {
            if (!bj["model"].is_string()) fail_parse(source + ": 'bands.model' must be a string");
            m.bands_model = bj["model"].get<std::string>();
        }
        if (bj.contains("spec")) {
            if (!bj["spec"].is_string()) fail_parse(source + ": 'bands.spec' must be a string");
            m.bands_spec = bj["spec"].get<std::string>();
        }
        if (bj.contains("electrons")) {
            if (!bj["electrons"].is_number_integer())
                fail_parse(source + ": 'bands.electrons' must be an integer");
            m.electrons = bj["electrons"].get<long>();
        }
    }
    if (j.contains("analysis")) {
        const auto& aj = j["analysis"];
        if (!aj.is_object()) fail_parse(source + ": 'analysis' must be an object");
        auto anum = [&](const char* key, double& slot) {
            if (!aj.contains(key)) return;
            if (!aj[key].is_number())
                fail_parse(source + ": 'analysis." + std::string(key) + "' must be a number");
            slot = aj[key].get<double>();
        };
        anum("sigma", m.sigma);
        anum("delta", m.delta);
        if (aj.contains("grid")) {
            if (!aj["grid"].is_number_integer())
                fail_parse(source + ": 'analysis.grid' must be an integer");
            m.grid = aj["grid"].get<long>();
        }
        if (aj.contains("window")) {
            const auto& wj = aj["window"];
            if (!wj.is_array() || wj.size() != 2 || !wj[0].is_number() || !wj[1].is_number())
                fail_parse(source + ": 'analysis.window' must be an array of 2 numbers");
            m.flat_window = {wj[0].get<double>(), wj[1].get<double>()};
        }
    }
    text_field("output_dir", m.output_dir);
    validate_manifest(m);
    return m;
}

inline RunManifest read_run_manifest(const std::string& path) {
    return manifest_from_json_text(detail::read_text_file(path), path);
}

} // namespace polydef
