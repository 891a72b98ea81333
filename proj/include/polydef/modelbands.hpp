#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bz.hpp"
#include "crystal.hpp"
#include "parallel.hpp"
#include "spectra.hpp"

namespace polydef {

// --- analytic synthetic bands -------------------------------------------------

struct SyntheticBand {
    double base = 0.0;      // eV
    double amplitude = 0.0; // eV
    int mode = 0;           // cosine direction index
};

struct DefectLevel {
    double energy = 0.0; // eV
    double ripple = 0.0; // eV
};

struct SyntheticBandSpec {
    std::vector<SyntheticBand> bands;
    std::vector<DefectLevel> defect_levels;
    long electrons = 0;
    int spin_degeneracy = 2;
};

// Directions are restricted to combinations whose cosine reaches +1 at
// Gamma and -1 at one of M, A or L, so band extrema are sampled exactly on
// the standard hexagonal vertex set and closed-form edges hold.
inline Vec3 mode_direction(int mode) {
    static const Vec3 dirs[] = {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 1.0, 0.0},
                                {1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    if (mode < 0) fail_domain("band mode index must be >= 0");
    return dirs[mode % 6];
}

inline void validate_spec(const SyntheticBandSpec& spec) {
    for (const auto& b : spec.bands) {
        if (b.amplitude < 0.0) fail_domain("band amplitude must be >= 0");
        if (b.mode < 0) fail_domain("band mode index must be >= 0");
    }
    for (const auto& d : spec.defect_levels)
        if (d.ripple < 0.0) fail_domain("defect level ripple must be >= 0");
    if (spec.spin_degeneracy != 1 && spec.spin_degeneracy != 2)
        fail_domain("spin degeneracy must be 1 or 2");
    long capacity = spec.spin_degeneracy *
                    static_cast<long>(spec.bands.size() + spec.defect_levels.size());
    if (spec.electrons < 0) fail_domain("electron count must be >= 0");
    if (spec.electrons > capacity)
        fail_domain("electron count " + std::to_string(spec.electrons) + " exceeds the " +
                    std::to_string(capacity) + " available states");
}

inline EigenvalueSet synthesize(const SyntheticBandSpec& spec, const KPath& path) {
    validate_spec(spec);
    if (path.points.empty()) fail_domain("k-path has no points");
    EigenvalueSet set;
    set.electrons = spec.electrons;
    set.spin_degeneracy = spec.spin_degeneracy;
    const double w = 1.0 / static_cast<double>(path.points.size());
    for (const auto& p : path.points) {
        EigKPoint kp;
        kp.frac = p.frac;
        kp.weight = w;
        kp.s = p.s;
        std::vector<double> row;
        row.reserve(spec.bands.size() + spec.defect_levels.size());
        for (const auto& b : spec.bands)
            row.push_back(b.base +
                          b.amplitude * std::cos(two_pi * dot(p.frac, mode_direction(b.mode))));
        for (const auto& d : spec.defect_levels)
            row.push_back(d.energy + d.ripple * std::cos(two_pi * p.frac.x));
        std::sort(row.begin(), row.end());
        set.kpoints.push_back(kp);
        set.bands.push_back(std::move(row));
    }
    return set;
}

inline SyntheticBandSpec spec_from_json_text(const std::string& text, const std::string& source) {
    nlohmann::json j = detail::parse_json_text(text, source);
    if (!j.is_object() || !j.contains("bands"))
        fail_parse(source + ": synthetic spec needs a 'bands' array");
    SyntheticBandSpec spec;
    if (!j["bands"].is_array()) fail_parse(source + ": 'bands' must be an array");
    for (const auto& jb : j["bands"]) {
        SyntheticBand b;
        b.base = detail::require_number(jb, "base", source);
        b.amplitude = detail::require_number(jb, "amplitude", source);
        if (jb.contains("mode")) {
            if (!jb["mode"].is_number_integer()) fail_parse(source + ": band 'mode' must be an integer");
            b.mode = jb["mode"].get<int>();
        }
        spec.bands.push_back(b);
    }
    if (j.contains("defect_levels")) {
        if (!j["defect_levels"].is_array()) fail_parse(source + ": 'defect_levels' must be an array");
        for (const auto& jd : j["defect_levels"]) {
            DefectLevel d;
            d.energy = detail::require_number(jd, "energy", source);
            d.ripple = detail::require_number(jd, "ripple", source);
            spec.defect_levels.push_back(d);
        }
    }
    if (!j.contains("electrons") || !j["electrons"].is_number_integer())
        fail_parse(source + ": synthetic spec needs an integer 'electrons'");
    spec.electrons = j["electrons"].get<long>();
    if (j.contains("spin_degeneracy")) {
        if (!j["spin_degeneracy"].is_number_integer())
            fail_parse(source + ": 'spin_degeneracy' must be an integer");
        spec.spin_degeneracy = j["spin_degeneracy"].get<int>();
    }
    validate_spec(spec);
    return spec;
}

inline SyntheticBandSpec read_synthetic_spec(const std::string& path) {
    return spec_from_json_text(detail::read_text_file(path), path);
}

// --- Slater-Koster sp3 tight binding -------------------------------------------

struct OrbitalEnergies {
    double s = 0.0, px = 0.0, py = 0.0, pz = 0.0; // eV
};

struct SKParams {
    double ss_sigma = 0.0, sp_sigma = 0.0, pp_sigma = 0.0, pp_pi = 0.0; // eV
};

struct TBModel {
    std::map<std::string, OrbitalEnergies> onsite;
    std::map<std::string, SKParams> hoppings; // keyed "A-B"
    double cutoff = 0.0;                      // angstrom
    std::map<std::string, long> valence_electrons;
};

inline const OrbitalEnergies& onsite_for(const TBModel& model, const std::string& species) {
    auto it = model.onsite.find(species);
    if (it == model.onsite.end())
        fail_not_found("no onsite parameters for species '" + species + "'");
    return it->second;
}

inline const SKParams& sk_params(const TBModel& model, const std::string& a, const std::string& b) {
    auto it = model.hoppings.find(a + "-" + b);
    if (it == model.hoppings.end()) it = model.hoppings.find(b + "-" + a);
    if (it == model.hoppings.end())
        fail_not_found("no hopping parameters for species pair '" + a + "-" + b + "'");
    return it->second;
}

namespace detail {

// Two-center sp3 block for a bond along unit vector l (from atom i to atom
// j); rows/cols ordered s, px, py, pz. Orbitals on i index rows.
inline void sk_block(const SKParams& p, const Vec3& l, double out[4][4]) {
    out[0][0] = p.ss_sigma;
    const double lc[3] = {l.x, l.y, l.z};
    for (int a = 0; a < 3; ++a) {
        out[0][1 + a] = lc[a] * p.sp_sigma;  // s on i, p on j
        out[1 + a][0] = -lc[a] * p.sp_sigma; // p on i, s on j
        for (int b = 0; b < 3; ++b)
            out[1 + a][1 + b] = lc[a] * lc[b] * (p.pp_sigma - p.pp_pi) + (a == b ? p.pp_pi : 0.0);
    }
}

inline std::array<int, 3> image_search_range(const Mat3& cell, double cutoff) {
    double volume = std::fabs(cell.det());
    std::array<int, 3> range{};
    for (int i = 0; i < 3; ++i) {
        Vec3 u = cell.row((i + 1) % 3);
        Vec3 v = cell.row((i + 2) % 3);
        double height = volume / norm(cross(u, v));
        range[i] = static_cast<int>(std::ceil(cutoff / height)) + 1;
    }
    return range;
}

} // namespace detail

// Bloch Hamiltonian in the atom-major orbital basis (4 per atom), phase
// convention exp(i 2pi k.(r_j + R - r_i)) with everything in fractional
// coordinates.
inline Eigen::MatrixXcd bloch_hamiltonian(const CrystalStructure& s, const TBModel& model,
                                          const Vec3& kfrac) {
    if (!(model.cutoff > 0.0)) fail_domain("tight-binding cutoff must be positive");
    const std::size_t natoms = s.sites.size();
    if (natoms == 0) fail_domain("structure has no atoms");
    const std::size_t dim = 4 * natoms;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);

    for (std::size_t i = 0; i < natoms; ++i) {
        const auto& e = onsite_for(model, s.sites[i].species);
        H(4 * i + 0, 4 * i + 0) = e.s;
        H(4 * i + 1, 4 * i + 1) = e.px;
        H(4 * i + 2, 4 * i + 2) = e.py;
        H(4 * i + 3, 4 * i + 3) = e.pz;
    }

    auto range = detail::image_search_range(s.cell.vectors, model.cutoff);
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t i = 0; i < natoms; ++i)
        for (std::size_t j = 0; j < natoms; ++j) {
            const SKParams* params = nullptr; // resolved only if some image is in range
            for (int r1 = -range[0]; r1 <= range[0]; ++r1)
                for (int r2 = -range[1]; r2 <= range[1]; ++r2)
                    for (int r3 = -range[2]; r3 <= range[2]; ++r3) {
                        Vec3 dfrac = s.sites[j].frac - s.sites[i].frac +
                                     Vec3{static_cast<double>(r1), static_cast<double>(r2),
                                          static_cast<double>(r3)};
                        Vec3 dcart = mul(dfrac, s.cell.vectors);
                        double d = norm(dcart);
                        if (d < 1e-9 || d > model.cutoff) continue;
                        if (!params)
                            params = &sk_params(model, s.sites[i].species, s.sites[j].species);
                        double block[4][4];
                        detail::sk_block(*params, dcart / d, block);
                        std::complex<double> phase = std::exp(I * (two_pi * dot(kfrac, dfrac)));
                        for (int a = 0; a < 4; ++a)
                            for (int b = 0; b < 4; ++b)
                                H(4 * i + a, 4 * j + b) += block[a][b] * phase;
                    }
        }

    double herm = (H - H.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm < 1e-12))
        throw std::logic_error("Bloch Hamiltonian assembly lost Hermiticity (max |H - H^+| = " +
                               fmt_g12(herm) + ")");
    return H;
}

inline long electrons_for(const CrystalStructure& s, const TBModel& model) {
    long total = 0;
    for (const auto& site : s.sites) {
        auto it = model.valence_electrons.find(site.species);
        if (it == model.valence_electrons.end())
            fail_domain("no valence electron count for species '" + site.species +
                        "'; set valence_electrons in the parameter file or pass an explicit count");
        total += it->second;
    }
    return total;
}

// Per-k Hermitian eigensolve; k-points are independent and run in parallel,
// each writing its own slot so the assembled order never depends on timing.
inline EigenvalueSet tb_solve(const CrystalStructure& s, const TBModel& model, const KPath& path,
                              std::optional<long> electrons = std::nullopt) {
    if (path.points.empty()) fail_domain("k-path has no points");
    EigenvalueSet set;
    set.electrons = electrons ? *electrons : electrons_for(s, model);
    set.spin_degeneracy = 2;
    const std::size_t nk = path.points.size();
    const double w = 1.0 / static_cast<double>(nk);
    set.kpoints.resize(nk);
    set.bands.resize(nk);
    parallel_for(nk, [&](std::size_t k) {
        const auto& p = path.points[k];
        Eigen::MatrixXcd H = bloch_hamiltonian(s, model, p.frac);
        set.kpoints[k] = {p.frac, w, p.s};
        auto& row = set.bands[k];
        const Eigen::Index dim = H.rows();
        bool diagonal = true;
        for (Eigen::Index i = 0; i < dim && diagonal; ++i)
            for (Eigen::Index j = 0; j < dim && diagonal; ++j)
                if (i != j && H(i, j) != std::complex<double>(0.0, 0.0)) diagonal = false;
        if (diagonal) {
            // no hopping in range: the spectrum is the onsite energies, keep
            // them exact rather than round-tripping through the solver
            row.resize(static_cast<std::size_t>(dim));
            for (Eigen::Index i = 0; i < dim; ++i)
                row[static_cast<std::size_t>(i)] = H(i, i).real();
            std::sort(row.begin(), row.end());
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw std::logic_error("eigensolver failed at k-point " + std::to_string(k));
        row.resize(static_cast<std::size_t>(solver.eigenvalues().size()));
        for (std::size_t n = 0; n < row.size(); ++n)
            row[n] = solver.eigenvalues()[static_cast<Eigen::Index>(n)];
    });
    return set;
}

inline TBModel model_from_json_text(const std::string& text, const std::string& source) {
    nlohmann::json j = detail::parse_json_text(text, source);
    if (!j.is_object() || !j.contains("onsite") || !j.contains("hoppings") || !j.contains("cutoff"))
        fail_parse(source + ": parameter file needs 'onsite', 'hoppings' and 'cutoff'");
    TBModel model;
    if (!j["onsite"].is_object()) fail_parse(source + ": 'onsite' must be an object");
    for (const auto& [species, je] : j["onsite"].items()) {
        validate_species(species);
        OrbitalEnergies e;
        e.s = detail::require_number(je, "s", source);
        e.px = detail::require_number(je, "px", source);
        e.py = detail::require_number(je, "py", source);
        e.pz = detail::require_number(je, "pz", source);
        model.onsite[species] = e;
    }
    if (!j["hoppings"].is_object()) fail_parse(source + ": 'hoppings' must be an object");
    for (const auto& [pair, jp] : j["hoppings"].items()) {
        auto dash = pair.find('-');
        if (dash == std::string::npos)
            fail_parse(source + ": hopping key '" + pair + "' must be 'A-B'");
        validate_species(pair.substr(0, dash));
        validate_species(pair.substr(dash + 1));
        SKParams p;
        p.ss_sigma = detail::require_number(jp, "ss_sigma", source);
        p.sp_sigma = detail::require_number(jp, "sp_sigma", source);
        p.pp_sigma = detail::require_number(jp, "pp_sigma", source);
        p.pp_pi = detail::require_number(jp, "pp_pi", source);
        model.hoppings[pair] = p;
    }
    if (!j["cutoff"].is_number()) fail_parse(source + ": 'cutoff' must be a number");
    model.cutoff = j["cutoff"].get<double>();
    if (!(model.cutoff > 0.0)) fail_domain(source + ": cutoff must be positive");
    if (j.contains("valence_electrons")) {
        if (!j["valence_electrons"].is_object())
            fail_parse(source + ": 'valence_electrons' must be an object");
        for (const auto& [species, jn] : j["valence_electrons"].items()) {
            validate_species(species);
            if (!jn.is_number_integer())
                fail_parse(source + ": valence electron count for " + species +
                           " must be an integer");
            model.valence_electrons[species] = jn.get<long>();
        }
    }
    return model;
}

inline TBModel read_tb_model(const std::string& path) {
    return model_from_json_text(detail::read_text_file(path), path);
}

} // namespace polydef
