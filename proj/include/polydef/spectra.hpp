#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crystal.hpp"
#include "geometry.hpp"
#include "numio.hpp"
#include "parallel.hpp"

namespace polydef {

inline constexpr double ry_in_ev = 13.605693;
inline constexpr double ev_um_product = 1.23984193; // E[eV] * lambda[um]

struct EigKPoint {
    Vec3 frac;
    double weight = 1.0;
    double s = 0.0; // cumulative path distance if joined with a k-path
};

struct EigenvalueSet {
    std::vector<EigKPoint> kpoints;
    std::vector<std::vector<double>> bands; // bands[k], ascending within each k
    long electrons = 0;
    int spin_degeneracy = 2;
    std::string reference;                // energy-zero note, e.g. "VBM"
    std::vector<std::string> warnings;    // collected while loading

    std::size_t n_k() const { return kpoints.size(); }
    std::size_t n_bands() const { return bands.empty() ? 0 : bands[0].size(); }

    double weight_sum() const {
        double sum = 0.0;
        for (const auto& k : kpoints) sum += k.weight;
        return sum;
    }
    bool weights_normalized() const { return std::fabs(weight_sum() - 1.0) <= 1e-9; }
};

struct FlatBand {
    std::size_t band = 0;
    double mean = 0.0;
    double bandwidth = 0.0;
};

struct BandAnalysis {
    std::size_t n_occ = 0;
    double vbm = 0.0;
    double cbm = 0.0;
    double gap = 0.0;
    std::size_t vbm_k = 0;
    std::size_t cbm_k = 0;
    std::vector<FlatBand> flat_bands;
};

struct DosCurve {
    std::vector<double> grid;   // eV, uniform
    std::vector<double> values; // states/eV
    double sigma = 0.0;
};

struct ConvergenceReport {
    long iterations = 0; // iteration reaching the threshold, or the last one
    std::vector<double> residuals;
    double threshold = 0.0;
    long max_iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
};

inline void validate_eigenvalue_set(const EigenvalueSet& set, const std::string& source) {
    if (set.kpoints.empty()) fail_domain(source + ": no k-points");
    if (set.bands.size() != set.kpoints.size())
        fail_domain(source + ": band rows do not match k-point count");
    std::size_t nb = set.bands[0].size();
    for (std::size_t k = 0; k < set.bands.size(); ++k) {
        if (set.bands[k].size() != nb)
            fail_domain(source + ": k-point " + std::to_string(k) + " has " +
                        std::to_string(set.bands[k].size()) + " bands, expected " +
                        std::to_string(nb));
        if (!std::is_sorted(set.bands[k].begin(), set.bands[k].end()))
            fail_domain(source + ": eigenvalues not ascending at k-point " + std::to_string(k));
    }
    for (std::size_t k = 0; k < set.kpoints.size(); ++k)
        if (!(set.kpoints[k].weight > 0.0))
            fail_domain(source + ": non-positive weight at k-point " + std::to_string(k));
    if (set.spin_degeneracy != 1 && set.spin_degeneracy != 2)
        fail_domain(source + ": spin degeneracy must be 1 or 2");
    if (set.electrons < 0) fail_domain(source + ": negative electron count");
}

// --- eigenvalue file format -------------------------------------------------
//
//   # nk=<int> nbands=<int> electrons=<int> spin=<int> units=eV
//   k <index> <fx> <fy> <fz> <weight>
//   <nbands eigenvalues, any wrapping>
//   ...
//
// '#' starts a comment anywhere; an optional "# reference=<note>" comment
// carries the energy-zero note.

inline std::string eigenvalues_to_text(const EigenvalueSet& set) {
    std::string out = "# nk=" + std::to_string(set.n_k()) +
                      " nbands=" + std::to_string(set.n_bands()) +
                      " electrons=" + std::to_string(set.electrons) +
                      " spin=" + std::to_string(set.spin_degeneracy) + " units=eV\n";
    if (!set.reference.empty()) out += "# reference=" + set.reference + "\n";
    for (std::size_t k = 0; k < set.n_k(); ++k) {
        const auto& kp = set.kpoints[k];
        out += "k " + std::to_string(k) + " " + fmt_g12(kp.frac.x) + " " + fmt_g12(kp.frac.y) +
               " " + fmt_g12(kp.frac.z) + " " + fmt_g12(kp.weight) + "\n";
        for (std::size_t n = 0; n < set.bands[k].size(); ++n) {
            out += fmt_g12(set.bands[k][n]);
            out += ((n + 1) % 8 == 0 || n + 1 == set.bands[k].size()) ? "\n" : " ";
        }
    }
    return out;
}

inline void write_eigenvalues(const EigenvalueSet& set, const std::string& path) {
    detail::write_text_file(path, eigenvalues_to_text(set));
}

inline EigenvalueSet eigenvalues_from_text(const std::string& text, const std::string& source) {
    EigenvalueSet set;
    long nk = -1, nbands = -1;
    bool have_header = false;

    // header and reference ride in comment lines
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash == std::string::npos) continue;
        std::string body = line.substr(hash + 1);
        std::istringstream ss(body);
        std::string tok;
        std::vector<std::string> tokens;
        while (ss >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (tokens[0].rfind("nk=", 0) == 0) {
            if (have_header) fail_parse(source + ":" + std::to_string(lineno) + ": duplicate header");
            bool have_nb = false, have_el = false, have_spin = false;
            for (const auto& t : tokens) {
                auto eq = t.find('=');
                if (eq == std::string::npos)
                    fail_parse(source + ":" + std::to_string(lineno) + ": bad header token '" + t + "'");
                std::string key = t.substr(0, eq), val = t.substr(eq + 1);
                char* end = nullptr;
                long v = std::strtol(val.c_str(), &end, 10);
                bool numeric = end == val.c_str() + val.size() && !val.empty();
                if (key == "nk" && numeric) nk = v;
                else if (key == "nbands" && numeric) { nbands = v; have_nb = true; }
                else if (key == "electrons" && numeric) { set.electrons = v; have_el = true; }
                else if (key == "spin" && numeric) { set.spin_degeneracy = static_cast<int>(v); have_spin = true; }
                else if (key == "units") {
                    if (val != "eV")
                        fail_domain(source + ":" + std::to_string(lineno) + ": unsupported units '" +
                                    val + "' (only eV)");
                } else
                    fail_parse(source + ":" + std::to_string(lineno) + ": bad header token '" + t + "'");
            }
            if (nk < 0 || !have_nb || !have_el || !have_spin)
                fail_parse(source + ":" + std::to_string(lineno) +
                           ": header needs nk=, nbands=, electrons=, spin=");
            have_header = true;
        } else if (tokens[0].rfind("reference=", 0) == 0) {
            set.reference = tokens[0].substr(10);
        }
    }
    if (!have_header)
        fail_parse(source + ": missing '# nk=... nbands=... electrons=... spin=...' header");
    if (nk < 1 || nbands < 1) fail_domain(source + ": nk and nbands must be positive");

    TokenScanner scan(text, source);
    for (long k = 0; k < nk; ++k) {
        scan.expect("k");
        long idx = scan.next_long();
        if (idx != k)
            scan.fail("expected k-point index " + std::to_string(k) + ", got " + std::to_string(idx));
        EigKPoint kp;
        kp.frac.x = scan.next_double();
        kp.frac.y = scan.next_double();
        kp.frac.z = scan.next_double();
        kp.weight = scan.next_double();
        if (!(kp.weight > 0.0))
            scan.fail("k-point " + std::to_string(k) + " weight must be positive");
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(nbands));
        for (long n = 0; n < nbands; ++n) {
            std::string peek = scan.peek();
            if (peek.empty() || peek == "k")
                scan.fail("k-point " + std::to_string(k) + " has " + std::to_string(n) +
                          " eigenvalues, expected " + std::to_string(nbands));
            row.push_back(scan.next_double());
        }
        if (!std::is_sorted(row.begin(), row.end())) {
            std::sort(row.begin(), row.end());
            set.warnings.push_back("eigenvalues at k-point " + std::to_string(k) +
                                   " were not ascending; sorted on load");
        }
        set.kpoints.push_back(kp);
        set.bands.push_back(std::move(row));
    }
    if (!scan.at_end()) scan.fail("trailing content after the last k-point block");
    validate_eigenvalue_set(set, source);
    return set;
}

inline EigenvalueSet parse_eigenvalues(const std::string& path) {
    return eigenvalues_from_text(detail::read_text_file(path), path);
}

// --- analyses ----------------------------------------------------------------

inline std::size_t occupied_band_count(const EigenvalueSet& set) {
    if (set.electrons % set.spin_degeneracy != 0)
        fail_domain("electron count " + std::to_string(set.electrons) +
                    " is not divisible by spin degeneracy " +
                    std::to_string(set.spin_degeneracy) + " (fractional occupation unsupported)");
    long n_occ = set.electrons / set.spin_degeneracy;
    if (n_occ < 1) fail_domain("no occupied bands (electrons = " + std::to_string(set.electrons) + ")");
    if (static_cast<std::size_t>(n_occ) >= set.n_bands())
        fail_domain("all " + std::to_string(set.n_bands()) +
                    " bands are occupied; no conduction band available");
    return static_cast<std::size_t>(n_occ);
}

inline BandAnalysis find_band_edges(const EigenvalueSet& set) {
    validate_eigenvalue_set(set, "eigenvalue set");
    BandAnalysis out;
    out.n_occ = occupied_band_count(set);
    out.vbm = set.bands[0][out.n_occ - 1];
    out.cbm = set.bands[0][out.n_occ];
    for (std::size_t k = 0; k < set.n_k(); ++k) {
        double v = set.bands[k][out.n_occ - 1];
        double c = set.bands[k][out.n_occ];
        if (v > out.vbm) {
            out.vbm = v;
            out.vbm_k = k;
        }
        if (c < out.cbm) {
            out.cbm = c;
            out.cbm_k = k;
        }
    }
    out.gap = out.cbm - out.vbm;
    return out;
}

// Shift so the valence band maximum is exactly zero; idempotent because the
// second shift subtracts an exact 0.
inline EigenvalueSet normalize_to_vbm(EigenvalueSet set) {
    double vbm = find_band_edges(set).vbm;
    for (auto& row : set.bands)
        for (double& e : row) e -= vbm;
    set.reference = "VBM";
    return set;
}

// Gap between the highest occupied and lowest unoccupied state of the full
// spectrum; with in-gap defect levels present this is the defect-limited
// gap, otherwise it reduces to the pristine gap.
inline double defect_gap(const EigenvalueSet& set) { return find_band_edges(set).gap; }

inline DosCurve compute_dos(const EigenvalueSet& set, double e_min, double e_max,
                            std::size_t n_grid, double sigma) {
    validate_eigenvalue_set(set, "eigenvalue set");
    if (!(sigma > 0.0)) fail_domain("DOS smearing sigma must be positive");
    if (n_grid < 2) fail_domain("DOS grid needs at least 2 points");
    if (!(e_min < e_max)) fail_domain("DOS window is empty (e_min >= e_max)");
    DosCurve dos;
    dos.sigma = sigma;
    dos.grid.resize(n_grid);
    dos.values.assign(n_grid, 0.0);
    const double step = (e_max - e_min) / static_cast<double>(n_grid - 1);
    for (std::size_t i = 0; i < n_grid; ++i) dos.grid[i] = e_min + static_cast<double>(i) * step;
    const double prefactor = 1.0 / (sigma * std::sqrt(2.0 * pi));
    const double spin = set.spin_degeneracy;
    // each grid point is summed in the same fixed k-major order no matter
    // how the points are distributed over threads
    parallel_for(n_grid, [&](std::size_t i) {
        double e = dos.grid[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < set.n_k(); ++k) {
            double wk = set.kpoints[k].weight;
            double local = 0.0;
            for (double eps : set.bands[k]) {
                double x = (e - eps) / sigma;
                local += std::exp(-0.5 * x * x);
            }
            acc += wk * local;
        }
        dos.values[i] = spin * prefactor * acc;
    });
    return dos;
}

inline double dos_integral(const DosCurve& dos) {
    if (dos.grid.size() < 2) return 0.0;
    std::vector<double> panels(dos.grid.size() - 1);
    for (std::size_t i = 0; i + 1 < dos.grid.size(); ++i)
        panels[i] = 0.5 * (dos.values[i] + dos.values[i + 1]) * (dos.grid[i + 1] - dos.grid[i]);
    return pairwise_sum(panels);
}

// Bands whose total dispersion stays below delta and whose mean energy lies
// strictly inside the window.
inline std::vector<FlatBand> detect_flat_bands(const EigenvalueSet& set, double window_lo,
                                               double window_hi, double delta) {
    validate_eigenvalue_set(set, "eigenvalue set");
    if (!(delta > 0.0)) fail_domain("flat-band threshold delta must be positive");
    if (!(window_lo < window_hi)) fail_domain("flat-band search window is empty");
    std::vector<FlatBand> flagged;
    for (std::size_t n = 0; n < set.n_bands(); ++n) {
        double lo = set.bands[0][n], hi = lo, sum = 0.0;
        for (std::size_t k = 0; k < set.n_k(); ++k) {
            double e = set.bands[k][n];
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            sum += e;
        }
        double mean = sum / static_cast<double>(set.n_k());
        if (hi - lo < delta && mean > window_lo && mean < window_hi)
            flagged.push_back({n, mean, hi - lo});
    }
    return flagged;
}

inline double ev_to_wavelength_um(double e_ev) {
    if (!(e_ev > 0.0)) fail_domain("photon energy must be positive, got " + fmt_g12(e_ev));
    return ev_um_product / e_ev;
}

inline double wavelength_um_to_ev(double lambda_um) {
    if (!(lambda_um > 0.0)) fail_domain("wavelength must be positive, got " + fmt_g12(lambda_um));
    return ev_um_product / lambda_um;
}

// --- convergence log ----------------------------------------------------------
//
// One line per SCF step: "iter <n> dE <value> Ry".

inline ConvergenceReport audit_convergence_text(const std::string& text, const std::string& source,
                                                double threshold, long max_iterations) {
    if (!(threshold > 0.0)) fail_domain("convergence threshold must be positive");
    if (max_iterations < 1) fail_domain("max_iterations must be at least 1");
    ConvergenceReport rep;
    rep.threshold = threshold;
    rep.max_iterations = max_iterations;
    TokenScanner scan(text, source);
    long prev_iter = 0;
    std::vector<long> iters;
    while (!scan.at_end()) {
        scan.expect("iter");
        long n = scan.next_long();
        if (n <= prev_iter)
            scan.fail("iteration numbering not increasing (" + std::to_string(prev_iter) + " then " +
                      std::to_string(n) + ")");
        prev_iter = n;
        scan.expect("dE");
        double v = scan.next_double();
        scan.expect("Ry");
        iters.push_back(n);
        rep.residuals.push_back(std::fabs(v));
    }
    if (rep.residuals.empty()) fail_parse(source + ": empty convergence log");
    rep.final_residual = rep.residuals.back();
    rep.iterations = iters.back();
    for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
        if (iters[i] > max_iterations) break;
        if (rep.residuals[i] < threshold) { // strictly below
            rep.converged = true;
            rep.iterations = iters[i];
            break;
        }
    }
    return rep;
}

inline ConvergenceReport audit_convergence(const std::string& path, double threshold,
                                           long max_iterations) {
    return audit_convergence_text(detail::read_text_file(path), path, threshold, max_iterations);
}

} // namespace polydef
