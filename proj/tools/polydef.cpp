// polydef: point-defect band-structure workflow for hexagonal SiC polytypes.
// Subcommands cover the pipeline from structure generation to plots; every
// stage reads and writes plain files, so runs are scriptable and replayable.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <polydef/bz.hpp>
#include <polydef/crystal.hpp>
#include <polydef/deck.hpp>
#include <polydef/defects.hpp>
#include <polydef/energetics.hpp>
#include <polydef/manifest.hpp>
#include <polydef/modelbands.hpp>
#include <polydef/plots.hpp>
#include <polydef/spectra.hpp>

namespace fs = std::filesystem;
using namespace polydef;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag/subcommand, malformed flag value)\n"
    "  3  file I/O error\n"
    "  4  input file parse error\n"
    "  5  domain violation or failed lookup\n"
    "  6  audit: run did not converge\n";

int exit_code_for(errc code) {
    switch (code) {
        case errc::io: return 3;
        case errc::parse: return 4;
        case errc::domain:
        case errc::not_found: return 5;
    }
    return 1;
}

std::string single_line(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r') c = ';';
    return msg;
}

// Flags win over the manifest, the manifest over built-in defaults.
RunManifest manifest_defaults(const std::string& path) {
    return path.empty() ? RunManifest{} : read_run_manifest(path);
}

LatticeCell cell_from_flags(const CLI::App& sub, const std::string& in, double a, double c,
                            const std::string& stacking) {
    if (sub.count("--in")) return read_structure(in).cell;
    if (!(a > 0.0)) fail_domain("kpath needs --in or a positive --a");
    return make_hexagonal_cell(a, c > 0.0 ? c : ideal_c_for(a, stacking.size()));
}

std::string structure_summary(const CrystalStructure& s) {
    std::size_t h = 0, k = 0;
    for (const auto& site : s.sites)
        if (site.species == "Si") {
            if (site.site_class == SiteClass::h) ++h;
            if (site.site_class == SiteClass::k) ++k;
        }
    return std::to_string(s.sites.size()) + " atoms (" + std::to_string(s.count_species("Si")) +
           " Si, " + std::to_string(s.count_species("C")) + " C); Si layers: " +
           std::to_string(h) + " h, " + std::to_string(k) + " k";
}

std::string vertex_summary(const KPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.points.size(); ++i)
        if (!path.points[i].label.empty()) {
            if (!out.empty()) out += " ";
            out += path.points[i].label + ":" + std::to_string(i);
        }
    return out;
}

std::string analysis_report(const EigenvalueSet& set, double delta, bool have_window,
                            double win_lo, double win_hi, const std::string& defected_path) {
    std::string out;
    out += "k-points = " + std::to_string(set.n_k()) + "\n";
    out += "bands = " + std::to_string(set.n_bands()) + "\n";
    out += "electrons = " + std::to_string(set.electrons) + "\n";
    out += "spin degeneracy = " + std::to_string(set.spin_degeneracy) + "\n";
    BandAnalysis edges = find_band_edges(set);
    out += "vbm = " + fmt_g12(edges.vbm) + " eV (k " + std::to_string(edges.vbm_k) + ")\n";
    out += "cbm = " + fmt_g12(edges.cbm) + " eV (k " + std::to_string(edges.cbm_k) + ")\n";
    if (edges.gap > 0.0) {
        out += "gap = " + fmt_g12(edges.gap) + " eV\n";
        out += "transition wavelength = " + fmt_g12(ev_to_wavelength_um(edges.gap)) + " um\n";
    } else {
        out += "no positive gap\n";
    }
    // default: flag narrow bands over the whole spectrum; a window narrows the search
    double lo = win_lo, hi = win_hi;
    if (!have_window) {
        lo = edges.vbm;
        hi = edges.cbm;
        for (const auto& row : set.bands)
            for (double e : row) {
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
        lo -= 1.0;
        hi += 1.0;
    }
    auto flats = detect_flat_bands(set, lo, hi, delta);
    out += "flat bands (bandwidth < " + fmt_g12(delta) + " eV";
    if (have_window) out += ", mean in " + fmt_g12(lo) + ".." + fmt_g12(hi) + " eV";
    out += "): " + std::to_string(flats.size()) + "\n";
    for (const auto& f : flats)
        out += "  band " + std::to_string(f.band + 1) + ": mean " + fmt_g12(f.mean) +
               " eV, bandwidth " + fmt_g12(f.bandwidth) + " eV\n";
    if (!defected_path.empty()) {
        DefectedStructure d = read_defected(defected_path);
        double conc = doping_concentration(d);
        out += "Er concentration = " + fmt_g12(conc) + " (" + fmt_fixed(100.0 * conc, 2) +
               " %)\n";
    }
    return out;
}

EigenvalueSet solve_band_stage(const std::string& model_path, const std::string& spec_path,
                               const CrystalStructure* structure, const KPath& path,
                               long electrons_override, bool have_electrons) {
    if (!model_path.empty()) {
        if (!structure) fail_domain("hopping-model bands need a structure (--structure)");
        TBModel model = read_tb_model(model_path);
        std::optional<long> electrons;
        if (have_electrons) electrons = electrons_override;
        return tb_solve(*structure, model, path, electrons);
    }
    SyntheticBandSpec spec = read_synthetic_spec(spec_path);
    if (have_electrons) spec.electrons = electrons_override;
    return synthesize(spec, path);
}

// ---- subcommands ---------------------------------------------------------

struct BuildOpts {
    std::string manifest, stacking = "ABCB", out = "structure.json";
    double a = 3.09, c = 0.0;
};

void cmd_build(BuildOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--stacking")) o.stacking = m.stacking;
    if (!sub.count("--a")) o.a = m.a;
    if (!sub.count("--c")) o.c = m.c;
    double c = o.c > 0.0 ? o.c : ideal_c_for(o.a, o.stacking.size());
    CrystalStructure s = classify_sites(build_polytype(o.stacking, o.a, c));
    write_structure(s, o.out);
    std::cout << o.out << ": " << structure_summary(s) << "\n";
}

struct SupercellOpts {
    std::string manifest, in, out = "supercell.json";
    int n1 = 1, n2 = 1, n3 = 1;
};

void cmd_supercell(SupercellOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--n1")) o.n1 = m.supercell[0];
    if (!sub.count("--n2")) o.n2 = m.supercell[1];
    if (!sub.count("--n3")) o.n3 = m.supercell[2];
    Supercell sc = expand_supercell(read_structure(o.in), o.n1, o.n2, o.n3);
    write_supercell(sc, o.out);
    std::cout << o.out << ": " << sc.structure.sites.size() << " atoms (" << o.n1 << "x" << o.n2
              << "x" << o.n3 << ")\n";
}

struct DefectOpts {
    std::string manifest, in, kind, out = "defected.json";
    long remove_index = -1;
};

void cmd_defect(DefectOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--kind")) o.kind = m.defect;
    if (o.kind.empty()) fail_domain("defect needs --kind (or a manifest with one)");
    if (!sub.count("--remove-index") && m.remove_site) o.remove_index = *m.remove_site;
    std::optional<std::size_t> removal;
    if (o.remove_index >= 0) removal = static_cast<std::size_t>(o.remove_index);
    Supercell sc = read_supercell(o.in);
    DefectedStructure d = apply_defect(sc, defect_kind_from_string(o.kind), removal);
    write_defected(d, o.out);
    double conc = doping_concentration(d);
    std::cout << d.log << "\n";
    std::cout << o.out << ": " << d.structure.sites.size() << " atoms; Er concentration "
              << fmt_g12(conc) << " (" << fmt_fixed(100.0 * conc, 2) << " %)\n";
}

struct KpathOpts {
    std::string manifest, in, labels = "G-M-K-G-A-L-H-A", out = "path.kpath";
    double a = 0.0, c = 0.0;
    int total = 113;
};

void cmd_kpath(KpathOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--labels")) o.labels = m.kpath_labels;
    if (!sub.count("--total")) o.total = m.kpath_total;
    LatticeCell cell = cell_from_flags(sub, o.in, o.a, o.c, m.stacking);
    KPath path = build_kpath(cell, parse_path_labels(o.labels), o.total);
    write_kpath(path, o.out);
    std::cout << o.out << ": " << path.points.size() << " points; vertices "
              << vertex_summary(path) << "\n";
}

struct DeckOpts {
    std::string manifest, structure, kpath, functional, out = "deck.in";
    double tolerance = -1.0, hubbard_u = -1.0;
    long max_iter = -1;
    int scf_k = -1;
};

void cmd_deck(DeckOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    DeckSettings s = m.deck;
    if (sub.count("--tolerance")) s.scf_tolerance = o.tolerance;
    if (sub.count("--max-iter")) s.max_iterations = o.max_iter;
    if (sub.count("--hubbard-u")) s.hubbard_u = o.hubbard_u;
    if (sub.count("--scf-k")) s.scf_kpoints = o.scf_k;
    if (sub.count("--functional")) s.functional = o.functional;
    if (sub.count("--structure")) s.structure = o.structure;
    if (!o.kpath.empty()) {
        KPath path = read_kpath(o.kpath);
        write_deck(s, o.out, &path);
        std::cout << o.out << ": scf tolerance " << fmt_g12(s.scf_tolerance) << " Ry, max "
                  << s.max_iterations << " iterations, " << path.points.size()
                  << " nscf k-points\n";
    } else {
        write_deck(s, o.out);
        std::cout << o.out << ": scf tolerance " << fmt_g12(s.scf_tolerance) << " Ry, max "
                  << s.max_iterations << " iterations\n";
    }
}

struct BandsOpts {
    std::string manifest, structure, model, spec, kpath, out = "bands.eig";
    long electrons = 0;
};

void cmd_bands(BandsOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--model") && !sub.count("--spec")) {
        o.model = m.bands_model;
        o.spec = m.bands_spec;
    }
    if (!sub.count("--structure")) o.structure = m.structure_path;
    if (o.kpath.empty()) fail_domain("bands needs --kpath");
    if (o.model.empty() == o.spec.empty())
        fail_domain("bands needs exactly one of --model and --spec");
    bool have_electrons = sub.count("--electrons") > 0;
    if (!have_electrons && m.electrons) {
        o.electrons = *m.electrons;
        have_electrons = true;
    }
    KPath path = read_kpath(o.kpath);
    CrystalStructure structure;
    bool have_structure = !o.structure.empty();
    if (have_structure && !o.model.empty()) structure = read_structure(o.structure);
    EigenvalueSet set = solve_band_stage(o.model, o.spec, have_structure ? &structure : nullptr,
                                         path, o.electrons, have_electrons);
    write_eigenvalues(set, o.out);
    std::cout << o.out << ": " << set.n_k() << " k-points, " << set.n_bands() << " bands, "
              << set.electrons << " electrons\n";
}

struct AnalyzeOpts {
    std::string manifest, eig, defected;
    double delta = 0.2;
    std::vector<double> window;
};

void cmd_analyze(AnalyzeOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--delta")) o.delta = m.delta;
    bool have_window = !o.window.empty();
    double lo = 0.0, hi = 0.0;
    if (have_window) {
        lo = o.window[0];
        hi = o.window[1];
    } else if (m.flat_window) {
        have_window = true;
        lo = m.flat_window->first;
        hi = m.flat_window->second;
    }
    if (o.eig.empty()) fail_domain("analyze needs --eig");
    EigenvalueSet set = parse_eigenvalues(o.eig);
    std::cout << analysis_report(set, o.delta, have_window, lo, hi, o.defected);
}

struct DosOpts {
    std::string manifest, eig, out = "dos.csv", svg;
    double sigma = 0.05, emin = 0.0, emax = 0.0;
    long grid = 800;
};

void cmd_dos(DosOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--sigma")) o.sigma = m.sigma;
    if (!sub.count("--grid")) o.grid = m.grid;
    if (o.eig.empty()) fail_domain("dos needs --eig");
    EigenvalueSet set = parse_eigenvalues(o.eig);
    double lo = o.emin, hi = o.emax;
    if (!sub.count("--emin") || !sub.count("--emax")) {
        double mn = set.bands[0][0], mx = set.bands[0][0];
        for (const auto& row : set.bands)
            for (double e : row) {
                mn = std::min(mn, e);
                mx = std::max(mx, e);
            }
        if (!sub.count("--emin")) lo = mn - 6.0 * o.sigma;
        if (!sub.count("--emax")) hi = mx + 6.0 * o.sigma;
    }
    DosCurve dos = compute_dos(set, lo, hi, static_cast<std::size_t>(o.grid), o.sigma);
    write_dos_csv(dos, o.out);
    double expect = set.spin_degeneracy * static_cast<double>(set.n_bands()) * set.weight_sum();
    std::cout << o.out << ": " << dos.grid.size() << " points, sigma " << fmt_g12(o.sigma)
              << " eV, window " << fmt_g12(lo) << ".." << fmt_g12(hi) << " eV\n";
    std::cout << "integral = " << fmt_g12(dos_integral(dos)) << " states (expected "
              << fmt_g12(expect) << ")\n";
    if (!o.svg.empty()) {
        write_dos_svg(dos, o.svg);
        std::cout << o.svg << ": DOS figure\n";
    }
}

struct FormationOpts {
    std::string ledger, reference;
    double tol = 1e-3;
};

void cmd_formation(FormationOpts& o, const CLI::App& sub) {
    EnergyLedger ledger = read_energy_ledger(o.ledger);
    if (sub.count("--reference")) ledger.reference = o.reference;
    const EnergyEntry& ref = reference_entry(ledger);
    std::cout << "reference = " << ref.name << "\n";
    std::cout << formation_table(ledger);
    StabilityRanking rank = stability_ranking(relative_formation_energies(ledger), o.tol);
    std::cout << "most stable = " << rank.order.front().first << "\n";
    for (const auto& [a, b] : rank.near_degenerate)
        std::cout << "near degenerate: " << a << " ~ " << b << " (within " << fmt_g12(o.tol)
                  << " eV)\n";
}

struct PlotOpts {
    std::string eig, kpath, svg, csv, dos_svg, dos_csv;
    double sigma = 0.05;
    long grid = 800;
};

void cmd_plot(PlotOpts& o, const CLI::App&) {
    if (o.eig.empty()) fail_domain("plot needs --eig");
    if (o.svg.empty() && o.csv.empty() && o.dos_svg.empty() && o.dos_csv.empty())
        fail_domain("plot needs at least one output (--svg, --csv, --dos-svg, --dos-csv)");
    EigenvalueSet set = parse_eigenvalues(o.eig);
    std::vector<std::pair<std::string, double>> ticks;
    if (!o.kpath.empty()) {
        KPath path = read_kpath(o.kpath);
        attach_path_distances(set, path);
        ticks = path_ticks(path);
    }
    if (!o.csv.empty()) {
        write_band_csv(set, o.csv);
        std::cout << o.csv << ": band table\n";
    }
    if (!o.svg.empty()) {
        detail::write_text_file(o.svg, band_svg_text(set, ticks));
        std::cout << o.svg << ": band figure\n";
    }
    if (!o.dos_csv.empty() || !o.dos_svg.empty()) {
        double mn = set.bands[0][0], mx = set.bands[0][0];
        for (const auto& row : set.bands)
            for (double e : row) {
                mn = std::min(mn, e);
                mx = std::max(mx, e);
            }
        DosCurve dos = compute_dos(set, mn - 6.0 * o.sigma, mx + 6.0 * o.sigma,
                                   static_cast<std::size_t>(o.grid), o.sigma);
        if (!o.dos_csv.empty()) {
            write_dos_csv(dos, o.dos_csv);
            std::cout << o.dos_csv << ": DOS table\n";
        }
        if (!o.dos_svg.empty()) {
            write_dos_svg(dos, o.dos_svg);
            std::cout << o.dos_svg << ": DOS figure\n";
        }
    }
}

struct AuditOpts {
    std::string manifest, log;
    double threshold = 1e-4;
    long max_iter = 100;
};

int cmd_audit(AuditOpts& o, const CLI::App& sub) {
    RunManifest m = manifest_defaults(o.manifest);
    if (!sub.count("--threshold")) o.threshold = m.deck.scf_tolerance;
    if (!sub.count("--max-iter")) o.max_iter = m.deck.max_iterations;
    ConvergenceReport rep = audit_convergence(o.log, o.threshold, o.max_iter);
    std::cout << "converged = " << (rep.converged ? "yes" : "no") << "\n";
    std::cout << "iterations = " << rep.iterations << "\n";
    std::cout << "final residual = " << fmt_g12(rep.final_residual) << " Ry (threshold "
              << fmt_g12(rep.threshold) << " Ry)\n";
    return rep.converged ? 0 : 6;
}

struct RunOpts {
    std::string manifest, out;
};

void cmd_run(RunOpts& o, const CLI::App& sub) {
    RunManifest m = read_run_manifest(o.manifest);
    if (sub.count("--out")) m.output_dir = o.out;
    if (m.bands_model.empty() && m.bands_spec.empty())
        fail_domain("manifest needs one of bands.model and bands.spec");
    fs::create_directories(m.output_dir);
    auto at = [&](const std::string& name) { return (fs::path(m.output_dir) / name).string(); };

    CrystalStructure unit = m.structure_path.empty()
                                ? classify_sites(build_polytype(
                                      m.stacking, m.a,
                                      m.c > 0.0 ? m.c : ideal_c_for(m.a, m.stacking.size())))
                                : read_structure(m.structure_path);
    write_structure(unit, at("structure.json"));
    std::cout << at("structure.json") << ": " << structure_summary(unit) << "\n";

    Supercell sc = expand_supercell(unit, m.supercell[0], m.supercell[1], m.supercell[2]);
    write_supercell(sc, at("supercell.json"));
    std::cout << at("supercell.json") << ": " << sc.structure.sites.size() << " atoms\n";

    CrystalStructure band_structure = sc.structure;
    std::string defected_path;
    if (!m.defect.empty()) {
        std::optional<std::size_t> removal;
        if (m.remove_site) removal = static_cast<std::size_t>(*m.remove_site);
        DefectedStructure d = apply_defect(sc, defect_kind_from_string(m.defect), removal);
        defected_path = at("defected.json");
        write_defected(d, defected_path);
        std::cout << defected_path << ": " << d.log << "\n";
        band_structure = d.structure;
    }

    KPath path = build_kpath(band_structure.cell, parse_path_labels(m.kpath_labels),
                             m.kpath_total);
    write_kpath(path, at("path.kpath"));
    std::cout << at("path.kpath") << ": " << path.points.size() << " points\n";

    DeckSettings deck = m.deck;
    deck.structure = defected_path.empty() ? "supercell.json" : "defected.json";
    write_deck(deck, at("deck.in"), &path);
    std::cout << at("deck.in") << ": input deck\n";

    EigenvalueSet set = solve_band_stage(m.bands_model, m.bands_spec, &band_structure, path,
                                         m.electrons ? *m.electrons : 0, m.electrons.has_value());
    write_eigenvalues(set, at("bands.eig"));
    std::cout << at("bands.eig") << ": " << set.n_k() << " k-points, " << set.n_bands()
              << " bands\n";

    write_band_csv(set, at("bands.csv"));
    detail::write_text_file(at("bands.svg"), band_svg_text(set, path_ticks(path)));

    double mn = set.bands[0][0], mx = set.bands[0][0];
    for (const auto& row : set.bands)
        for (double e : row) {
            mn = std::min(mn, e);
            mx = std::max(mx, e);
        }
    DosCurve dos = compute_dos(set, mn - 6.0 * m.sigma, mx + 6.0 * m.sigma,
                               static_cast<std::size_t>(m.grid), m.sigma);
    write_dos_csv(dos, at("dos.csv"));
    write_dos_svg(dos, at("dos.svg"));
    std::cout << at("dos.csv") << ": integral " << fmt_g12(dos_integral(dos)) << " states\n";

    bool have_window = m.flat_window.has_value();
    std::string report =
        analysis_report(set, m.delta, have_window, have_window ? m.flat_window->first : 0.0,
                        have_window ? m.flat_window->second : 0.0, defected_path);
    detail::write_text_file(at("analysis.txt"), report);
    std::cout << report;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "polydef: hexagonal-SiC point-defect band workflow\n"
        "Pipeline: build -> supercell -> defect -> kpath -> deck -> bands -> analyze/dos/plot.\n"
        "POLYDEF_THREADS caps internal parallelism (default: hardware threads)."};
    app.require_subcommand(1);
    app.footer(kExitCodes);
    int rc = 0;

    auto* b = app.add_subcommand("build", "construct a polytype unit cell from a stacking code");
    auto bo = std::make_shared<BuildOpts>();
    b->add_option("--manifest", bo->manifest, "manifest supplying defaults");
    b->add_option("--stacking", bo->stacking, "close-packing letters")->capture_default_str();
    b->add_option("--a", bo->a, "in-plane lattice constant, angstrom")->capture_default_str();
    b->add_option("--c", bo->c, "stacking-axis constant, angstrom (0: ideal)")
        ->capture_default_str();
    b->add_option("-o,--out", bo->out, "output structure file")->capture_default_str();
    b->callback([bo, b] { cmd_build(*bo, *b); });

    auto* sc = app.add_subcommand("supercell", "replicate a structure n1 x n2 x n3");
    auto so = std::make_shared<SupercellOpts>();
    sc->add_option("--manifest", so->manifest, "manifest supplying defaults");
    sc->add_option("--in", so->in, "input structure file")->required();
    sc->add_option("--n1", so->n1, "multiplier along a1")->capture_default_str();
    sc->add_option("--n2", so->n2, "multiplier along a2")->capture_default_str();
    sc->add_option("--n3", so->n3, "multiplier along a3")->capture_default_str();
    sc->add_option("-o,--out", so->out, "output supercell file")->capture_default_str();
    sc->callback([so, sc] { cmd_supercell(*so, *sc); });

    auto* df = app.add_subcommand("defect", "substitute Er into a supercell, optionally with a "
                                            "carbon vacancy");
    auto dfo = std::make_shared<DefectOpts>();
    df->add_option("--manifest", dfo->manifest, "manifest supplying defaults");
    df->add_option("--in", dfo->in, "input supercell file")->required();
    df->add_option("--kind", dfo->kind, "ErH, ErK, ErHV or ErKV");
    df->add_option("--remove-index", dfo->remove_index,
                   "site index to remove instead of the nearest carbon");
    df->add_option("-o,--out", dfo->out, "output structure file")->capture_default_str();
    df->callback([dfo, df] { cmd_defect(*dfo, *df); });

    auto* kp = app.add_subcommand("kpath", "sample a high-symmetry path through the hexagonal "
                                           "Brillouin zone");
    auto ko = std::make_shared<KpathOpts>();
    kp->add_option("--manifest", ko->manifest, "manifest supplying defaults");
    kp->add_option("--in", ko->in, "structure file providing the cell");
    kp->add_option("--a", ko->a, "in-plane lattice constant when no --in");
    kp->add_option("--c", ko->c, "stacking-axis constant when no --in (0: ideal)");
    kp->add_option("--labels", ko->labels, "vertex labels, e.g. G-M-K-G-A-L-H-A")
        ->capture_default_str();
    kp->add_option("--total", ko->total, "total number of k-points")->capture_default_str();
    kp->add_option("-o,--out", ko->out, "output k-path file")->capture_default_str();
    kp->callback([ko, kp] { cmd_kpath(*ko, *kp); });

    auto* dk = app.add_subcommand("deck", "emit a ground-state input deck for an external "
                                          "engine");
    auto dko = std::make_shared<DeckOpts>();
    dk->add_option("--manifest", dko->manifest, "manifest supplying defaults");
    dk->add_option("--structure", dko->structure, "structure file the deck refers to");
    dk->add_option("--kpath", dko->kpath, "k-path file for the nscf block");
    dk->add_option("--tolerance", dko->tolerance, "scf tolerance, Ry (default 0.0001)");
    dk->add_option("--max-iter", dko->max_iter, "scf iteration cap (default 100)");
    dk->add_option("--hubbard-u", dko->hubbard_u, "Hubbard U metadata, eV (default 7.21)");
    dk->add_option("--scf-k", dko->scf_k, "ground-state k-point count (default 2)");
    dk->add_option("--functional", dko->functional,
                   "exchange-correlation tag (default PBE-GGA+U)");
    dk->add_option("-o,--out", dko->out, "output deck file")->capture_default_str();
    dk->callback([dko, dk] { cmd_deck(*dko, *dk); });

    auto* bd = app.add_subcommand("bands", "eigenvalues along a k-path from a hopping model or "
                                           "a synthetic spec");
    auto bdo = std::make_shared<BandsOpts>();
    bd->add_option("--manifest", bdo->manifest, "manifest supplying defaults");
    bd->add_option("--structure", bdo->structure, "structure file (hopping model input)");
    bd->add_option("--model", bdo->model, "hopping-parameter file");
    bd->add_option("--spec", bdo->spec, "synthetic band spec file");
    bd->add_option("--kpath", bdo->kpath, "k-path file");
    bd->add_option("--electrons", bdo->electrons, "electron count override");
    bd->add_option("-o,--out", bdo->out, "output eigenvalue file")->capture_default_str();
    bd->callback([bdo, bd] { cmd_bands(*bdo, *bd); });

    auto* an = app.add_subcommand("analyze", "band edges, gap, flat levels and doping from an "
                                             "eigenvalue file");
    auto ano = std::make_shared<AnalyzeOpts>();
    an->add_option("--manifest", ano->manifest, "manifest supplying defaults");
    an->add_option("--eig", ano->eig, "eigenvalue file");
    an->add_option("--delta", ano->delta, "flat-band bandwidth threshold, eV")
        ->capture_default_str();
    an->add_option("--window", ano->window, "flat-band mean window, eV")->expected(2);
    an->add_option("--defected", ano->defected, "defected structure file for the doping line");
    an->callback([ano, an] { cmd_analyze(*ano, *an); });

    auto* ds = app.add_subcommand("dos", "smeared density of states from an eigenvalue file");
    auto dso = std::make_shared<DosOpts>();
    ds->add_option("--manifest", dso->manifest, "manifest supplying defaults");
    ds->add_option("--eig", dso->eig, "eigenvalue file");
    ds->add_option("--sigma", dso->sigma, "gaussian smearing width, eV")->capture_default_str();
    ds->add_option("--grid", dso->grid, "number of energy grid points")->capture_default_str();
    ds->add_option("--emin", dso->emin, "window start, eV (default: min - 6 sigma)");
    ds->add_option("--emax", dso->emax, "window end, eV (default: max + 6 sigma)");
    ds->add_option("-o,--out", dso->out, "output CSV file")->capture_default_str();
    ds->add_option("--svg", dso->svg, "optional DOS figure");
    ds->callback([dso, ds] { cmd_dos(*dso, *ds); });

    auto* fm = app.add_subcommand("formation", "relative energies and stability ranking from a "
                                               "ledger file");
    auto fmo = std::make_shared<FormationOpts>();
    fm->add_option("--ledger", fmo->ledger, "energy ledger file")->required();
    fm->add_option("--reference", fmo->reference, "reference entry override");
    fm->add_option("--tol", fmo->tol, "near-degeneracy threshold, eV")->capture_default_str();
    fm->callback([fmo, fm] { cmd_formation(*fmo, *fm); });

    auto* pl = app.add_subcommand("plot", "CSV tables and SVG figures from an eigenvalue file");
    auto plo = std::make_shared<PlotOpts>();
    pl->add_option("--eig", plo->eig, "eigenvalue file");
    pl->add_option("--kpath", plo->kpath, "k-path file for distances and vertex ticks");
    pl->add_option("--svg", plo->svg, "band figure output");
    pl->add_option("--csv", plo->csv, "band table output");
    pl->add_option("--dos-svg", plo->dos_svg, "DOS figure output");
    pl->add_option("--dos-csv", plo->dos_csv, "DOS table output");
    pl->add_option("--sigma", plo->sigma, "DOS smearing width, eV")->capture_default_str();
    pl->add_option("--grid", plo->grid, "DOS grid points")->capture_default_str();
    pl->callback([plo, pl] { cmd_plot(*plo, *pl); });

    auto* au = app.add_subcommand("audit", "check a self-consistency log against the tolerance");
    auto auo = std::make_shared<AuditOpts>();
    au->add_option("--manifest", auo->manifest, "manifest supplying defaults");
    au->add_option("--log", auo->log, "convergence log file")->required();
    au->add_option("--threshold", auo->threshold, "residual threshold, Ry")
        ->capture_default_str();
    au->add_option("--max-iter", auo->max_iter, "iteration cap")->capture_default_str();
    au->callback([auo, au, &rc] { rc = cmd_audit(*auo, *au); });

    auto* rn = app.add_subcommand("run", "full pipeline from a manifest into an output "
                                         "directory");
    auto rno = std::make_shared<RunOpts>();
    rn->add_option("--manifest", rno->manifest, "run manifest")->required();
    rn->add_option("--out", rno->out, "output directory override");
    rn->callback([rno, rn] { cmd_run(*rno, *rn); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "polydef: usage: " << single_line(e.what()) << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "polydef: " << single_line(e.what()) << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "polydef: internal: " << single_line(e.what()) << "\n";
        return 1;
    }
    return rc;
}
