#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>

#include <polydef/deck.hpp>
#include <polydef/manifest.hpp>
#include <polydef/modelbands.hpp>
#include <polydef/plots.hpp>

#include "test_util.hpp"

using Catch::Approx;
using namespace polydef;

namespace {

struct CliResult {
    int code = -1;
    std::string out; // stdout + stderr
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    std::string capture = testutil::tmp_path("cli_capture_" + std::to_string(counter++) + ".txt");
    std::string cmd = env + (env.empty() ? "" : " ") + POLYDEF_CLI_PATH + " " + args + " > " +
                      capture + " 2>&1";
    int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testutil::read_file(capture);
    return r;
}

std::string data_file(const std::string& name) {
    return std::string(POLYDEF_DATA_DIR) + "/" + name;
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

KPath demo_path(int total = 23) {
    return build_kpath(make_hexagonal_cell(3.09, 10.08), {"Gamma", "M", "K", "Gamma"}, total);
}

} // namespace

TEST_CASE("command line covers the pipeline end to end") {
    auto p = [](const std::string& name) { return testutil::tmp_path("cli_" + name); };

    CliResult r = run_cli("build --stacking ABCB --a 3.09 --c 10.08 -o " + p("sic.json"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("8 atoms (4 Si, 4 C)"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("2 h, 2 k"));

    r = run_cli("supercell --in " + p("sic.json") + " --n1 4 --n2 4 --n3 1 -o " + p("super.json"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("128 atoms (4x4x1)"));

    r = run_cli("defect --in " + p("super.json") + " --kind ErKV -o " + p("erkv.json"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("Er substituted at site"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("C removed at site"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("127 atoms"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("0.0078125 (0.78 %)"));

    r = run_cli("kpath --in " + p("sic.json") + " --total 113 -o " + p("path.kpath"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("113 points"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring(
                            "Gamma:0 M:19 K:31 Gamma:53 A:59 L:78 H:90 A:112"));

    r = run_cli("deck --structure super.json --kpath " + p("path.kpath") + " -o " + p("deck.in"));
    REQUIRE(r.code == 0);
    std::string deck = testutil::read_file(p("deck.in"));
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("hubbard_u = 7.21  # eV"));
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("scf_tolerance = 0.0001  # Ry"));
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("nscf_kpoints = 113"));
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("begin kpoints"));

    r = run_cli("bands --spec " + data_file("erkv.spec.json") + " --kpath " + p("path.kpath") +
                " -o " + p("erkv.eig"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("113 k-points, 9 bands"));

    r = run_cli("analyze --eig " + p("erkv.eig") + " --defected " + p("erkv.json"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("gap = 1.06 eV"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("flat bands (bandwidth < 0.2 eV): 4"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("Er concentration = 0.0078125"));

    r = run_cli("dos --eig " + p("erkv.eig") + " -o " + p("dos.csv") + " --svg " + p("dos.svg"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("(expected 18)"));
    REQUIRE_THAT(testutil::read_file(p("dos.csv")),
                 Catch::Matchers::StartsWith("energy_eV,dos_per_eV\n"));
    REQUIRE_THAT(testutil::read_file(p("dos.svg")), Catch::Matchers::StartsWith("<svg"));

    r = run_cli("plot --eig " + p("erkv.eig") + " --kpath " + p("path.kpath") + " --svg " +
                p("bands.svg") + " --csv " + p("bands.csv"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(testutil::read_file(p("bands.csv")),
                 Catch::Matchers::StartsWith("s,band_1,band_2"));
    std::string svg = testutil::read_file(p("bands.svg"));
    REQUIRE_THAT(svg, Catch::Matchers::StartsWith("<svg"));
    REQUIRE(count_substr(svg, "<polyline") == 9);
    REQUIRE_THAT(svg, Catch::Matchers::ContainsSubstring("\xce\x93")); // Gamma tick

    r = run_cli("formation --ledger " + data_file("site_energies.json"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("reference = ErK"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("ErH        -1.4815"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("ErK         0.0000"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("most stable = ErH"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("near degenerate: ErHV ~ ErKV"));
}

TEST_CASE("bundled eigenvalue fixture analyzes to the reference gap") {
    CliResult r = run_cli("analyze --eig " + data_file("pristine.eig"));
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("gap = 2.23 eV"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("vbm = 0 eV (k 0)"));
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("cbm = 2.23 eV (k 19)"));
}

TEST_CASE("exit codes separate the error categories") {
    REQUIRE(run_cli("no-such-command").code == 2);
    REQUIRE(run_cli("build --bogus-flag 1").code == 2);
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("build --help").code == 0);

    // i/o: input file absent
    CliResult r = run_cli("analyze --eig " + testutil::tmp_path("absent.eig"));
    REQUIRE(r.code == 3);
    REQUIRE_THAT(r.out, Catch::Matchers::StartsWith("polydef: "));
    REQUIRE(count_substr(r.out, "\n") == 1); // single-line error

    // parse: malformed eigenvalue file
    std::string broken = testutil::tmp_path("broken.eig");
    testutil::write_file(broken, "# nk=1 nbands=1\nk 0 0 0 0 1\n1.0\n");
    r = run_cli("analyze --eig " + broken);
    REQUIRE(r.code == 4);
    REQUIRE(count_substr(r.out, "\n") == 1);

    // domain: invalid multiplier
    std::string sic = testutil::tmp_path("codes_sic.json");
    REQUIRE(run_cli("build -o " + sic).code == 0);
    r = run_cli("supercell --in " + sic + " --n1 0");
    REQUIRE(r.code == 5);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("multipliers"));

    // domain: conflicting band sources
    r = run_cli("bands --model a.json --spec b.json --kpath c.kpath");
    REQUIRE(r.code == 5);

    // audit verdicts carry their own code
    std::string log = testutil::tmp_path("codes_scf.log");
    testutil::write_file(log, "iter 1 dE 0.5 Ry\niter 2 dE 2e-05 Ry\n");
    REQUIRE(run_cli("audit --log " + log).code == 0);
    testutil::write_file(log, "iter 1 dE 0.5 Ry\niter 2 dE 0.002 Ry\n");
    CliResult bad = run_cli("audit --log " + log);
    REQUIRE(bad.code == 6);
    REQUIRE_THAT(bad.out, Catch::Matchers::ContainsSubstring("converged = no"));
}

TEST_CASE("help text stays in step with the accepted flags") {
    CliResult top = run_cli("--help");
    REQUIRE(top.code == 0);
    for (const std::string& line :
         {"0  success", "1  internal error", "2  usage error", "3  file I/O error",
          "4  input file parse error", "5  domain violation", "6  audit"})
        REQUIRE_THAT(top.out, Catch::Matchers::ContainsSubstring(line));

    const std::vector<std::pair<std::string, std::vector<std::string>>> surface = {
        {"build", {"--manifest", "--stacking", "--a", "--c", "--out"}},
        {"supercell", {"--manifest", "--in", "--n1", "--n2", "--n3", "--out"}},
        {"defect", {"--manifest", "--in", "--kind", "--remove-index", "--out"}},
        {"kpath", {"--manifest", "--in", "--a", "--c", "--labels", "--total", "--out"}},
        {"deck",
         {"--manifest", "--structure", "--kpath", "--tolerance", "--max-iter", "--hubbard-u",
          "--scf-k", "--functional", "--out"}},
        {"bands",
         {"--manifest", "--structure", "--model", "--spec", "--kpath", "--electrons", "--out"}},
        {"analyze", {"--manifest", "--eig", "--delta", "--window", "--defected"}},
        {"dos", {"--manifest", "--eig", "--sigma", "--grid", "--emin", "--emax", "--out", "--svg"}},
        {"formation", {"--ledger", "--reference", "--tol"}},
        {"plot", {"--eig", "--kpath", "--svg", "--csv", "--dos-svg", "--dos-csv", "--sigma",
                  "--grid"}},
        {"audit", {"--manifest", "--log", "--threshold", "--max-iter"}},
        {"run", {"--manifest", "--out"}},
    };
    for (const auto& [sub, flags] : surface) {
        REQUIRE_THAT(top.out, Catch::Matchers::ContainsSubstring(sub));
        CliResult help = run_cli(sub + " --help");
        REQUIRE(help.code == 0);
        for (const std::string& flag : flags)
            REQUIRE_THAT(help.out, Catch::Matchers::ContainsSubstring(flag));
    }
}

TEST_CASE("manifest values feed subcommands and flags override them") {
    std::string manifest = testutil::tmp_path("defaults.json");
    testutil::write_file(manifest, R"({
        "stacking": "ABC",
        "a": 3.0,
        "kpath": {"labels": "G-M", "total": 7},
        "deck": {"hubbard_u": 5.5, "scf_kpoints": 4}
    })");

    std::string sic = testutil::tmp_path("manifest_sic.json");
    CliResult r = run_cli("build --manifest " + manifest + " -o " + sic);
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("6 atoms (3 Si, 3 C)"));

    // flag wins over the manifest stacking
    r = run_cli("build --manifest " + manifest + " --stacking ABCB -o " + sic);
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("8 atoms (4 Si, 4 C)"));

    std::string kp = testutil::tmp_path("manifest_path.kpath");
    r = run_cli("kpath --manifest " + manifest + " --in " + sic + " -o " + kp);
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("7 points; vertices Gamma:0 M:6"));

    std::string deck_file = testutil::tmp_path("manifest_deck.in");
    r = run_cli("deck --manifest " + manifest + " --scf-k 9 -o " + deck_file);
    REQUIRE(r.code == 0);
    std::string deck = testutil::read_file(deck_file);
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("hubbard_u = 5.5"));
    REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("scf_kpoints = 9"));
}

TEST_CASE("full runs from one manifest are byte-stable across worker counts") {
    std::string manifest = testutil::tmp_path("run_manifest.json");
    std::string out_a = testutil::tmp_path("run_out_a");
    std::string out_b = testutil::tmp_path("run_out_b");
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
    testutil::write_file(manifest, std::string(R"({
        "stacking": "ABCB",
        "a": 3.09,
        "c": 10.08,
        "supercell": [2, 2, 1],
        "defect": "ErH",
        "kpath": {"labels": "G-M-K-G-A-L-H-A", "total": 113},
        "bands": {"spec": ")") + data_file("erh.spec.json") + R"("},
        "analysis": {"sigma": 0.05, "delta": 0.2, "grid": 640}
    })");

    CliResult a = run_cli("run --manifest " + manifest + " --out " + out_a,
                          "POLYDEF_THREADS=1");
    REQUIRE(a.code == 0);
    CliResult b = run_cli("run --manifest " + manifest + " --out " + out_b,
                          "POLYDEF_THREADS=3");
    REQUIRE(b.code == 0);
    REQUIRE_THAT(a.out, Catch::Matchers::ContainsSubstring("gap = 2.19 eV"));

    for (const std::string& name :
         {"structure.json", "supercell.json", "defected.json", "path.kpath", "deck.in",
          "bands.eig", "bands.csv", "bands.svg", "dos.csv", "dos.svg", "analysis.txt"}) {
        std::string fa = testutil::read_file(out_a + "/" + name);
        std::string fb = testutil::read_file(out_b + "/" + name);
        REQUIRE(!fa.empty());
        REQUIRE(fa == fb);
    }

    // second identical run reproduces the bytes as well
    std::string out_c = testutil::tmp_path("run_out_c");
    std::filesystem::remove_all(out_c);
    CliResult c = run_cli("run --manifest " + manifest + " --out " + out_c,
                          "POLYDEF_THREADS=3");
    REQUIRE(c.code == 0);
    REQUIRE(testutil::read_file(out_b + "/dos.csv") == testutil::read_file(out_c + "/dos.csv"));
    REQUIRE(testutil::read_file(out_b + "/bands.csv") ==
            testutil::read_file(out_c + "/bands.csv"));
}

TEST_CASE("input decks carry the settings and the sampling block") {
    DeckSettings s;
    SECTION("defaults render with units") {
        std::string deck = deck_text(s);
        REQUIRE(deck == "functional = PBE-GGA+U  # exchange-correlation tag\n"
                        "hubbard_u = 7.21  # eV\n"
                        "scf_tolerance = 0.0001  # Ry\n"
                        "max_iterations = 100  # count\n"
                        "scf_kpoints = 2  # count, grid chosen engine-side\n"
                        "nscf_kpoints = 113  # count\n");
    }

    SECTION("path block lists every point and labels the vertices") {
        KPath path = demo_path(11);
        s.structure = "super.json";
        std::string deck = deck_text(s, &path);
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("structure = super.json  # file"));
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("nscf_kpoints = 11  # count"));
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("begin kpoints"));
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("end kpoints"));
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("0 0 0  # Gamma"));
        REQUIRE_THAT(deck, Catch::Matchers::ContainsSubstring("0.5 0 0  # M"));
        // one row per point inside the block
        std::string block = deck.substr(deck.find("begin kpoints"));
        REQUIRE(count_substr(block, "\n") == 13); // begin + 11 rows + end
    }

    SECTION("invariants are enforced") {
        s.scf_tolerance = 0.0;
        REQUIRE_THROWS_WITH(deck_text(s), Catch::Matchers::ContainsSubstring("tolerance"));
        s = {};
        s.max_iterations = 0;
        REQUIRE_THROWS_WITH(deck_text(s), Catch::Matchers::ContainsSubstring("max iterations"));
        s = {};
        s.scf_kpoints = 0;
        REQUIRE_THROWS_WITH(deck_text(s), Catch::Matchers::ContainsSubstring("scf k-point"));
        s = {};
        s.functional.clear();
        REQUIRE_THROWS_WITH(deck_text(s), Catch::Matchers::ContainsSubstring("functional"));
        s = {};
        KPath empty;
        REQUIRE_THROWS_WITH(deck_text(s, &empty), Catch::Matchers::ContainsSubstring("empty"));
    }

    SECTION("manifest fragments override defaults field by field") {
        nlohmann::json j = {{"scf_tolerance", 1e-5}, {"functional", "LDA"}};
        DeckSettings d = deck_settings_from_json(j, "mem");
        REQUIRE(d.scf_tolerance == 1e-5);
        REQUIRE(d.functional == "LDA");
        REQUIRE(d.max_iterations == 100);
        REQUIRE(d.hubbard_u == 7.21);

        REQUIRE_THROWS_WITH(deck_settings_from_json({{"max_iterations", 2.5}}, "mem"),
                            Catch::Matchers::ContainsSubstring("integer"));
        REQUIRE_THROWS_WITH(deck_settings_from_json({{"functional", 3}}, "mem"),
                            Catch::Matchers::ContainsSubstring("string"));
        REQUIRE_THROWS_WITH(deck_settings_from_json({{"scf_tolerance", -1.0}}, "mem"),
                            Catch::Matchers::ContainsSubstring("tolerance"));
        REQUIRE_THROWS_WITH(deck_settings_from_json(nlohmann::json::array(), "mem"),
                            Catch::Matchers::ContainsSubstring("object"));
    }
}

TEST_CASE("run manifests parse with defaults and validation") {
    RunManifest m = manifest_from_json_text(R"({"bands": {"spec": "x.json"}})", "mem");
    REQUIRE(m.stacking == "ABCB");
    REQUIRE(m.a == 3.09);
    REQUIRE(m.supercell == std::array<int, 3>{1, 1, 1});
    REQUIRE(m.kpath_labels == "G-M-K-G-A-L-H-A");
    REQUIRE(m.kpath_total == 113);
    REQUIRE(m.sigma == 0.05);
    REQUIRE(m.delta == 0.2);
    REQUIRE(m.grid == 800);
    REQUIRE(m.output_dir == "out");
    REQUIRE(m.bands_spec == "x.json");

    m = manifest_from_json_text(R"({
        "structure": "s.json",
        "supercell": [3, 2, 2],
        "defect": "ErKV",
        "remove_site": 17,
        "kpath": {"labels": "G-A", "total": 12},
        "bands": {"model": "tb.json", "electrons": 44},
        "analysis": {"sigma": 0.1, "delta": 0.3, "grid": 256, "window": [-1.0, 2.0]},
        "output_dir": "custom"
    })",
                                "mem");
    REQUIRE(m.structure_path == "s.json");
    REQUIRE(m.supercell == std::array<int, 3>{3, 2, 2});
    REQUIRE(m.defect == "ErKV");
    REQUIRE(m.remove_site == 17);
    REQUIRE(m.kpath_total == 12);
    REQUIRE(m.bands_model == "tb.json");
    REQUIRE(m.electrons == 44);
    REQUIRE(m.flat_window == std::pair<double, double>{-1.0, 2.0});
    REQUIRE(m.output_dir == "custom");

    auto reject = [](const std::string& text, const std::string& needle) {
        REQUIRE_THROWS_WITH(manifest_from_json_text(text, "mem"),
                            Catch::Matchers::ContainsSubstring(needle));
    };
    reject(R"([1])", "must be an object");
    reject(R"({"supercell": [1, 2]})", "array of 3 integers");
    reject(R"({"supercell": [1, 2, 0]})", ">= 1");
    reject(R"({"defect": "ErX"})", "ErX");
    reject(R"({"kpath": {"total": 1}})", ">= 2");
    reject(R"({"bands": {"model": "a", "spec": "b"}})", "mutually exclusive");
    reject(R"({"analysis": {"sigma": 0}})", "sigma");
    reject(R"({"analysis": {"window": [2.0, 1.0]}})", "window");
    reject(R"({"analysis": {"grid": 1}})", "grid");
    reject(R"({"output_dir": ""})", "output directory");
    reject(R"({"stacking": "AA"})", "stacking");
}

TEST_CASE("band and DOS tables round numbers the canonical way") {
    KPath path = demo_path(5);
    SyntheticBandSpec spec;
    spec.bands = {{-1.0, 0.5, 0}, {2.0, 0.25, 1}};
    spec.electrons = 2;
    EigenvalueSet set = synthesize(spec, path);

    std::string csv = band_csv_text(set);
    REQUIRE_THAT(csv, Catch::Matchers::StartsWith("s,band_1,band_2\n"));
    REQUIRE(count_substr(csv, "\n") == 6);
    REQUIRE_THAT(csv, Catch::Matchers::ContainsSubstring("0,-0.5,")); // Gamma row

    DosCurve dos = compute_dos(set, -2.0, 3.0, 101, 0.05);
    std::string dcsv = dos_csv_text(dos);
    REQUIRE_THAT(dcsv, Catch::Matchers::StartsWith("energy_eV,dos_per_eV\n"));
    REQUIRE(count_substr(dcsv, "\n") == 102);
    REQUIRE_THAT(dcsv, Catch::Matchers::ContainsSubstring("\n-2,"));

    DosCurve skewed = dos;
    skewed.values.pop_back();
    REQUIRE_THROWS_WITH(dos_csv_text(skewed), Catch::Matchers::ContainsSubstring("length"));
}

TEST_CASE("band figures carry one polyline per band and labeled ticks") {
    KPath path = demo_path(23);
    SyntheticBandSpec spec;
    spec.bands = {{-1.0, 0.5, 0}, {1.5, 0.5, 1}, {4.0, 0.25, 2}};
    spec.electrons = 2;
    EigenvalueSet set = synthesize(spec, path);

    std::string svg = band_svg_text(set, path_ticks(path));
    REQUIRE_THAT(svg, Catch::Matchers::StartsWith("<svg"));
    REQUIRE_THAT(svg, Catch::Matchers::EndsWith("</svg>\n"));
    REQUIRE(count_substr(svg, "<polyline") == 3);
    REQUIRE(count_substr(svg, "\xce\x93") == 2); // both Gamma vertices
    REQUIRE_THAT(svg, Catch::Matchers::ContainsSubstring(">M</text>"));
    REQUIRE_THAT(svg, Catch::Matchers::ContainsSubstring(">K</text>"));
    REQUIRE_THAT(svg, Catch::Matchers::ContainsSubstring("energy (eV)"));
    REQUIRE(svg == band_svg_text(set, path_ticks(path))); // deterministic bytes

    // tick x positions follow the cumulative distances
    std::vector<std::pair<std::string, double>> ticks = path_ticks(path);
    REQUIRE(ticks.size() == 4);
    REQUIRE(ticks[0].first == "Gamma");
    REQUIRE(ticks[0].second == 0.0);
    REQUIRE(ticks[3].first == "Gamma");
    REQUIRE(ticks[3].second == Approx(path.points.back().s));
    for (std::size_t i = 1; i < ticks.size(); ++i) REQUIRE(ticks[i].second > ticks[i - 1].second);

    DosCurve dos = compute_dos(set, -2.0, 5.0, 201, 0.05);
    std::string dsvg = dos_svg_text(dos);
    REQUIRE_THAT(dsvg, Catch::Matchers::StartsWith("<svg"));
    REQUIRE(count_substr(dsvg, "<polyline") == 1);
    REQUIRE_THAT(dsvg, Catch::Matchers::ContainsSubstring("DOS (states/eV)"));

    SECTION("degenerate ranges still render") {
        EigenvalueSet flat = set;
        for (auto& kp : flat.kpoints) kp.s = 0.0; // no distances attached
        std::string out = band_svg_text(flat, {});
        REQUIRE_THAT(out, Catch::Matchers::StartsWith("<svg"));
    }

    SECTION("bad inputs are rejected") {
        DosCurve tiny;
        tiny.grid = {0.0};
        tiny.values = {1.0};
        REQUIRE_THROWS_WITH(dos_svg_text(tiny), Catch::Matchers::ContainsSubstring("at least 2"));
        EigenvalueSet empty;
        REQUIRE_THROWS_AS(band_svg_text(empty, {}), error);
    }
}

TEST_CASE("path distances join eigenvalues to their k-path") {
    KPath path = demo_path(17);
    SyntheticBandSpec spec;
    spec.bands = {{0.0, 1.0, 0}};
    spec.electrons = 0;
    EigenvalueSet set = synthesize(spec, path);
    std::vector<double> s_ref;
    for (const auto& kp : set.kpoints) s_ref.push_back(kp.s);

    for (auto& kp : set.kpoints) kp.s = 0.0; // simulate an external file
    attach_path_distances(set, path);
    for (std::size_t k = 0; k < set.n_k(); ++k) REQUIRE(set.kpoints[k].s == s_ref[k]);

    SECTION("count mismatch") {
        EigenvalueSet shorter = set;
        shorter.kpoints.pop_back();
        shorter.bands.pop_back();
        REQUIRE_THROWS_WITH(attach_path_distances(shorter, path),
                            Catch::Matchers::ContainsSubstring("k-points"));
    }

    SECTION("coordinate mismatch") {
        EigenvalueSet moved = set;
        moved.kpoints[3].frac.x += 0.01;
        REQUIRE_THROWS_WITH(attach_path_distances(moved, path),
                            Catch::Matchers::ContainsSubstring("does not lie on the path"));
    }
}
