#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "vema/driver.hpp"

using namespace vema;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("vema_test_" + std::to_string(Rng(std::random_device{}()).bits()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunReport sample_report() {
    RunReport r;
    r.meta = {"A1", Procedure::DB_SJ, 15, SeedMode::Random, 0.49995, 9, 12345, 77};
    for (int i = 1; i <= 3; ++i) {
        StepRecord s;
        s.step = i;
        s.nodes = 60 * i;
        s.elements = 50 * i;
        s.mean_h = 0.125 / i;
        s.t_solve = 0.001 * i + 1e-17;
        s.t_remesh = 0.002 * i;
        s.h1 = std::pow(10.0, -i) * 1.2345678901234567;
        s.l2_disp = s.h1 / 3;
        s.l2_strain = s.h1 / 2;
        s.pse = 0.01 / i;
        r.steps.push_back(s);
    }
    return r;
}

}  // namespace

TEST_CASE("run csv round-trips exactly") {
    const RunReport r = sample_report();
    std::stringstream ss;
    emit_run_csv(ss, r);
    const RunReport p = parse_run_csv(ss);
    CHECK(p.meta.problem == r.meta.problem);
    CHECK(p.meta.procedure == r.meta.procedure);
    CHECK(p.meta.T == r.meta.T);
    CHECK(p.meta.mesh_mode == r.meta.mesh_mode);
    CHECK(p.meta.nu == r.meta.nu);
    CHECK(p.meta.max_steps == r.meta.max_steps);
    CHECK(p.meta.node_budget == r.meta.node_budget);
    CHECK(p.meta.seed == r.meta.seed);
    REQUIRE(p.steps.size() == r.steps.size());
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        CHECK(p.steps[i].step == r.steps[i].step);
        CHECK(p.steps[i].nodes == r.steps[i].nodes);
        CHECK(p.steps[i].elements == r.steps[i].elements);
        CHECK(p.steps[i].mean_h == r.steps[i].mean_h);
        CHECK(p.steps[i].t_solve == r.steps[i].t_solve);
        CHECK(p.steps[i].t_remesh == r.steps[i].t_remesh);
        CHECK(p.steps[i].h1 == r.steps[i].h1);
        CHECK(p.steps[i].l2_disp == r.steps[i].l2_disp);
        CHECK(p.steps[i].l2_strain == r.steps[i].l2_strain);
        CHECK(p.steps[i].pse == r.steps[i].pse);
    }
    std::stringstream ss2;
    emit_run_csv(ss2, p);
    CHECK(ss.str() == ss2.str());
}

TEST_CASE("run csv parser reports line numbers") {
    std::stringstream bad("# vema-run 1\n# problem=A1\nstep,nodes\n1,2,3\n");
    try {
        parse_run_csv(bad);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    std::stringstream nohdr("step,nodes\n");
    CHECK_THROWS_AS(parse_run_csv(nohdr), IoError);
}

TEST_CASE("summary pairs adaptive runs with their reference and computes PRE") {
    RunReport ref;
    ref.meta = {"A1", Procedure::Reference, 100, SeedMode::Structured, 0.3, 4, 30000, 1};
    RunReport ad;
    ad.meta = {"A1", Procedure::DB, 20, SeedMode::Structured, 0.3, 9, 30000, 1};
    for (int i = 1; i <= 4; ++i) {
        StepRecord s;
        s.step = i;
        s.nodes = 64L << (2 * (i - 1));
        s.elements = s.nodes;
        s.mean_h = 0.125 / (1 << (i - 1));
        s.t_solve = 0.01 * i;
        s.t_remesh = 0.02 * i;
        s.h1 = 1.0 / (1 << (i - 1));
        s.pse = 0.01;
        ref.steps.push_back(s);
        StepRecord a = s;
        a.nodes = 64 + 30 * (i - 1);
        a.h1 = 1.0 / (1 << (2 * (i - 1)));  // converges twice as fast
        ad.steps.push_back(a);
    }
    const auto rows = summarize({ref, ad});
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].pre_nodes.has_value());
    REQUIRE(rows[1].pre_nodes.has_value());
    // adaptive reaches the reference final error (0.125) between steps 2 and 3
    CHECK(*rows[1].pre_nodes < 100);
    CHECK(*rows[1].pre_nodes > 0);
    std::stringstream ss;
    emit_summary_csv(ss, rows);
    CHECK(ss.str().find("pre_nodes") != std::string::npos);
}

TEST_CASE("threshold table carries unsorted values beside the ascending ranking") {
    std::vector<SummaryRow> rows;
    const double pres[3][2] = {{40, 60}, {10, 20}, {30, 30}};  // (nodes, runtime) per T
    const double ts[3] = {5, 10, 15};
    for (int i = 0; i < 3; ++i) {
        SummaryRow r;
        r.meta = {"A1", Procedure::DB, ts[i], SeedMode::Structured, 0.3, 4, 30000, 1};
        r.pre_nodes = pres[i][0];
        r.pre_runtime = pres[i][1];
        rows.push_back(r);
    }
    std::stringstream ss;
    emit_threshold_csv(ss, rows);
    std::string line;
    std::getline(ss, line);  // header
    // averages: T=5 -> 50, T=10 -> 15, T=15 -> 30; sorted ranking 10, 15, 5
    std::getline(ss, line);
    CHECK(line == "db,5,50,10,15");
    std::getline(ss, line);
    CHECK(line == "db,10,15,15,30");
    std::getline(ss, line);
    CHECK(line == "db,15,30,5,50");
}

TEST_CASE("sweep pipeline: reference then adaptive, summary carries a PRE cell") {
    TempDir tmp;
    SweepConfig cfg;
    cfg.problem = "SMOOTH";
    cfg.procedures = {Procedure::Reference};
    cfg.thresholds = {20};
    cfg.modes = {SeedMode::Structured};
    cfg.nus = {0.3};
    cfg.steps = 3;
    cfg.seed = 7;
    cfg.initial_resolution = 4;
    cfg.out_dir = tmp.path.string();
    CHECK(run_sweep(cfg) == 1);

    // second invocation adds the adaptive run and resumes the reference
    cfg.procedures = {Procedure::Reference, Procedure::DB};
    cfg.steps = 10;
    CHECK(run_sweep(cfg) == 1);

    const RunReport ad = parse_run_csv((tmp.path / "SMOOTH_db_T20_structured_nu0d3_s7.csv").string());
    CHECK(!ad.steps.empty());
    for (std::size_t i = 1; i < ad.steps.size(); ++i) CHECK(ad.steps[i].nodes > ad.steps[i - 1].nodes);

    std::ifstream sf(tmp.path / "summary.csv");
    REQUIRE(sf.good());
    std::string line, db_line;
    while (std::getline(sf, line))
        if (line.find("SMOOTH,db,") == 0) db_line = line;
    REQUIRE(!db_line.empty());
    // pre_nodes column (8th) must be non-empty
    std::vector<std::string> cells;
    std::stringstream ls(db_line);
    while (std::getline(ls, line, ',')) cells.push_back(line);
    REQUIRE(cells.size() >= 8);
    CHECK(!cells[7].empty());
    const double pre_nodes = std::stod(cells[7]);
    CHECK(pre_nodes > 0);

    // a third invocation resumes everything
    CHECK(run_sweep(cfg) == 0);
}

TEST_CASE("svg emission is a pure view of the csv data") {
    TempDir tmp;
    SweepConfig cfg;
    cfg.problem = "SMOOTH";
    cfg.procedures = {Procedure::Reference, Procedure::DB};
    cfg.thresholds = {20};
    cfg.modes = {SeedMode::Structured};
    cfg.nus = {0.3};
    cfg.steps = 3;
    cfg.initial_resolution = 4;
    cfg.out_dir = tmp.path.string();
    run_sweep(cfg);

    auto read_all = [&](const fs::path& p) {
        std::ifstream f(p);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    std::map<std::string, std::string> before;
    for (const auto& e : fs::directory_iterator(tmp.path))
        if (e.path().extension() == ".csv") before[e.path().filename().string()] = read_all(e.path());

    SweepConfig plot_cfg = cfg;
    plot_cfg.emit_svg = true;
    rebuild_outputs(plot_cfg);

    int svg_count = 0;
    for (const auto& e : fs::directory_iterator(tmp.path)) {
        if (e.path().extension() == ".svg") ++svg_count;
        if (e.path().extension() == ".csv") CHECK(read_all(e.path()) == before[e.path().filename().string()]);
    }
    CHECK(svg_count >= 4);
}

TEST_CASE("heatmap and line plot emit well-formed svg") {
    const DomainShape dom{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};
    const auto vr = bounded_voronoi(structured_seeds(dom, 3, 3), dom);
    std::vector<Polygon> polys;
    for (const auto& c : vr.cells) polys.push_back(c.poly);
    const Mesh m = build_mesh(polys, 1e-9);
    std::vector<double> vals(static_cast<std::size_t>(m.element_count()));
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<double>(i);
    std::stringstream heat;
    write_heatmap_svg(heat, m, vals, "demo");
    CHECK(heat.str().rfind("<svg", 0) == 0);
    CHECK(heat.str().find("</svg>") != std::string::npos);
    CHECK(heat.str().find("<polygon") != std::string::npos);

    std::stringstream plotss;
    write_line_plot_svg(plotss, "t", "x", "y", {{"s", "", {{1, 1}, {10, 0.1}}}});
    CHECK(plotss.str().find("<path") != std::string::npos);
}
