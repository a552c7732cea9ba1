#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "vema/driver.hpp"

namespace {

using namespace vema;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

// Line-oriented key=value config; '#' starts a comment. Every key mirrors a
// CLI flag; flags given on the command line win.
void apply_key(SweepConfig& cfg, const std::string& key, const std::string& val) {
    auto parse_modes = [](const std::string& v) {
        std::vector<SeedMode> m;
        for (const auto& s : split_list(v)) {
            if (s == "structured")
                m.push_back(SeedMode::Structured);
            else if (s == "voronoi")
                m.push_back(SeedMode::Random);
            else
                throw Error("bad mesh mode: " + s);
        }
        return m;
    };
    if (key == "problem")
        cfg.problem = val;
    else if (key == "indicator") {
        cfg.procedures.clear();
        for (const auto& s : split_list(val)) cfg.procedures.push_back(procedure_from_string(s));
    } else if (key == "T") {
        cfg.thresholds.clear();
        for (const auto& s : split_list(val)) cfg.thresholds.push_back(std::stod(s));
    } else if (key == "mesh")
        cfg.modes = parse_modes(val);
    else if (key == "nu") {
        cfg.nus.clear();
        for (const auto& s : split_list(val)) cfg.nus.push_back(std::stod(s));
    } else if (key == "steps")
        cfg.steps = std::stoi(val);
    else if (key == "budget")
        cfg.budget = std::stol(val);
    else if (key == "seed")
        cfg.seed = std::stoull(val);
    else if (key == "out")
        cfg.out_dir = val;
    else if (key == "resolution")
        cfg.initial_resolution = std::stoi(val);
    else if (key == "overkill")
        cfg.overkill = std::stoi(val);
    else if (key == "emit") {
        cfg.emit_csv = cfg.emit_svg = cfg.emit_mesh = false;
        for (const auto& s : split_list(val)) {
            if (s == "csv")
                cfg.emit_csv = true;
            else if (s == "svg")
                cfg.emit_svg = true;
            else if (s == "mesh")
                cfg.emit_mesh = true;
            else
                throw Error("bad emit kind: " + s);
        }
    } else
        throw Error("unknown key: " + key);
}

void load_config_file(SweepConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError(path + ":" + std::to_string(line_no) + ": expected key=value");
        try {
            apply_key(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::exception& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vema: adaptive virtual element solver for plane elasticity on polygonal meshes"};
    app.require_subcommand(1);

    SweepConfig cfg;
    std::string config_file, indicators, thresholds, meshes, nus, emit;
    bool fresh = false;

    CLI::App* run = app.add_subcommand("run", "execute a run or sweep and write reports");
    run->add_option("--config", config_file, "key=value config file; flags override it");
    run->add_option("--problem", cfg.problem, "problem name: A1, B4, C5 or SMOOTH");
    run->add_option("--indicator", indicators, "comma list of db,sj,z2,db+sj,db+z2,reference");
    run->add_option("--T", thresholds, "comma list of refinement threshold percentages");
    run->add_option("--mesh", meshes, "comma list of structured,voronoi");
    run->add_option("--nu", nus, "comma list of Poisson ratios");
    run->add_option("--steps", cfg.steps, "maximum refinement steps per run");
    run->add_option("--budget", cfg.budget, "node budget per run");
    run->add_option("--seed", cfg.seed, "RNG seed");
    run->add_option("--out", cfg.out_dir, "output directory");
    run->add_option("--emit", emit, "comma list of csv,svg,mesh");
    run->add_option("--resolution", cfg.initial_resolution, "initial mesh resolution override");
    run->add_option("--overkill", cfg.overkill, "reference evaluator resolution override");
    run->add_flag("--fresh", fresh, "ignore completed runs instead of resuming");
    run->add_flag("--verbose", cfg.verbose, "progress to stderr");

    std::string plot_dir = "out";
    CLI::App* plot = app.add_subcommand("plot", "rebuild summary tables and SVG plots from run CSVs");
    plot->add_option("--out", plot_dir, "directory holding run CSVs")->required();

    std::string mesh_problem = "A1", mesh_mode = "structured", mesh_out;
    int mesh_resolution = 0;
    std::uint64_t mesh_seed = 1;
    double mesh_nu = 0.3;
    CLI::App* meshcmd = app.add_subcommand("mesh", "write an initial mesh file for a problem");
    meshcmd->add_option("--problem", mesh_problem, "problem name");
    meshcmd->add_option("--mesh", mesh_mode, "structured or voronoi");
    meshcmd->add_option("--resolution", mesh_resolution, "resolution override");
    meshcmd->add_option("--seed", mesh_seed, "RNG seed");
    meshcmd->add_option("--nu", mesh_nu, "Poisson ratio (affects boundary tags only)");
    meshcmd->add_option("--out", mesh_out, "output mesh file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!config_file.empty()) load_config_file(cfg, config_file);
            if (!indicators.empty()) apply_key(cfg, "indicator", indicators);
            if (!thresholds.empty()) apply_key(cfg, "T", thresholds);
            if (!meshes.empty()) apply_key(cfg, "mesh", meshes);
            if (!nus.empty()) apply_key(cfg, "nu", nus);
            if (!emit.empty()) apply_key(cfg, "emit", emit);
            cfg.resume = !fresh;
            const int executed = run_sweep(cfg);
            std::cout << "executed " << executed << " run(s); reports in " << cfg.out_dir << "\n";
        } else if (plot->parsed()) {
            SweepConfig pc;
            pc.out_dir = plot_dir;
            pc.emit_svg = true;
            rebuild_outputs(pc);
            std::cout << "rebuilt summary and plots in " << plot_dir << "\n";
        } else if (meshcmd->parsed()) {
            const Problem p = Problem::by_name(mesh_problem, mesh_nu);
            const Mesh m = p.initial_mesh(mesh_mode == "voronoi" ? SeedMode::Random : SeedMode::Structured, mesh_seed,
                                          mesh_resolution);
            const auto parent = std::filesystem::path(mesh_out).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            write_mesh(mesh_out, m);
            std::cout << "wrote " << mesh_out << " (" << m.node_count() << " nodes, " << m.element_count()
                      << " elements)\n";
        }
    } catch (const vema::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
