#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "vema/adapt.hpp"

namespace vema {

struct RunMeta {
    std::string problem = "A1";
    Procedure procedure = Procedure::DB;
    double T = 20;
    SeedMode mesh_mode = SeedMode::Structured;
    double nu = 0.3;
    int max_steps = 8;
    long node_budget = 30000;
    std::uint64_t seed = 1;

    std::string id() const {
        std::ostringstream os;
        os << problem << '_' << to_string(procedure) << "_T" << T << '_'
           << (mesh_mode == SeedMode::Structured ? "structured" : "voronoi") << "_nu" << nu << "_s" << seed;
        std::string s = os.str();
        for (char& c : s)
            if (c == '+' || c == '.') c = c == '+' ? 'p' : 'd';
        return s;
    }
};

struct RunReport {
    RunMeta meta;
    std::vector<StepRecord> steps;
};

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void emit_run_csv(std::ostream& os, const RunReport& r) {
    os << "# vema-run 1\n";
    os << "# problem=" << r.meta.problem << "\n";
    os << "# procedure=" << to_string(r.meta.procedure) << "\n";
    os << "# T=" << detail::fmt_g17(r.meta.T) << "\n";
    os << "# mesh=" << (r.meta.mesh_mode == SeedMode::Structured ? "structured" : "voronoi") << "\n";
    os << "# nu=" << detail::fmt_g17(r.meta.nu) << "\n";
    os << "# steps=" << r.meta.max_steps << "\n";
    os << "# budget=" << r.meta.node_budget << "\n";
    os << "# seed=" << r.meta.seed << "\n";
    os << "step,nodes,elements,mean_h,t_solve,t_remesh,h1,l2_disp,l2_strain,pse\n";
    for (const auto& s : r.steps) {
        os << s.step << ',' << s.nodes << ',' << s.elements << ',' << detail::fmt_g17(s.mean_h) << ','
           << detail::fmt_g17(s.t_solve) << ',' << detail::fmt_g17(s.t_remesh) << ',' << detail::fmt_g17(s.h1) << ','
           << detail::fmt_g17(s.l2_disp) << ',' << detail::fmt_g17(s.l2_strain) << ',' << detail::fmt_g17(s.pse)
           << "\n";
    }
}

inline void emit_run_csv(const std::string& path, const RunReport& r) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    emit_run_csv(f, r);
}

inline RunReport parse_run_csv(std::istream& is) {
    RunReport r;
    std::string line;
    int line_no = 0;
    bool have_header = false, have_columns = false;
    auto fail = [&](const std::string& what) { throw IoError("run csv line " + std::to_string(line_no) + ": " + what); };
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            if (body.rfind("vema-run", 0) == 0) {
                if (body != "vema-run 1") fail("unsupported schema: " + body);
                have_header = true;
                continue;
            }
            const auto eq = body.find('=');
            if (eq == std::string::npos) fail("malformed meta line");
            const std::string key = body.substr(0, eq), val = body.substr(eq + 1);
            try {
                if (key == "problem")
                    r.meta.problem = val;
                else if (key == "procedure")
                    r.meta.procedure = procedure_from_string(val);
                else if (key == "T")
                    r.meta.T = std::stod(val);
                else if (key == "mesh")
                    r.meta.mesh_mode = val == "structured" ? SeedMode::Structured : SeedMode::Random;
                else if (key == "nu")
                    r.meta.nu = std::stod(val);
                else if (key == "steps")
                    r.meta.max_steps = std::stoi(val);
                else if (key == "budget")
                    r.meta.node_budget = std::stol(val);
                else if (key == "seed")
                    r.meta.seed = std::stoull(val);
                else
                    fail("unknown meta key: " + key);
            } catch (const std::invalid_argument&) {
                fail("bad value for " + key);
            }
            continue;
        }
        if (!have_columns) {
            if (line.rfind("step,", 0) != 0) fail("missing column header");
            have_columns = true;
            continue;
        }
        StepRecord s;
        std::istringstream ls(line);
        std::string cell;
        double* const dcols[] = {&s.mean_h, &s.t_solve, &s.t_remesh, &s.h1, &s.l2_disp, &s.l2_strain, &s.pse};
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            try {
                if (col == 0)
                    s.step = std::stoi(cell);
                else if (col == 1)
                    s.nodes = std::stol(cell);
                else if (col == 2)
                    s.elements = std::stol(cell);
                else if (col <= 9)
                    *dcols[col - 3] = std::strtod(cell.c_str(), nullptr);
                else
                    fail("too many columns");
            } catch (const std::invalid_argument&) {
                fail("bad cell: " + cell);
            }
            ++col;
        }
        if (col != 10) fail("expected 10 columns, got " + std::to_string(col));
        r.steps.push_back(s);
    }
    if (!have_header) throw IoError("run csv: missing '# vema-run 1' header");
    return r;
}

inline RunReport parse_run_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    return parse_run_csv(f);
}

// One summary row per run; PRE columns are filled when a reference run with
// the same (problem, mesh, nu) exists.
struct SummaryRow {
    RunMeta meta;
    long final_nodes = 0;
    double final_h1 = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> pre_nodes, pre_runtime, pre_runtime_incl, pre_star_mesh;
};

inline std::vector<std::array<double, 2>> error_effort_curve(const std::vector<StepRecord>& steps,
                                                             const std::function<double(const StepRecord&)>& effort) {
    std::vector<std::array<double, 2>> c;
    double cum_solve = 0, cum_remesh = 0;
    for (const auto& s : steps) {
        cum_solve += s.t_solve;
        cum_remesh += s.t_remesh;
        StepRecord t = s;
        t.t_solve = cum_solve;
        t.t_remesh = cum_remesh;
        c.push_back({s.h1, effort(t)});
    }
    return c;
}

inline std::vector<SummaryRow> summarize(const std::vector<RunReport>& runs) {
    std::map<std::string, const RunReport*> refs;
    for (const auto& r : runs)
        if (r.meta.procedure == Procedure::Reference) {
            std::ostringstream key;
            key << r.meta.problem << '|' << (r.meta.mesh_mode == SeedMode::Structured ? "s" : "v") << '|' << r.meta.nu;
            refs[key.str()] = &r;
        }

    auto nodes_of = [](const StepRecord& s) { return static_cast<double>(s.nodes); };
    auto rt_excl = [](const StepRecord& s) { return s.t_solve; };
    auto rt_incl = [](const StepRecord& s) { return s.t_solve + s.t_remesh; };
    auto mesh_size = [](const StepRecord& s) { return s.mean_h; };

    std::vector<SummaryRow> rows;
    for (const auto& r : runs) {
        SummaryRow row;
        row.meta = r.meta;
        if (!r.steps.empty()) {
            row.final_nodes = r.steps.back().nodes;
            row.final_h1 = r.steps.back().h1;
        }
        std::ostringstream key;
        key << r.meta.problem << '|' << (r.meta.mesh_mode == SeedMode::Structured ? "s" : "v") << '|' << r.meta.nu;
        const auto it = refs.find(key.str());
        if (it != refs.end() && r.meta.procedure != Procedure::Reference && !r.steps.empty() &&
            !it->second->steps.empty() && std::isfinite(r.steps.back().h1)) {
            const auto& ref_steps = it->second->steps;
            auto ref_final = [&](const std::function<double(const StepRecord&)>& eff) {
                return error_effort_curve(ref_steps, eff).back();
            };
            auto try_pre = [&](const std::function<double(const StepRecord&)>& eff) -> std::optional<double> {
                try {
                    return pre(error_effort_curve(r.steps, eff), ref_final(eff));
                } catch (const Error&) {
                    return std::nullopt;
                }
            };
            row.pre_nodes = try_pre(nodes_of);
            row.pre_runtime = try_pre(rt_excl);
            row.pre_runtime_incl = try_pre(rt_incl);
            if (auto p = try_pre(mesh_size)) row.pre_star_mesh = pre_star(*p);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void emit_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "problem,procedure,T,mesh,nu,final_nodes,final_h1,pre_nodes,pre_runtime,pre_runtime_incl_remesh,pre_star_mesh_size\n";
    auto opt = [](const std::optional<double>& v) { return v ? detail::fmt_g17(*v) : std::string(); };
    for (const auto& r : rows) {
        os << r.meta.problem << ',' << to_string(r.meta.procedure) << ',' << detail::fmt_g17(r.meta.T) << ','
           << (r.meta.mesh_mode == SeedMode::Structured ? "structured" : "voronoi") << ',' << detail::fmt_g17(r.meta.nu)
           << ',' << r.final_nodes << ',' << detail::fmt_g17(r.final_h1) << ',' << opt(r.pre_nodes) << ','
           << opt(r.pre_runtime) << ',' << opt(r.pre_runtime_incl) << ',' << opt(r.pre_star_mesh) << "\n";
    }
}

// Threshold comparison in the unsorted/sorted two-block layout: the average
// PRE pools the node-count and runtime PREs over every run of the procedure
// at that threshold.
inline void emit_threshold_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    std::map<std::string, std::map<double, std::pair<double, int>>> acc;
    for (const auto& r : rows) {
        if (r.meta.procedure == Procedure::Reference) continue;
        if (!r.pre_nodes || !r.pre_runtime) continue;
        auto& cell = acc[to_string(r.meta.procedure)][r.meta.T];
        cell.first += 0.5 * (*r.pre_nodes + *r.pre_runtime);
        cell.second += 1;
    }
    os << "procedure,T,avg_pre,sorted_T,sorted_avg_pre\n";
    for (const auto& [proc, by_t] : acc) {
        std::vector<std::pair<double, double>> unsorted;
        for (const auto& [t, cell] : by_t) unsorted.emplace_back(t, cell.first / cell.second);
        std::vector<std::pair<double, double>> sorted = unsorted;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        for (std::size_t i = 0; i < unsorted.size(); ++i) {
            os << proc << ',' << detail::fmt_g17(unsorted[i].first) << ',' << detail::fmt_g17(unsorted[i].second) << ','
               << detail::fmt_g17(sorted[i].first) << ',' << detail::fmt_g17(sorted[i].second) << "\n";
        }
    }
}

}  // namespace vema
