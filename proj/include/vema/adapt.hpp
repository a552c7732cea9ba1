#pragma once

#include <chrono>

#include "vema/indicators.hpp"
#include "vema/problems.hpp"

namespace vema {

enum class Procedure { DB, SJ, Z2, DB_SJ, DB_Z2, Reference };

inline std::string to_string(Procedure p) {
    switch (p) {
        case Procedure::DB: return "db";
        case Procedure::SJ: return "sj";
        case Procedure::Z2: return "z2";
        case Procedure::DB_SJ: return "db+sj";
        case Procedure::DB_Z2: return "db+z2";
        case Procedure::Reference: return "reference";
    }
    return "?";
}

inline Procedure procedure_from_string(const std::string& s) {
    if (s == "db") return Procedure::DB;
    if (s == "sj") return Procedure::SJ;
    if (s == "z2") return Procedure::Z2;
    if (s == "db+sj") return Procedure::DB_SJ;
    if (s == "db+z2") return Procedure::DB_Z2;
    if (s == "reference") return Procedure::Reference;
    throw Error("unknown procedure: " + s);
}

struct AdaptConfig {
    Procedure procedure = Procedure::DB;
    double T = 20.0;
    int max_steps = 8;
    long node_budget = 30000;
    SeedMode mesh_mode = SeedMode::Structured;
    std::uint64_t rng_seed = 1;
    double error_target = 0.0;   // optional extra stop; 0 disables
    int initial_resolution = 0;  // 0 = problem default
};

struct StepRecord {
    int step = 0;
    long nodes = 0;
    long elements = 0;
    double mean_h = 0;
    double t_solve = 0;   // solve + indicators + marking, seconds
    double t_remesh = 0;  // element refinement, seconds
    double h1 = std::numeric_limits<double>::quiet_NaN();
    double l2_disp = std::numeric_limits<double>::quiet_NaN();
    double l2_strain = std::numeric_limits<double>::quiet_NaN();
    double pse = std::numeric_limits<double>::quiet_NaN();
};

struct AdaptResult {
    std::vector<StepRecord> steps;
    Mesh final_mesh;
};

using StepHook = std::function<void(int step, const Mesh&, const Solution&, const std::vector<IndicatorField>&)>;

// Solve -> indicate -> select -> refine loop. Step 1 records the initial
// mesh; the run stops at max_steps, at the node budget, or (when set) once
// the H1 error reaches error_target. Error metrics are evaluated against ref
// when provided and are not counted in the timing buckets.
inline AdaptResult run_adaptive(const Problem& prob, const AdaptConfig& cfg, const FieldEval* ref = nullptr,
                                const StepHook& hook = {}) {
    using clock = std::chrono::steady_clock;
    if (!(cfg.T > 0 && cfg.T <= 100)) throw Error("run_adaptive: T out of range");
    if (cfg.max_steps < 1) throw Error("run_adaptive: max_steps must be >= 1");

    AdaptResult out;
    Mesh mesh = prob.initial_mesh(cfg.mesh_mode, cfg.rng_seed, cfg.initial_resolution);

    for (int step = 1;; ++step) {
        StepRecord rec;
        rec.step = step;
        rec.nodes = mesh.node_count();
        rec.elements = mesh.element_count();
        rec.mean_h = mesh.mean_diameter();

        Solution sol;
        RefinementPlan plan;
        std::vector<IndicatorField> fields;
        bool nothing_to_refine = false;
        try {
            const auto t0 = clock::now();
            sol = assemble_and_solve(mesh, prob.mat, prob.bcs);
            if (cfg.procedure == Procedure::Reference) {
                plan.marked.resize(static_cast<std::size_t>(mesh.element_count()));
                for (long e = 0; e < mesh.element_count(); ++e) plan.marked[static_cast<std::size_t>(e)] = static_cast<int>(e);
            } else {
                try {
                    switch (cfg.procedure) {
                        case Procedure::DB:
                            fields.push_back(indicator_db(mesh, sol));
                            plan = select_elements(fields[0], cfg.T);
                            break;
                        case Procedure::SJ:
                            fields.push_back(indicator_sj(mesh, sol));
                            plan = select_elements(fields[0], cfg.T);
                            break;
                        case Procedure::Z2: {
                            const SmoothedStrain sm = smooth_strains(mesh, sol);
                            fields.push_back(indicator_z2(mesh, sol, sm));
                            plan = select_elements(fields[0], cfg.T);
                            break;
                        }
                        case Procedure::DB_SJ: {
                            fields.push_back(indicator_db(mesh, sol));
                            fields.push_back(indicator_sj(mesh, sol));
                            plan = combine_plans(fields[0], select_elements(fields[0], cfg.T), fields[1],
                                                 select_elements(fields[1], cfg.T));
                            break;
                        }
                        case Procedure::DB_Z2: {
                            const SmoothedStrain sm = smooth_strains(mesh, sol);
                            fields.push_back(indicator_db(mesh, sol));
                            fields.push_back(indicator_z2(mesh, sol, sm));
                            plan = combine_plans(fields[0], select_elements(fields[0], cfg.T), fields[1],
                                                 select_elements(fields[1], cfg.T));
                            break;
                        }
                        default: break;
                    }
                } catch (const NothingToRefine&) {
                    nothing_to_refine = true;
                }
            }
            rec.t_solve = std::chrono::duration<double>(clock::now() - t0).count();
        } catch (const SolveFailed& e) {
            throw SolveFailed("step " + std::to_string(step) + ": " + e.what());
        } catch (const SingularSystem& e) {
            throw SingularSystem("step " + std::to_string(step) + ": " + e.what());
        }

        if (ref) {
            const ErrorNorms en = error_norms(mesh, sol, *ref);
            rec.h1 = en.h1;
            rec.l2_disp = en.l2_disp;
            rec.l2_strain = en.l2_strain;
        }
        rec.pse = pse(sol);
        if (hook) hook(step, mesh, sol, fields);

        const bool stop = step >= cfg.max_steps || mesh.node_count() >= cfg.node_budget || nothing_to_refine ||
                          (cfg.error_target > 0 && ref && rec.h1 <= cfg.error_target);
        if (stop) {
            out.steps.push_back(rec);
            break;
        }

        try {
            const auto t1 = clock::now();
            Mesh next = refine_elements(mesh, plan, cfg.mesh_mode, Rng(cfg.rng_seed).substream(0x5e9 + static_cast<std::uint64_t>(step)).seed());
            classify_boundary_tags(next, prob.bcs);
            rec.t_remesh = std::chrono::duration<double>(clock::now() - t1).count();
            mesh = std::move(next);
        } catch (const RefinementFailed& e) {
            throw RefinementFailed("step " + std::to_string(step) + ": " + e.what());
        }
        out.steps.push_back(rec);
    }
    out.final_mesh = std::move(mesh);
    return out;
}

struct OverkillField {
    std::shared_ptr<VemField> field;
    long elements = 0;
    int resolution = 0;
    double self_difference = 0;  // relative H1 difference against the next coarser level
};

// Reference evaluator: a uniform structured VEM run refined until the
// relative step-to-step H1 self-difference falls below rel_tol and the mesh
// holds at least min_elements elements (capped by max_resolution).
inline OverkillField make_overkill(const Problem& prob, long min_elements, double rel_tol = 0.02,
                                   int max_resolution = 512) {
    Vec2 lo, hi;
    detail::bounding_box(prob.domain.outer, lo, hi);
    const double fill = prob.domain.area() / ((hi.x - lo.x) * (hi.y - lo.y));
    int nx = std::max(16, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(min_elements) / fill))));

    for (;;) {
        const Mesh coarse = prob.initial_mesh(SeedMode::Structured, 0, nx / 2);
        Mesh fine = prob.initial_mesh(SeedMode::Structured, 0, nx);
        const Solution sol_c = assemble_and_solve(coarse, prob.mat, prob.bcs);
        Solution sol_f = assemble_and_solve(fine, prob.mat, prob.bcs);
        const long n_elems = fine.element_count();
        auto field = std::make_shared<VemField>(std::move(fine), std::move(sol_f));
        const double diff = error_norms(coarse, sol_c, *field).h1 / field_h1_norm(coarse, *field);
        if ((diff < rel_tol && n_elems >= min_elements) || nx >= max_resolution)
            return {field, n_elems, nx, diff};
        nx = std::min(max_resolution, nx + nx / 2);
    }
}

}  // namespace vema
