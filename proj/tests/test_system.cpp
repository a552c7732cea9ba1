#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "vema/problems.hpp"
#include "vema/system.hpp"

using namespace vema;
using Catch::Approx;

namespace {

const DomainShape kSquareDomain{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};

Mesh mesh_from_seeds(const SeedSet& s, const DomainShape& dom = kSquareDomain) {
    const auto vr = bounded_voronoi(s, dom);
    std::vector<Polygon> polys;
    for (const auto& c : vr.cells) polys.push_back(c.poly);
    return build_mesh(polys, 1e-9 * dom.diameter());
}

// Affine field with its exact plane-strain stress, applied as mixed BCs:
// Dirichlet on x=0 and y=0, exact tractions on x=1 and y=1.
struct AffineCase {
    Vec2 u0{0.02, -0.01};
    Eigen::Matrix2d G;
    Material mat = Material::plane_strain(1.0, 0.3);

    AffineCase() { G << 0.25, 0.2, 0.1, -0.15; }

    Vec2 u(const Vec2& p) const { return {u0.x + G(0, 0) * p.x + G(0, 1) * p.y, u0.y + G(1, 0) * p.x + G(1, 1) * p.y}; }
    Eigen::Matrix2d stress() const {
        const Eigen::Matrix2d eps = 0.5 * (G + G.transpose());
        return mat.lambda * eps.trace() * Eigen::Matrix2d::Identity() + 2.0 * mat.mu * eps;
    }
    Bcs bcs() const {
        Bcs b;
        auto exact_x = [this](const Vec2& p) { return u(p).x; };
        auto exact_y = [this](const Vec2& p) { return u(p).y; };
        b.dirichlet.push_back({[](const Vec2& p) { return p.x < 1e-9 || p.y < 1e-9; }, exact_x, exact_y});
        const Eigen::Matrix2d sig = stress();
        b.neumann.push_back({[](const Vec2& p) { return p.x > 1 - 1e-9; },
                             [sig](const Vec2&) { return Vec2{sig(0, 0), sig(1, 0)}; }});
        b.neumann.push_back({[](const Vec2& p) { return p.y > 1 - 1e-9; },
                             [sig](const Vec2&) { return Vec2{sig(0, 1), sig(1, 1)}; }});
        return b;
    }
};

double max_nodal_error(const Mesh& m, const Solution& sol, const std::function<Vec2(const Vec2&)>& exact) {
    double e = 0;
    for (long v = 0; v < m.node_count(); ++v)
        e = std::max(e, dist(sol.displacement(static_cast<int>(v)), exact(m.vertices[static_cast<std::size_t>(v)])));
    return e;
}

}  // namespace

TEST_CASE("patch test: uniaxial traction at nu = 0") {
    const Material mat = Material::plane_strain(1.0, 0.0);
    const double Q = 0.37;
    Bcs bcs;
    bcs.dirichlet.push_back({[](const Vec2& p) { return p.x < 1e-9; }, [](const Vec2&) { return 0.0; }, nullptr});
    bcs.pins.push_back({{0, 0}, std::nullopt, 0.0});
    bcs.neumann.push_back({[](const Vec2& p) { return p.x > 1 - 1e-9; }, [Q](const Vec2&) { return Vec2{Q, 0}; }});

    const Mesh m = mesh_from_seeds(structured_seeds(kSquareDomain, 4, 4));
    const Solution sol = assemble_and_solve(m, mat, bcs);
    const double err = max_nodal_error(m, sol, [&](const Vec2& p) { return Vec2{Q * p.x, 0}; });
    CHECK(err < 1e-11);
}

TEST_CASE("patch test: mixed BCs reproduce an affine field on irregular meshes") {
    const AffineCase pc;
    Rng rng(77);
    for (int rep = 0; rep < 3; ++rep) {
        SeedSet s = random_seeds(kSquareDomain, 12 + 7 * rep, 500 + static_cast<std::uint64_t>(rep));
        s = smooth_seeds(s, kSquareDomain, 40, 0.05);
        Mesh m = mesh_from_seeds(s);
        if (rep == 2) {  // introduce hanging nodes
            RefinementPlan plan;
            plan.marked = {0, 1};
            m = refine_elements(m, plan, SeedMode::Random, rng.bits());
        }
        const Solution sol = assemble_and_solve(m, pc.mat, pc.bcs());
        CHECK(max_nodal_error(m, sol, [&](const Vec2& p) { return pc.u(p); }) < 1e-10);
        double stab = 0;
        for (const auto& st : sol.elems) stab += st.stab_residual;
        CHECK(stab < 1e-10);
    }
}

TEST_CASE("linear Dirichlet data is reproduced in the interior") {
    auto exact = [](const Vec2& p) { return Vec2{0.1 * p.x + 0.2 * p.y, 0.3 * p.x - 0.1 * p.y}; };
    Bcs bcs;
    bcs.dirichlet.push_back({[](const Vec2&) { return true; }, [exact](const Vec2& p) { return exact(p).x; },
                             [exact](const Vec2& p) { return exact(p).y; }});
    const Mesh m = mesh_from_seeds(smooth_seeds(random_seeds(kSquareDomain, 30, 9), kSquareDomain, 40, 0.05));
    const Solution sol = assemble_and_solve(m, Material::plane_strain(1.0, 0.3), bcs);
    CHECK(max_nodal_error(m, sol, exact) < 1e-10);
}

TEST_CASE("load linearity: scaling all loads scales the solution") {
    const Problem p = Problem::plate_with_hole(0.3);
    const Mesh m = p.initial_mesh(SeedMode::Structured, 1);
    const Solution s1 = assemble_and_solve(m, p.mat, p.bcs);

    Problem p2 = p;
    p2.bcs.neumann[0].traction = [](const Vec2&) { return Vec2{0.2 * 3.5, 0}; };
    const Solution s2 = assemble_and_solve(m, p2.mat, p2.bcs);
    CHECK((s2.d - 3.5 * s1.d).norm() < 1e-12 * s2.d.norm());
}

TEST_CASE("energy identity against an independently assembled global matrix") {
    const AffineCase pc;
    const Mesh m = mesh_from_seeds(structured_seeds(kSquareDomain, 3, 3));
    const Solution sol = assemble_and_solve(m, pc.mat, pc.bcs());

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * m.node_count(), 2 * m.node_count());
    for (long e = 0; e < m.element_count(); ++e) {
        const auto& loop = m.elements[static_cast<std::size_t>(e)];
        const ElementMatrices em = element_stiffness(m.element_polygon(static_cast<int>(e)), pc.mat);
        for (std::size_t a = 0; a < loop.size(); ++a)
            for (std::size_t b = 0; b < loop.size(); ++b)
                for (int ca = 0; ca < 2; ++ca)
                    for (int cb = 0; cb < 2; ++cb)
                        K(2 * loop[a] + ca, 2 * loop[b] + cb) += em.K(2 * a + ca, 2 * b + cb);
    }
    const double quad = sol.d.dot(K * sol.d);
    double elem_sum = 0;
    for (const auto& st : sol.elems) elem_sum += 2.0 * st.energy_total;
    CHECK(quad == Approx(elem_sum).epsilon(1e-10));
    CHECK(quad >= 0);
}

TEST_CASE("problem A1 coarse tip displacement agrees with a fine uniform run to 2%") {
    const Problem p = Problem::plate_with_hole(0.3);
    const Mesh coarse = p.initial_mesh(SeedMode::Structured, 1);
    const Solution sc = assemble_and_solve(coarse, p.mat, p.bcs);
    const Mesh fine = p.initial_mesh(SeedMode::Structured, 1, 128);
    const Solution sf = assemble_and_solve(fine, p.mat, p.bcs);

    auto tip_ux = [](const Mesh& m, const Solution& s) {
        long best = 0;
        double bd = 1e300;
        for (long v = 0; v < m.node_count(); ++v) {
            const double d = dist2(m.vertices[static_cast<std::size_t>(v)], {1.0, 0.5});
            if (d < bd) {
                bd = d;
                best = v;
            }
        }
        return s.displacement(static_cast<int>(best)).x;
    };
    const double ux_c = tip_ux(coarse, sc), ux_f = tip_ux(fine, sf);
    CHECK(std::abs(ux_c - ux_f) < 0.02 * std::abs(ux_f));
}

TEST_CASE("no locking: near-incompressible error stays within 5x of the compressible error") {
    for (const SeedMode mode : {SeedMode::Structured, SeedMode::Random}) {
        const Problem pc = Problem::smooth_manufactured(0.3);
        const Problem pi = Problem::smooth_manufactured(0.49995);
        int res_s = 4, res_v = 16;
        for (int level = 0; level < 3; ++level) {
            const int res = mode == SeedMode::Structured ? res_s : res_v;
            const Mesh m = pc.initial_mesh(mode, 17, res);
            const Solution sc = assemble_and_solve(m, pc.mat, pc.bcs);
            const Solution si = assemble_and_solve(m, pi.mat, pi.bcs);
            const double ec = error_norms(m, sc, *pc.exact).h1;
            const double ei = error_norms(m, si, *pi.exact).h1;
            CHECK(ei < 5.0 * ec);
            res_s *= 2;
            res_v *= 4;
        }
    }
}

TEST_CASE("assembly requires a Dirichlet part") {
    const Mesh m = mesh_from_seeds(structured_seeds(kSquareDomain, 2, 2));
    Bcs none;
    none.neumann.push_back({[](const Vec2&) { return true; }, [](const Vec2&) { return Vec2{1, 0}; }});
    CHECK_THROWS_AS(assemble_and_solve(m, Material::plane_strain(1.0, 0.3), none), SingularSystem);
}

TEST_CASE("solver residual satisfies the tolerance contract") {
    const Problem p = Problem::narrow_punch(0.49995);
    const Mesh m = p.initial_mesh(SeedMode::Random, 3);
    const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
    CHECK(sol.constrained_dofs > 0);
    CHECK(std::isfinite(sol.d.norm()));
}
