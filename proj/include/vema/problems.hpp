#pragma once

#include <memory>

#include "vema/metrics.hpp"

namespace vema {

// A benchmark problem: domain, material, boundary data, default mesh
// resolutions and (for manufactured cases) the exact solution.
struct Problem {
    std::string name;
    DomainShape domain;
    Material mat;
    Bcs bcs;
    int structured_n = 8;
    int voronoi_seeds = 64;
    std::shared_ptr<const FieldEval> exact;

    Mesh initial_mesh(SeedMode mode, std::uint64_t rng_seed, int resolution = 0) const;

    static Problem plate_with_hole(double nu);  // A1
    static Problem notched_plate(double nu);    // B4
    static Problem narrow_punch(double nu);     // C5
    static Problem smooth_manufactured(double nu);
    static Problem by_name(const std::string& name, double nu);
};

inline void classify_boundary_tags(Mesh& m, const Bcs& bcs) {
    for (auto& be : m.boundary) {
        const Vec2 mid = (m.vertices[static_cast<std::size_t>(be.a)] + m.vertices[static_cast<std::size_t>(be.b)]) * 0.5;
        be.tag = 0;
        for (const auto& r : bcs.neumann)
            if (r.where(mid)) be.tag = 2;
        for (const auto& r : bcs.dirichlet)
            if (r.where(mid)) be.tag = 1;
    }
}

inline Mesh Problem::initial_mesh(SeedMode mode, std::uint64_t rng_seed, int resolution) const {
    const double tol = 1e-9 * domain.diameter();
    SeedSet seeds;
    if (mode == SeedMode::Structured) {
        const int n = resolution > 0 ? resolution : structured_n;
        seeds = structured_seeds(domain, n, n, rng_seed);
    } else {
        const int n = resolution > 0 ? resolution : voronoi_seeds;
        seeds = random_seeds(domain, n, rng_seed);
        seeds = smooth_seeds(seeds, domain, 100, 0.05);
    }
    VoronoiResult vr = bounded_voronoi(seeds, domain);
    std::vector<Polygon> polys;
    polys.reserve(vr.cells.size());
    for (auto& c : vr.cells) polys.push_back(std::move(c.poly));
    Mesh m = build_mesh(polys, tol);
    classify_boundary_tags(m, bcs);
    return m;
}

namespace detail {

constexpr double kBcTol = 1e-7;

inline std::function<bool(const Vec2&)> on_line_x(double x0) {
    return [x0](const Vec2& p) { return std::abs(p.x - x0) < kBcTol; };
}
inline std::function<bool(const Vec2&)> on_line_y(double y0) {
    return [y0](const Vec2& p) { return std::abs(p.y - y0) < kBcTol; };
}
inline std::function<double(const Vec2&)> constant(double v) {
    return [v](const Vec2&) { return v; };
}

}  // namespace detail

// Problem A(1): unit plate with a central square hole (side 0.3, a documented
// convention), left edge held horizontally, bottom-left corner fully fixed,
// uniform traction Q = 0.2 N/m pulling the right edge.
inline Problem Problem::plate_with_hole(double nu) {
    Problem p;
    p.name = "A1";
    p.domain.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.domain.holes = {{{0.35, 0.35}, {0.65, 0.35}, {0.65, 0.65}, {0.35, 0.65}}};
    p.mat = Material::plane_strain(1.0, nu);
    p.bcs.dirichlet.push_back({detail::on_line_x(0.0), detail::constant(0.0), nullptr});
    p.bcs.pins.push_back({{0, 0}, 0.0, 0.0});
    p.bcs.neumann.push_back({detail::on_line_x(1.0), [](const Vec2&) { return Vec2{0.2, 0.0}; }});
    return p;
}

// Problem B(4): unit plate with a notch (0.6 x 0.2, centred on the bottom
// edge), bottom and left edges on rollers, bottom-left corner fixed, top edge
// pulled up by a prescribed u_y = 0.5 with u_x free.
inline Problem Problem::notched_plate(double nu) {
    Problem p;
    p.name = "B4";
    p.domain.outer = {{0, 0}, {0.2, 0}, {0.2, 0.2}, {0.8, 0.2}, {0.8, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.mat = Material::plane_strain(1.0, nu);
    p.bcs.dirichlet.push_back({detail::on_line_x(0.0), detail::constant(0.0), nullptr});
    p.bcs.dirichlet.push_back({detail::on_line_y(0.0), nullptr, detail::constant(0.0)});
    p.bcs.dirichlet.push_back({detail::on_line_y(1.0), nullptr, detail::constant(0.5)});
    p.bcs.pins.push_back({{0, 0}, 0.0, 0.0});
    return p;
}

// Problem C(5): unit block, punch of width 0.2 centred on the top edge
// modelled as a distributed load Q = 0.675 N/m, top edge held horizontally,
// bottom edge on vertical rollers with its midpoint fully fixed.
inline Problem Problem::narrow_punch(double nu) {
    Problem p;
    p.name = "C5";
    p.domain.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.mat = Material::plane_strain(1.0, nu);
    p.bcs.dirichlet.push_back({detail::on_line_y(0.0), nullptr, detail::constant(0.0)});
    p.bcs.dirichlet.push_back({detail::on_line_y(1.0), detail::constant(0.0), nullptr});
    p.bcs.pins.push_back({{0.5, 0}, 0.0, 0.0});
    p.bcs.neumann.push_back({detail::on_line_y(1.0), [](const Vec2& q) {
                                 return std::abs(q.x - 0.5) <= 0.1 ? Vec2{0.0, -0.675} : Vec2{0.0, 0.0};
                             }});
    return p;
}

// Divergence-free smooth field from a harmonic potential; solves the
// homogeneous Navier equations for every (lambda, mu), so it serves both
// compressible and nearly incompressible convergence studies.
inline Problem Problem::smooth_manufactured(double nu) {
    Problem p;
    p.name = "SMOOTH";
    p.domain.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.mat = Material::plane_strain(1.0, nu);
    auto u = [](const Vec2& q) { return Vec2{std::exp(q.x) * std::cos(q.y), -std::exp(q.x) * std::sin(q.y)}; };
    auto g = [](const Vec2& q) {
        Eigen::Matrix2d m;
        const double ex = std::exp(q.x);
        m << ex * std::cos(q.y), -ex * std::sin(q.y), -ex * std::sin(q.y), -ex * std::cos(q.y);
        return m;
    };
    p.exact = std::make_shared<ExactField>(u, g);
    auto everywhere = [](const Vec2&) { return true; };
    p.bcs.dirichlet.push_back({everywhere, [u](const Vec2& q) { return u(q).x; }, [u](const Vec2& q) { return u(q).y; }});
    return p;
}

inline Problem Problem::by_name(const std::string& name, double nu) {
    if (name == "A1") return plate_with_hole(nu);
    if (name == "B4") return notched_plate(nu);
    if (name == "C5") return narrow_punch(nu);
    if (name == "SMOOTH") return smooth_manufactured(nu);
    throw Error("unknown problem: " + name);
}

}  // namespace vema
