#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "solution_util.hpp"
#include "vema/adapt.hpp"
#include "vema/metrics.hpp"

using namespace vema;
using Catch::Approx;

namespace {

const DomainShape kSquareDomain{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};
const Material kMat = Material::plane_strain(1.0, 0.3);

Mesh single_square() { return build_mesh({Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, 1e-9); }

ExactField affine_field() {
    return ExactField([](const Vec2& p) { return Vec2{0.1 + 0.5 * p.x - 0.2 * p.y, 0.3 * p.x + 0.4 * p.y}; },
                      [](const Vec2&) {
                          Eigen::Matrix2d g;
                          g << 0.5, -0.2, 0.3, 0.4;
                          return g;
                      });
}

}  // namespace

TEST_CASE("h1 error vanishes when the solution equals the reference field") {
    const auto s = smooth_seeds(random_seeds(kSquareDomain, 22, 14), kSquareDomain, 40, 0.05);
    const auto vr = bounded_voronoi(s, kSquareDomain);
    std::vector<Polygon> polys;
    for (const auto& c : vr.cells) polys.push_back(c.poly);
    const Mesh m = build_mesh(polys, 1e-9);
    const ExactField ref = affine_field();
    const auto sol = test_util::fabricate_solution(m, kMat, [&](const Vec2& p) { return ref.displacement(p); });
    const ErrorNorms en = error_norms(m, sol, ref);
    CHECK(en.h1 < 1e-12);
    CHECK(en.l2_disp < 1e-12);
    CHECK(en.l2_strain < 1e-12);
}

TEST_CASE("h1 error: literal hand evaluation on a single element with zero solution") {
    const Mesh m = single_square();
    const auto sol = test_util::fabricate_solution(m, kMat, [](const Vec2&) { return Vec2{0, 0}; });
    const ExactField ref([](const Vec2& p) { return Vec2{p.x, 0}; },
                         [](const Vec2&) {
                             Eigen::Matrix2d g;
                             g << 1, 0, 0, 0;
                             return g;
                         });
    const ErrorNorms en = error_norms(m, sol, ref);
    // (1/4) sum |u|^2 over the four vertices = 0.5; gradient mismatch = 1
    CHECK(en.l2_disp == Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(en.l2_strain == Approx(1.0).epsilon(1e-14));
    CHECK(en.h1 == Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("h1 components satisfy the Pythagorean split") {
    const Problem p = Problem::smooth_manufactured(0.3);
    const Mesh m = p.initial_mesh(SeedMode::Random, 31);
    const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
    const ErrorNorms en = error_norms(m, sol, *p.exact);
    CHECK(en.h1 * en.h1 == Approx(en.l2_disp * en.l2_disp + en.l2_strain * en.l2_strain).epsilon(1e-12));
    CHECK(en.h1 >= en.l2_disp);
    CHECK(en.h1 >= en.l2_strain);
}

TEST_CASE("h1 error decreases monotonically under uniform refinement of a smooth problem") {
    const Problem p = Problem::smooth_manufactured(0.3);
    Mesh m = p.initial_mesh(SeedMode::Structured, 1, 4);
    double prev = 1e300;
    for (int level = 0; level < 4; ++level) {
        const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
        const double err = error_norms(m, sol, *p.exact).h1;
        CHECK(err < prev);
        prev = err;
        if (level < 3) m = reference_refine(m, SeedMode::Structured, 2);
    }
}

TEST_CASE("h1 error is invariant to loop rotation and element order") {
    const Problem p = Problem::smooth_manufactured(0.3);
    const Mesh m = p.initial_mesh(SeedMode::Random, 8);
    const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
    const double base = error_norms(m, sol, *p.exact).h1;

    Mesh rotated = m;
    for (auto& loop : rotated.elements) std::rotate(loop.begin(), loop.begin() + 1, loop.end());
    rotated.props.clear();
    for (long e = 0; e < rotated.element_count(); ++e)
        rotated.props.push_back(polygon_props(rotated.element_polygon(static_cast<int>(e))));
    Solution rsol = sol;  // per-element states must follow the element reorder below
    CHECK(error_norms(rotated, rsol, *p.exact).h1 == Approx(base).epsilon(1e-12));

    Mesh shuffled = m;
    std::reverse(shuffled.elements.begin(), shuffled.elements.end());
    std::reverse(shuffled.props.begin(), shuffled.props.end());
    Solution ssol = sol;
    std::reverse(ssol.elems.begin(), ssol.elems.end());
    CHECK(error_norms(shuffled, ssol, *p.exact).h1 == Approx(base).epsilon(1e-12));
}

TEST_CASE("pse: zero for affine, one for a pure-stabilization mode") {
    const Mesh m = single_square();
    const auto affine = test_util::fabricate_solution(m, kMat, [](const Vec2& p) { return Vec2{0.2 * p.x + 0.1 * p.y, -0.4 * p.y}; });
    CHECK(pse(affine) < 1e-14);

    Solution hourglass = affine;
    hourglass.d << 1, 0, -1, 0, 1, 0, -1, 0;
    const ElementMatrices em = element_stiffness(m.element_polygon(0), kMat);
    ElementState st;
    st.energy_total = 0.5 * hourglass.d.dot(em.K * hourglass.d);
    st.energy_stab = 0.5 * hourglass.d.dot(em.Ks * hourglass.d);
    hourglass.elems = {st};
    CHECK(pse(hourglass) == Approx(1.0).epsilon(1e-12));

    Solution zero = affine;
    zero.d.setZero();
    zero.elems[0] = ElementState{};
    CHECK_THROWS_AS(pse(zero), ZeroEnergy);
}

TEST_CASE("pse lies in [0,1] on real solves") {
    const Problem p = Problem::plate_with_hole(0.3);
    const Mesh m = p.initial_mesh(SeedMode::Random, 5);
    const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
    const double v = pse(sol);
    CHECK(v >= 0);
    CHECK(v <= 1);
}

TEST_CASE("pse decreases under uniform refinement of the holed plate") {
    const Problem p = Problem::plate_with_hole(0.3);
    Mesh m = p.initial_mesh(SeedMode::Structured, 1);
    double prev = 1e300;
    for (int level = 0; level < 3; ++level) {
        const Solution sol = assemble_and_solve(m, p.mat, p.bcs);
        const double v = pse(sol);
        CHECK(v < prev);
        prev = v;
        if (level < 2) m = reference_refine(m, SeedMode::Structured, 4);
    }
}

TEST_CASE("pre: run against itself gives exactly 100 percent") {
    const std::vector<std::array<double, 2>> curve{{10, 50}, {5, 120}, {2, 500}};
    CHECK(pre(curve, {2, 500}) == Approx(100.0).epsilon(1e-14));
}

TEST_CASE("pre: worked node-count example") {
    // interpolation lands on 1142.64 nodes against a 12672-node reference
    const std::vector<std::array<double, 2>> curve{{0.5, 800.0}, {0.1, 1142.64}};
    const double v = pre(curve, {0.1, 12672.0});
    CHECK(v == Approx(100.0 * 1142.64 / 12672.0).epsilon(1e-12));
    CHECK(v == Approx(9.02).margin(0.005));
}

TEST_CASE("pre: synthetic two-point curve matches hand log-log interpolation") {
    const std::vector<std::array<double, 2>> curve{{10, 100}, {1, 1000}};
    const double v = pre(curve, {std::sqrt(10.0), 2000});
    CHECK(v == Approx(100.0 * 100.0 * std::sqrt(10.0) / 2000.0).epsilon(1e-12));
}

TEST_CASE("pre rejects non-bracketing curves") {
    const std::vector<std::array<double, 2>> curve{{10, 100}, {5, 200}};
    CHECK_THROWS_AS(pre(curve, {1.0, 500}), NotComparable);
    CHECK_THROWS_AS(pre(curve, {20.0, 500}), NotComparable);
}

TEST_CASE("pre_star inverts the percentage") {
    CHECK(pre_star(100.0) == Approx(100.0));
    CHECK(pre_star(322.6) == Approx(10000.0 / 322.6).epsilon(1e-12));
    CHECK(pre_star(322.6) == Approx(31.0).margin(0.005));
    CHECK(pre_star(50.0) == Approx(200.0));
    CHECK_THROWS_AS(pre_star(0.0), Error);
}

TEST_CASE("vem field evaluates nodal values exactly and rejects outside points") {
    const Problem p = Problem::smooth_manufactured(0.3);
    Mesh m = p.initial_mesh(SeedMode::Structured, 1, 16);
    Solution sol = assemble_and_solve(m, p.mat, p.bcs);
    const Mesh copy = m;
    const Solution sol_copy = sol;
    const VemField field(std::move(m), std::move(sol));
    for (long v = 0; v < copy.node_count(); v += 7) {
        const Vec2 got = field.displacement(copy.vertices[static_cast<std::size_t>(v)]);
        CHECK(dist(got, sol_copy.displacement(static_cast<int>(v))) < 1e-12);
    }
    // interior accuracy should track the mesh resolution
    const Vec2 q{0.3371, 0.5234};
    CHECK(dist(field.displacement(q), p.exact->displacement(q)) < 0.05);
    CHECK_THROWS_AS(field.displacement({2.5, 2.5}), EvaluationError);
}

TEST_CASE("overkill field reports its self-difference and honours the floor") {
    const Problem p = Problem::smooth_manufactured(0.3);
    const OverkillField ok = make_overkill(p, 400, 0.05, 64);
    CHECK(ok.elements >= 400);
    CHECK(ok.self_difference < 0.05);
    CHECK(ok.field->element_count() == ok.elements);
}
