#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "vema/element.hpp"

using namespace vema;
using Catch::Approx;

namespace {

const Polygon kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Eigen::VectorXd nodal(const Polygon& p, const std::function<Vec2(const Vec2&)>& u) {
    Eigen::VectorXd d(2 * p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Vec2 v = u(p[k]);
        d(2 * static_cast<Eigen::Index>(k)) = v.x;
        d(2 * static_cast<Eigen::Index>(k) + 1) = v.y;
    }
    return d;
}

}  // namespace

TEST_CASE("material: shear modulus and plane-strain lambda") {
    const Material m = Material::plane_strain(1.0, 0.3);
    CHECK(m.mu == Approx(1.0 / 2.6).epsilon(1e-15));
    CHECK(m.lambda == Approx(0.3 / (1.3 * 0.4)).epsilon(1e-15));
    CHECK_THROWS_AS(Material::plane_strain(-1.0, 0.3), Error);
    CHECK_THROWS_AS(Material::plane_strain(1.0, 0.5), Error);
}

TEST_CASE("projection reproduces linear fields exactly on arbitrary polygons") {
    Rng rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const Polygon p = test_util::random_polygon(rng, 3 + static_cast<int>(rng.index(8)), rep % 2 == 0);
        const auto st = element_projection(p, nodal(p, [](const Vec2& q) { return Vec2{q.x, 0}; }));
        CHECK(st.strain(0, 0) == Approx(1.0).epsilon(1e-12));
        CHECK(st.strain(1, 1) == Approx(0.0).margin(1e-12));
        CHECK(st.strain(0, 1) == Approx(0.0).margin(1e-12));
        CHECK(st.grad(0, 0) == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("projection of a rigid rotation vanishes, its full gradient is skew") {
    Rng rng(13);
    const Polygon p = test_util::random_polygon(rng, 6, false);
    const auto st = element_projection(p, nodal(p, [](const Vec2& q) { return Vec2{-q.y, q.x}; }));
    CHECK(st.strain.norm() < 1e-12);
    CHECK(st.grad(0, 1) == Approx(-1.0).epsilon(1e-12));
    CHECK(st.grad(1, 0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projection of u = (x^2, 0) matches an independent edgewise quadrature oracle") {
    // oracle: (Pi)_11 = (1/|E|) sum_e int u_h n_x ds with the linear trace
    // integrated by 2-point Gauss per edge
    auto u = [](const Vec2& q) { return Vec2{q.x * q.x, 0}; };
    Rng rng(14);
    for (const Polygon& p :
         {kUnitSquare, test_util::random_polygon(rng, 5, true), test_util::random_polygon(rng, 9, false)}) {
        const double area = polygon_props(p).area;
        double oracle = 0;
        const std::size_t n = p.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 A = p[k], B = p[(k + 1) % n];
            const double ua = u(A).x, ub = u(B).x;
            const double nx_len = B.y - A.y;  // n_x * |e|
            const double g = 0.5 / std::sqrt(3.0);
            const double s1 = 0.5 - g, s2 = 0.5 + g;
            oracle += 0.5 * ((ua + s1 * (ub - ua)) + (ua + s2 * (ub - ua))) * nx_len;
        }
        oracle /= area;
        const auto st = element_projection(p, nodal(p, u));
        CHECK(st.strain(0, 0) == Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("element stiffness on the unit square matches a dense hand-assembled oracle") {
    const Material mat = Material::plane_strain(1.0, 0.3);
    const ElementMatrices em = element_stiffness(kUnitSquare, mat);

    // independent assembly of |E| Pi^T C Pi from the boundary-integral vectors
    const std::size_t n = 4;
    double qx[4], qy[4];
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 prev = kUnitSquare[(k + 3) % 4], next = kUnitSquare[(k + 1) % 4];
        qx[k] = 0.5 * (next.y - prev.y);
        qy[k] = 0.5 * (prev.x - next.x);
    }
    const double area = 1.0;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 8);
    for (std::size_t k = 0; k < n; ++k) {
        P(0, 2 * k) = qx[k] / area;
        P(1, 2 * k + 1) = qy[k] / area;
        P(2, 2 * k) = qy[k] / area;
        P(2, 2 * k + 1) = qx[k] / area;
    }
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = C(1, 1) = mat.lambda + 2 * mat.mu;
    C(0, 1) = C(1, 0) = mat.lambda;
    C(2, 2) = mat.mu;
    Eigen::MatrixXd Kc_oracle = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) Kc_oracle(i, j) += area * P(a, i) * C(a, b) * P(b, j);
    CHECK((em.Kc - Kc_oracle).norm() < 1e-13);
}

TEST_CASE("stiffness kernel: rigid modes only") {
    Rng rng(15);
    const Material mat = Material::plane_strain(1.0, 0.3);
    for (int rep = 0; rep < 15; ++rep) {
        const Polygon p = test_util::random_polygon(rng, 3 + static_cast<int>(rng.index(9)), rep % 3 != 0);
        const ElementMatrices em = element_stiffness(p, mat);
        const std::size_t n = p.size();

        Eigen::VectorXd tx = Eigen::VectorXd::Zero(2 * n), ty = Eigen::VectorXd::Zero(2 * n), rot(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            tx(2 * k) = 1;
            ty(2 * k + 1) = 1;
            rot(2 * k) = -p[k].y;
            rot(2 * k + 1) = p[k].x;
        }
        CHECK((em.K * tx).norm() < 1e-12);
        CHECK((em.K * ty).norm() < 1e-12);
        CHECK((em.K * rot).norm() < 1e-12 * (1 + rot.norm()));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(em.K);
        const double lmax = eig.eigenvalues().maxCoeff();
        int zeros = 0;
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
            if (std::abs(eig.eigenvalues()(i)) < 1e-9 * lmax) ++zeros;
        CHECK(zeros == 3);
        CHECK(eig.eigenvalues().minCoeff() > -1e-10 * lmax);
    }
}

TEST_CASE("stabilization annihilates affine nodal fields") {
    Rng rng(16);
    const Material mat = Material::plane_strain(1.0, 0.3);
    const Polygon p = test_util::random_polygon(rng, 7, false);
    const auto d = nodal(p, [](const Vec2& q) { return Vec2{0.3 + 1.2 * q.x - 0.7 * q.y, -0.1 + 0.4 * q.x + 0.9 * q.y}; });
    const ElementMatrices em = element_stiffness(p, mat);
    CHECK((em.Ks * d).norm() < 1e-12 * d.norm());
}

TEST_CASE("collinear vertices are accepted, fully collinear polygons are not") {
    const Polygon hang{{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Material mat = Material::plane_strain(1.0, 0.3);
    const ElementMatrices em = element_stiffness(hang, mat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(em.K);
    int zeros = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        if (std::abs(eig.eigenvalues()(i)) < 1e-9 * eig.eigenvalues().maxCoeff()) ++zeros;
    CHECK(zeros == 3);
}
