#pragma once

#include <Eigen/Dense>

#include "vema/geometry.hpp"

namespace vema {

// Isotropic linear elastic material under plane strain.
struct Material {
    double E = 1.0;
    double nu = 0.3;
    double lambda = 0.0;
    double mu = 0.0;

    static Material plane_strain(double E, double nu) {
        if (!(E > 0)) throw Error("material: E must be positive");
        if (!(nu >= 0 && nu < 0.5)) throw Error("material: nu must be in [0, 0.5)");
        Material m;
        m.E = E;
        m.nu = nu;
        m.mu = E / (2.0 * (1.0 + nu));
        m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        return m;
    }

    // Voigt constitutive matrix acting on [e11, e22, 2 e12].
    Eigen::Matrix3d C() const {
        Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
        c(0, 0) = c(1, 1) = lambda + 2.0 * mu;
        c(0, 1) = c(1, 0) = lambda;
        c(2, 2) = mu;
        return c;
    }
};

// DOF convention: interleaved (v0x, v0y, v1x, v1y, ...), 2 n_v per element.
struct ElementMatrices {
    Eigen::Matrix<double, 3, Eigen::Dynamic> Wc;  // DOFs -> [e11, e22, 2 e12]
    Eigen::Matrix<double, 4, Eigen::Dynamic> Wg;  // DOFs -> [du_x/dx, du_x/dy, du_y/dx, du_y/dy]
    Eigen::MatrixXd D;                            // nodal values of the scaled linear ansatz
    Eigen::MatrixXd Kc, Ks, K;
    double area = 0;
};

namespace detail {

// q_k = integral of the k-th scalar hat trace times the outward normal over
// the two incident edges; trapezoid is exact for the linear traces.
inline std::vector<Vec2> edge_normal_weights(const Polygon& p) {
    const std::size_t n = p.size();
    std::vector<Vec2> q(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& prev = p[(k + n - 1) % n];
        const Vec2& next = p[(k + 1) % n];
        q[k] = {0.5 * (next.y - prev.y), 0.5 * (prev.x - next.x)};
    }
    return q;
}

}  // namespace detail

// Projection and average-gradient maps for one element. The symmetric
// projection rows are exact boundary integrals of the linear edge traces;
// the full-gradient rows supply the off-diagonal averages used by the
// displacement fit and the H1 norm.
inline void projection_maps(const Polygon& p, double area, Eigen::Matrix<double, 3, Eigen::Dynamic>& Wc,
                            Eigen::Matrix<double, 4, Eigen::Dynamic>& Wg) {
    const std::size_t n = p.size();
    const auto q = detail::edge_normal_weights(p);
    Wc.setZero(3, 2 * static_cast<Eigen::Index>(n));
    Wg.setZero(4, 2 * static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double qx = q[k].x / area, qy = q[k].y / area;
        const Eigen::Index cx = 2 * static_cast<Eigen::Index>(k), cy = cx + 1;
        Wc(0, cx) = qx;
        Wc(1, cy) = qy;
        Wc(2, cx) = qy;
        Wc(2, cy) = qx;
        Wg(0, cx) = qx;
        Wg(1, cx) = qy;
        Wg(2, cy) = qx;
        Wg(3, cy) = qy;
    }
}

struct ProjectedState {
    Eigen::Matrix2d strain;  // symmetric projection
    Eigen::Matrix2d grad;    // full average gradient, grad(i,j) = d u_i / d x_j
};

inline ProjectedState element_projection(const Polygon& p, const Eigen::VectorXd& d) {
    const PolygonProps pp = polygon_props(p);
    if (d.size() != 2 * static_cast<Eigen::Index>(p.size())) throw Error("element_projection: DOF size mismatch");
    Eigen::Matrix<double, 3, Eigen::Dynamic> Wc;
    Eigen::Matrix<double, 4, Eigen::Dynamic> Wg;
    projection_maps(p, pp.area, Wc, Wg);
    const Eigen::Vector3d v = Wc * d;
    const Eigen::Vector4d g = Wg * d;
    ProjectedState s;
    s.strain << v(0), 0.5 * v(2), 0.5 * v(2), v(1);
    s.grad << g(0), g(1), g(2), g(3);
    return s;
}

// Consistency matrix |E| Wc^T C Wc plus the rank-completing stabilization
// mu [I - D (D^T D)^{-1} D^T], where D holds nodal values of the linear
// ansatz in the scaled monomial basis {1, (x-xc)/h, (y-yc)/h}.
inline ElementMatrices element_stiffness(const Polygon& p, const Material& mat) {
    const PolygonProps pp = polygon_props(p);
    const std::size_t n = p.size();
    const Eigen::Index ndof = 2 * static_cast<Eigen::Index>(n);

    ElementMatrices em;
    em.area = pp.area;
    projection_maps(p, pp.area, em.Wc, em.Wg);
    em.Kc = pp.area * em.Wc.transpose() * mat.C() * em.Wc;

    em.D.setZero(ndof, 6);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = (p[k].x - pp.centroid.x) / pp.diameter;
        const double eta = (p[k].y - pp.centroid.y) / pp.diameter;
        const Eigen::Index rx = 2 * static_cast<Eigen::Index>(k), ry = rx + 1;
        em.D(rx, 0) = 1;
        em.D(rx, 2) = xi;
        em.D(rx, 4) = eta;
        em.D(ry, 1) = 1;
        em.D(ry, 3) = xi;
        em.D(ry, 5) = eta;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(em.D);
    if (qr.rank() < 6) throw DegenerateGeometry("element_stiffness: rank-deficient linear ansatz");
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(ndof, 6);
    em.Ks = mat.mu * (Eigen::MatrixXd::Identity(ndof, ndof) - Q * Q.transpose());
    em.Ks = 0.5 * (em.Ks + em.Ks.transpose().eval());
    em.K = em.Kc + em.Ks;
    return em;
}

}  // namespace vema
