#pragma once

#include <memory>

#include "vema/system.hpp"

namespace vema {

// A displacement field that can be evaluated anywhere in the domain; either
// an exact manufactured solution or a fine-mesh numerical stand-in.
class FieldEval {
  public:
    virtual ~FieldEval() = default;
    virtual Vec2 displacement(const Vec2& p) const = 0;
    virtual Eigen::Matrix2d gradient(const Vec2& p) const = 0;
};

class ExactField final : public FieldEval {
  public:
    ExactField(std::function<Vec2(const Vec2&)> u, std::function<Eigen::Matrix2d(const Vec2&)> g)
        : u_(std::move(u)), g_(std::move(g)) {}
    Vec2 displacement(const Vec2& p) const override { return u_(p); }
    Eigen::Matrix2d gradient(const Vec2& p) const override { return g_(p); }

  private:
    std::function<Vec2(const Vec2&)> u_;
    std::function<Eigen::Matrix2d(const Vec2&)> g_;
};

// Evaluates a solved VEM field at arbitrary points: the containing element is
// located through a bucket grid; displacement interpolates the trace of that
// element's nearest edge, the gradient is the element's average gradient.
class VemField final : public FieldEval {
  public:
    VemField(Mesh mesh, Solution sol) : mesh_(std::move(mesh)), sol_(std::move(sol)) {
        Vec2 lo, hi;
        detail::bounding_box(mesh_.vertices, lo, hi);
        lo_ = lo;
        cell_ = std::max(2.0 * mesh_.mean_diameter(), 1e-12);
        nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)));
        ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)));
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        tol_ = 1e-9 * mesh_.diameter();
        for (long e = 0; e < mesh_.element_count(); ++e) {
            Vec2 elo, ehi;
            detail::bounding_box(mesh_.element_polygon(static_cast<int>(e)), elo, ehi);
            const int x0 = clampx(elo.x - tol_), x1 = clampx(ehi.x + tol_);
            const int y0 = clampy(elo.y - tol_), y1 = clampy(ehi.y + tol_);
            for (int iy = y0; iy <= y1; ++iy)
                for (int ix = x0; ix <= x1; ++ix) buckets_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(static_cast<int>(e));
        }
    }

    long element_count() const { return mesh_.element_count(); }

    Vec2 displacement(const Vec2& p) const override {
        const int e = locate(p);
        const auto& loop = mesh_.elements[static_cast<std::size_t>(e)];
        const std::size_t n = loop.size();
        double best = 1e300;
        Vec2 val{0, 0};
        for (std::size_t k = 0; k < n; ++k) {
            const int va = loop[k], vb = loop[(k + 1) % n];
            const Vec2 A = mesh_.vertices[static_cast<std::size_t>(va)], B = mesh_.vertices[static_cast<std::size_t>(vb)];
            const double L2 = dist2(A, B);
            const double t = L2 > 0 ? std::clamp(dot(p - A, B - A) / L2, 0.0, 1.0) : 0.0;
            const double d2 = dist2(p, A + (B - A) * t);
            if (d2 < best) {
                best = d2;
                const Vec2 ua = sol_.displacement(va), ub = sol_.displacement(vb);
                val = ua * (1.0 - t) + ub * t;
            }
        }
        return val;
    }

    Eigen::Matrix2d gradient(const Vec2& p) const override { return sol_.elems[static_cast<std::size_t>(locate(p))].grad; }

  private:
    int clampx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cell_), 0, nx_ - 1); }
    int clampy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / cell_), 0, ny_ - 1); }

    int locate(const Vec2& p) const {
        const auto& bucket = buckets_[static_cast<std::size_t>(clampy(p.y)) * nx_ + clampx(p.x)];
        for (int e : bucket)
            if (point_in_polygon(p, mesh_.element_polygon(e), tol_)) return e;
        throw EvaluationError("point not inside the reference mesh");
    }

    Mesh mesh_;
    Solution sol_;
    Vec2 lo_;
    double cell_ = 1, tol_ = 0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

struct ErrorNorms {
    double h1 = 0;
    double l2_disp = 0;
    double l2_strain = 0;
};

// Discrete H1 error: per-element vertex sums weighted |E|/n_v, displacement
// mismatch plus Frobenius mismatch of the gradients. The two addends are also
// reported separately (each under its own square root).
inline ErrorNorms error_norms(const Mesh& m, const Solution& sol, const FieldEval& ref) {
    double disp2 = 0, strain2 = 0;
    for (long e = 0; e < m.element_count(); ++e) {
        const auto& loop = m.elements[static_cast<std::size_t>(e)];
        const double w = m.props[static_cast<std::size_t>(e)].area / static_cast<double>(loop.size());
        const Eigen::Matrix2d g = sol.elems[static_cast<std::size_t>(e)].grad;
        for (int v : loop) {
            const Vec2 p = m.vertices[static_cast<std::size_t>(v)];
            const Vec2 du = ref.displacement(p) - sol.displacement(v);
            disp2 += w * norm2(du);
            strain2 += w * (ref.gradient(p) - g).squaredNorm();
        }
    }
    return {std::sqrt(disp2 + strain2), std::sqrt(disp2), std::sqrt(strain2)};
}

// Same quadrature applied to the reference field itself; used to make
// self-differences relative.
inline double field_h1_norm(const Mesh& m, const FieldEval& ref) {
    double acc = 0;
    for (long e = 0; e < m.element_count(); ++e) {
        const auto& loop = m.elements[static_cast<std::size_t>(e)];
        const double w = m.props[static_cast<std::size_t>(e)].area / static_cast<double>(loop.size());
        for (int v : loop) {
            const Vec2 p = m.vertices[static_cast<std::size_t>(v)];
            acc += w * (norm2(ref.displacement(p)) + ref.gradient(p).squaredNorm());
        }
    }
    return std::sqrt(acc);
}

// Fraction of the stored energy carried by the stabilization term.
inline double pse(const Solution& sol) {
    double et = 0, es = 0;
    for (const auto& st : sol.elems) {
        et += st.energy_total;
        es += st.energy_stab;
    }
    if (!(et > 0)) throw ZeroEnergy("total stored energy is zero");
    return es / et;
}

// Percentage relative effort: the effort the adaptive run needs (log-log
// interpolated between recorded steps) to reach the reference run's final
// error, as a percentage of the reference's final effort.
inline double pre(const std::vector<std::array<double, 2>>& adaptive_error_effort,
                  const std::array<double, 2>& reference_final) {
    const double ref_err = reference_final[0];
    const double ref_eff = reference_final[1];
    if (!(ref_err > 0) || !(ref_eff > 0)) throw NotComparable("reference error/effort not positive");
    const auto& c = adaptive_error_effort;
    if (c.empty()) throw NotComparable("empty adaptive curve");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i][0] == ref_err) return 100.0 * c[i][1] / ref_eff;
        if (i > 0 && c[i - 1][0] > ref_err && c[i][0] < ref_err) {
            const double le0 = std::log(c[i - 1][0]), le1 = std::log(c[i][0]);
            const double lf0 = std::log(std::max(c[i - 1][1], 1e-300)), lf1 = std::log(std::max(c[i][1], 1e-300));
            const double t = (std::log(ref_err) - le0) / (le1 - le0);
            return 100.0 * std::exp(lf0 + t * (lf1 - lf0)) / ref_eff;
        }
    }
    throw NotComparable("adaptive error range does not bracket the reference error");
}

inline double pre_star(double pre_percent) {
    if (!(pre_percent > 0)) throw Error("pre_star: PRE must be positive");
    return 10000.0 / pre_percent;
}

}  // namespace vema
