#pragma once

#include <array>
#include <set>

#include "vema/system.hpp"

namespace vema {

enum class IndicatorKind { DB, SJ, Z2 };

struct IndicatorField {
    IndicatorKind kind = IndicatorKind::DB;
    std::vector<double> values;  // one non-negative total per element
};

// Element-wise linear ansatz u_lin = (a1 + a3 x + a5 y, a2 + a4 x + a6 y).
// The gradient part comes from the element-average gradient (a3, a6 are the
// diagonal projection components); a1, a2 are vertex averages of the
// remainder.
struct LinearFit {
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;

    Vec2 eval(const Vec2& p) const { return {a1 + a3 * p.x + a5 * p.y, a2 + a4 * p.x + a6 * p.y}; }
};

inline LinearFit linear_fit(const Mesh& m, const Solution& sol, int e) {
    LinearFit f;
    const auto& g = sol.elems[static_cast<std::size_t>(e)].grad;
    f.a3 = g(0, 0);
    f.a5 = g(0, 1);
    f.a4 = g(1, 0);
    f.a6 = g(1, 1);
    const auto& loop = m.elements[static_cast<std::size_t>(e)];
    for (int v : loop) {
        const Vec2 p = m.vertices[static_cast<std::size_t>(v)];
        const Vec2 u = sol.displacement(v);
        f.a1 += u.x - f.a3 * p.x - f.a5 * p.y;
        f.a2 += u.y - f.a4 * p.x - f.a6 * p.y;
    }
    f.a1 /= static_cast<double>(loop.size());
    f.a2 /= static_cast<double>(loop.size());
    return f;
}

// Deviation of the nodal displacements from the element's best planar field:
// per-vertex residuals of the linear fit combined in nodal and element-level
// L2 norms.
inline IndicatorField indicator_db(const Mesh& m, const Solution& sol) {
    IndicatorField out;
    out.kind = IndicatorKind::DB;
    out.values.resize(static_cast<std::size_t>(m.element_count()));
    for (long e = 0; e < m.element_count(); ++e) {
        const LinearFit fit = linear_fit(m, sol, static_cast<int>(e));
        double sum2 = 0;
        for (int v : m.elements[static_cast<std::size_t>(e)]) {
            const Vec2 r = fit.eval(m.vertices[static_cast<std::size_t>(v)]) - sol.displacement(v);
            sum2 += norm2(r);
        }
        out.values[static_cast<std::size_t>(e)] = std::sqrt(sum2);
    }
    return out;
}

// Area-weighted maximum jump of the projected strain against every
// vertex-connected neighbour, per component, combined in an L2 norm.
inline IndicatorField indicator_sj(const Mesh& m, const Solution& sol) {
    IndicatorField out;
    out.kind = IndicatorKind::SJ;
    out.values.resize(static_cast<std::size_t>(m.element_count()));
    for (long e = 0; e < m.element_count(); ++e) {
        const auto& se = sol.elems[static_cast<std::size_t>(e)].strain;
        double mxx = 0, myy = 0, mxy = 0;
        for (int o : surrounding_elements(m, static_cast<int>(e))) {
            const auto& so = sol.elems[static_cast<std::size_t>(o)].strain;
            mxx = std::max(mxx, std::abs(se(0, 0) - so(0, 0)));
            myy = std::max(myy, std::abs(se(1, 1) - so(1, 1)));
            mxy = std::max(mxy, std::abs(se(0, 1) - so(0, 1)));
        }
        out.values[static_cast<std::size_t>(e)] =
            m.props[static_cast<std::size_t>(e)].area * std::sqrt(mxx * mxx + myy * myy + mxy * mxy);
    }
    return out;
}

struct SmoothedStrain {
    std::vector<std::array<double, 3>> at_vertex;  // e11, e22, e12
};

// Nodal strain recovery with mean value coordinates: element centroids act as
// fictitious vertices carrying the projected element strains. Interior
// vertices use the closed angular fan; boundary vertices use an open fan cut
// at the largest angular gap, whose two end vertices contribute a single tan
// term each.
inline SmoothedStrain smooth_strains(const Mesh& m, const Solution& sol) {
    SmoothedStrain out;
    out.at_vertex.resize(m.vertices.size());
    const double beta_max = M_PI * (1.0 - 1e-12);
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        const auto& elems = m.vertex_elements[v];
        auto strain_of = [&](int e) {
            const auto& s = sol.elems[static_cast<std::size_t>(e)].strain;
            return std::array<double, 3>{s(0, 0), s(1, 1), s(0, 1)};
        };
        if (elems.size() == 1) {
            out.at_vertex[v] = strain_of(elems[0]);
            continue;
        }
        const Vec2 P = m.vertices[v];
        struct Fan {
            double ang, r;
            int elem;
        };
        std::vector<Fan> fan;
        fan.reserve(elems.size());
        for (int e : elems) {
            const Vec2 c = m.props[static_cast<std::size_t>(e)].centroid;
            fan.push_back({std::atan2(c.y - P.y, c.x - P.x), dist(P, c), e});
        }
        std::sort(fan.begin(), fan.end(), [](const Fan& a, const Fan& b) { return a.ang < b.ang; });
        const std::size_t nf = fan.size();
        const bool open = m.vertex_on_boundary[v] != 0;
        if (open) {
            std::size_t cut = 0;
            double widest = -1;
            for (std::size_t i = 0; i < nf; ++i) {
                double gap = fan[(i + 1) % nf].ang - fan[i].ang;
                if (i + 1 == nf) gap += 2 * M_PI;
                if (gap > widest) {
                    widest = gap;
                    cut = (i + 1) % nf;
                }
            }
            std::rotate(fan.begin(), fan.begin() + static_cast<std::ptrdiff_t>(cut), fan.end());
        }
        const std::size_t n_gaps = open ? nf - 1 : nf;
        std::vector<double> beta(n_gaps);
        for (std::size_t i = 0; i < n_gaps; ++i) {
            double g = fan[(i + 1) % nf].ang - fan[i].ang;
            while (g < 0) g += 2 * M_PI;
            beta[i] = std::clamp(g, 1e-14, beta_max);
        }
        std::vector<double> theta(nf);
        for (std::size_t i = 0; i < nf; ++i) {
            double t = 0;
            if (open) {
                if (i > 0) t += std::tan(beta[i - 1] / 2);
                if (i < nf - 1) t += std::tan(beta[i] / 2);
            } else {
                t = std::tan(beta[(i + nf - 1) % nf] / 2) + std::tan(beta[i] / 2);
            }
            theta[i] = t / std::max(fan[i].r, 1e-300);
        }
        double tsum = 0;
        for (double t : theta) tsum += t;
        std::array<double, 3> acc{0, 0, 0};
        for (std::size_t i = 0; i < nf; ++i) {
            const double w = theta[i] / tsum;
            const auto s = strain_of(fan[i].elem);
            for (int c = 0; c < 3; ++c) acc[static_cast<std::size_t>(c)] += w * s[static_cast<std::size_t>(c)];
        }
        out.at_vertex[v] = acc;
    }
    return out;
}

// Area-weighted mismatch between the recovered nodal strains and the
// element's projected strain.
inline IndicatorField indicator_z2(const Mesh& m, const Solution& sol, const SmoothedStrain& sm) {
    IndicatorField out;
    out.kind = IndicatorKind::Z2;
    out.values.resize(static_cast<std::size_t>(m.element_count()));
    for (long e = 0; e < m.element_count(); ++e) {
        const auto& loop = m.elements[static_cast<std::size_t>(e)];
        const auto& s = sol.elems[static_cast<std::size_t>(e)].strain;
        const std::array<double, 3> se{s(0, 0), s(1, 1), s(0, 1)};
        std::array<double, 3> comp{0, 0, 0};
        for (int v : loop) {
            const auto& sv = sm.at_vertex[static_cast<std::size_t>(v)];
            for (int c = 0; c < 3; ++c) {
                const double d = sv[static_cast<std::size_t>(c)] - se[static_cast<std::size_t>(c)];
                comp[static_cast<std::size_t>(c)] += d * d;
            }
        }
        const double area = m.props[static_cast<std::size_t>(e)].area;
        double tot2 = 0;
        for (int c = 0; c < 3; ++c) tot2 += area * area * comp[static_cast<std::size_t>(c)];
        out.values[static_cast<std::size_t>(e)] = std::sqrt(tot2);
    }
    return out;
}

// Threshold selection: duplicates (within 1e-12 relative) are removed, the
// remaining values sorted descending, and T_val read T% of the way down the
// reduced list; every element at or above T_val is marked.
inline RefinementPlan select_elements(const IndicatorField& field, double T_percent) {
    if (!(T_percent > 0 && T_percent <= 100)) throw Error("select_elements: T must be in (0, 100]");
    const auto& vals = field.values;
    if (vals.empty()) throw NothingToRefine("empty indicator field");
    double vmax = 0;
    for (double v : vals) {
        if (!std::isfinite(v) || v < 0) throw Error("select_elements: invalid indicator value");
        vmax = std::max(vmax, v);
    }
    if (vmax <= 0) throw NothingToRefine("all indicator values are zero");

    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> uniq;
    for (double v : sorted) {
        if (uniq.empty() || uniq.back() - v > 1e-12 * uniq.back()) uniq.push_back(v);
    }
    const auto L = static_cast<long>(uniq.size());
    long idx = static_cast<long>(std::ceil(T_percent * static_cast<double>(L) / 100.0 - 1e-9));
    idx = std::clamp(idx, 1L, L);
    const double t_val = uniq[static_cast<std::size_t>(idx - 1)];

    RefinementPlan plan;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] >= t_val * (1.0 - 1e-12)) plan.marked.push_back(static_cast<int>(i));
    return plan;
}

// Combination of two plans from the same mesh: the target size is the
// shorter list; intersection goes first, then alternating picks from each
// list in descending indicator order (first list leads).
inline RefinementPlan combine_plans(const IndicatorField& fa, const RefinementPlan& pa, const IndicatorField& fb,
                                    const RefinementPlan& pb) {
    if (fa.values.size() != fb.values.size()) throw Error("combine_plans: fields from different meshes");
    const std::size_t target = std::min(pa.marked.size(), pb.marked.size());
    auto ordered = [](const IndicatorField& f, const RefinementPlan& p) {
        std::vector<int> list = p.marked;
        std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
            return f.values[static_cast<std::size_t>(a)] > f.values[static_cast<std::size_t>(b)];
        });
        return list;
    };
    const std::vector<int> la = ordered(fa, pa), lb = ordered(fb, pb);
    const std::set<int> sa(la.begin(), la.end()), sb(lb.begin(), lb.end());

    std::vector<int> chosen;
    std::set<int> chosen_set;
    for (int e : la) {
        if (chosen.size() >= target) break;
        if (sb.count(e)) {
            chosen.push_back(e);
            chosen_set.insert(e);
        }
    }
    std::size_t ia = 0, ib = 0;
    bool turn_a = true;
    while (chosen.size() < target) {
        auto take = [&](const std::vector<int>& list, std::size_t& i) {
            while (i < list.size() && chosen_set.count(list[i])) ++i;
            if (i == list.size()) return false;
            chosen.push_back(list[i]);
            chosen_set.insert(list[i]);
            ++i;
            return true;
        };
        bool advanced = turn_a ? take(la, ia) : take(lb, ib);
        if (!advanced) advanced = turn_a ? take(lb, ib) : take(la, ia);
        if (!advanced) break;
        turn_a = !turn_a;
    }
    RefinementPlan out;
    out.marked = std::move(chosen);
    std::sort(out.marked.begin(), out.marked.end());
    return out;
}

}  // namespace vema
