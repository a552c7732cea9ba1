#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "vema/common.hpp"

namespace vema {

// A polygon is a CCW loop of vertices without an explicit closing point.
using Polygon = std::vector<Vec2>;

inline double signed_area(const Polygon& p) {
    double a = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        a += cross(u, v);
    }
    return 0.5 * a;
}

inline double polygon_diameter(const Polygon& p) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d2 = std::max(d2, dist2(p[i], p[j]));
    return std::sqrt(d2);
}

inline Vec2 polygon_centroid(const Polygon& p) {
    double a = 0.0;
    Vec2 c{0, 0};
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        const double w = cross(u, v);
        a += w;
        c += (u + v) * w;
    }
    if (std::abs(a) < std::numeric_limits<double>::min()) throw DegenerateGeometry("centroid of zero-area polygon");
    return c / (3.0 * a);
}

struct PolygonProps {
    double area;
    Vec2 centroid;
    double diameter;
};

// Area (shoelace), area-weighted centroid and max vertex distance in one pass
// of validation: throws on degenerate input.
inline PolygonProps polygon_props(const Polygon& p) {
    if (p.size() < 3) throw DegenerateGeometry("polygon with fewer than 3 vertices");
    const double diam = polygon_diameter(p);
    const double area = signed_area(p);
    if (!(area > 1e-14 * diam * diam)) throw DegenerateGeometry("polygon area below tolerance");
    return {area, polygon_centroid(p), diam};
}

inline bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Simplicity check (no proper edge crossings, no repeated vertices).
inline bool polygon_is_simple(const Polygon& p, double tol) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dist2(p[i], p[j]) <= tol * tol) return false;
        }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
        }
    }
    return true;
}

// Winding-number containment; points within tol of the boundary count as
// inside.
inline bool point_in_polygon(const Vec2& q, const Polygon& p, double tol) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = p[i];
        const Vec2 b = p[(i + 1) % n];
        const Vec2 ab = b - a;
        const double L2 = norm2(ab);
        if (L2 == 0) continue;
        const double t = std::clamp(dot(q - a, ab) / L2, 0.0, 1.0);
        if (dist2(q, a + ab * t) <= tol * tol) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool above_i = p[i].y > q.y;
        const bool above_j = p[j].y > q.y;
        if (above_i != above_j) {
            const double xint = p[j].x + (p[i].x - p[j].x) * (q.y - p[j].y) / (p[i].y - p[j].y);
            if (q.x < xint) inside = !inside;
        }
    }
    return inside;
}

inline double distance_to_boundary(const Vec2& q, const Polygon& p) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = p[i];
        const Vec2 ab = p[(i + 1) % n] - a;
        const double L2 = norm2(ab);
        const double t = L2 > 0 ? std::clamp(dot(q - a, ab) / L2, 0.0, 1.0) : 0.0;
        best = std::min(best, dist(q, a + ab * t));
    }
    return best;
}

// Keeps the side where n.(p - m) <= 0. Subject may be non-convex; the result
// of clipping a non-convex loop can pinch, which callers detect separately.
inline Polygon clip_half_plane(const Polygon& poly, const Vec2& m, const Vec2& normal, double tol) {
    Polygon out;
    out.reserve(poly.size() + 2);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % n];
        const double fa = dot(normal, a - m);
        const double fb = dot(normal, b - m);
        if (fa <= tol) out.push_back(a);
        if ((fa < -tol && fb > tol) || (fa > tol && fb < -tol)) {
            const double t = fa / (fa - fb);
            out.push_back(a + (b - a) * t);
        }
    }
    // drop consecutive near-duplicates
    Polygon res;
    for (const Vec2& v : out) {
        if (res.empty() || dist2(res.back(), v) > tol * tol) res.push_back(v);
    }
    while (res.size() > 1 && dist2(res.front(), res.back()) <= tol * tol) res.pop_back();
    if (res.size() < 3) return {};
    return res;
}

// True if the loop visits a position twice (zero-width bridge after clipping
// a non-convex subject).
inline bool polygon_has_pinch(const Polygon& p, double tol) {
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (dist2(p[i], p[j]) <= tol * tol) return true;
    return false;
}

// Removes zero-width antennas: vertices where the boundary reverses onto
// itself along a straight line. Clipping a non-convex subject can leave such
// spikes when a disconnected piece collapses to zero area.
inline Polygon remove_spikes(Polygon p, double tol) {
    bool changed = true;
    while (changed && p.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2& a = p[(i + p.size() - 1) % p.size()];
            const Vec2& b = p[i];
            const Vec2& c = p[(i + 1) % p.size()];
            const Vec2 ab = b - a, bc = c - b;
            const double la = norm(ab), lc = norm(bc);
            if (la <= tol || lc <= tol) {
                p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
            if (std::abs(cross(ab, bc)) <= 1e-9 * la * lc && dot(ab, bc) < 0) {
                p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return p;
}

namespace detail {

struct Crossing {
    std::size_t ea, eb;  // edge indices on subject / hole
    double ta, tb;       // parameters along those edges
    Vec2 p;
    bool enter;  // subject boundary enters the hole here
    bool visited = false;
};

}  // namespace detail

// Difference subject \ hole traced along boundaries. Subject must be simple
// CCW, hole convex CCW. Throws SplitCell when the result is disconnected or
// the hole is strictly interior (annulus); throws DegenerateGeometry on
// grazing/collinear configurations, which callers resolve by jittering.
inline Polygon polygon_difference(const Polygon& subject, const Polygon& hole, double tol) {
    const std::size_t na = subject.size(), nb = hole.size();
    std::vector<detail::Crossing> xs;
    for (std::size_t i = 0; i < na; ++i) {
        const Vec2 a0 = subject[i], a1 = subject[(i + 1) % na];
        const Vec2 da = a1 - a0;
        for (std::size_t j = 0; j < nb; ++j) {
            const Vec2 b0 = hole[j], b1 = hole[(j + 1) % nb];
            const Vec2 db = b1 - b0;
            const double den = cross(da, db);
            const double la = norm(da), lb = norm(db);
            if (std::abs(den) <= 1e-14 * la * lb) {
                // parallel: only a problem when the segments actually overlap
                const double d0 = std::abs(cross(da, b0 - a0)) / std::max(la, 1e-300);
                if (d0 <= tol) {
                    const double s0 = dot(b0 - a0, da) / (la * la);
                    const double s1 = dot(b1 - a0, da) / (la * la);
                    if (std::max(std::min(s0, s1), 0.0) <= std::min(std::max(s0, s1), 1.0))
                        throw DegenerateGeometry("collinear overlap in polygon difference");
                }
                continue;
            }
            const double ta = cross(b0 - a0, db) / den;
            const double tb = cross(b0 - a0, da) / den;
            const double eps_a = tol / std::max(la, 1e-300);
            const double eps_b = tol / std::max(lb, 1e-300);
            if (ta < -eps_a || ta > 1 + eps_a || tb < -eps_b || tb > 1 + eps_b) continue;
            if (ta < eps_a || ta > 1 - eps_a || tb < eps_b || tb > 1 - eps_b)
                throw DegenerateGeometry("grazing intersection in polygon difference");
            detail::Crossing c;
            c.ea = i;
            c.eb = j;
            c.ta = ta;
            c.tb = tb;
            c.p = a0 + da * ta;
            c.enter = cross(db, da) > 0;
            xs.push_back(c);
        }
    }

    if (xs.empty()) {
        bool hole_vertex_inside = point_in_polygon(hole[0], subject, tol);
        bool subject_vertex_inside = point_in_polygon(subject[0], hole, tol);
        if (hole_vertex_inside && !subject_vertex_inside) throw SplitCell("hole strictly inside cell");
        if (subject_vertex_inside) throw DegenerateGeometry("cell swallowed by hole");
        return subject;
    }
    if (xs.size() % 2 != 0) throw DegenerateGeometry("odd crossing count in polygon difference");

    std::vector<std::size_t> order_a(xs.size()), order_b(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) order_a[k] = order_b[k] = k;
    std::sort(order_a.begin(), order_a.end(), [&](std::size_t u, std::size_t v) {
        return std::make_pair(xs[u].ea, xs[u].ta) < std::make_pair(xs[v].ea, xs[v].ta);
    });
    std::sort(order_b.begin(), order_b.end(), [&](std::size_t u, std::size_t v) {
        return std::make_pair(xs[u].eb, xs[u].tb) < std::make_pair(xs[v].eb, xs[v].tb);
    });
    std::vector<std::size_t> pos_a(xs.size()), pos_b(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        pos_a[order_a[k]] = k;
        pos_b[order_b[k]] = k;
    }

    // enter/exit must alternate along the subject
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (xs[order_a[k]].enter == xs[order_a[(k + 1) % xs.size()]].enter)
            throw DegenerateGeometry("non-alternating crossings in polygon difference");
    }

    auto first_exit = [&]() -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < xs.size(); ++k)
            if (!xs[k].enter && !xs[k].visited) return k;
        return std::nullopt;
    };

    Polygon loop;
    const std::size_t start = *first_exit();
    std::size_t cur = start;
    do {
        // walk the subject forward from this exit to the next crossing
        xs[cur].visited = true;
        loop.push_back(xs[cur].p);
        const std::size_t next_a = order_a[(pos_a[cur] + 1) % xs.size()];
        {
            std::size_t e = xs[cur].ea;
            const std::size_t e_stop = xs[next_a].ea;
            while (e != e_stop) {
                e = (e + 1) % na;
                loop.push_back(subject[e]);
            }
            if (xs[cur].ea == xs[next_a].ea && xs[next_a].ta < xs[cur].ta) {
                // wrapped all the way around the subject on one edge
                for (std::size_t s = 1; s <= na; ++s) loop.push_back(subject[(xs[cur].ea + s) % na]);
            }
        }
        if (!xs[next_a].enter) throw DegenerateGeometry("expected entering crossing");
        // walk the hole backward (its boundary is reversed in the difference)
        xs[next_a].visited = true;
        loop.push_back(xs[next_a].p);
        std::size_t cb = next_a;
        const std::size_t prev_b = order_b[(pos_b[cb] + xs.size() - 1) % xs.size()];
        {
            std::size_t e = xs[cb].eb;
            const std::size_t e_stop = xs[prev_b].eb;
            while (e != e_stop) {
                loop.push_back(hole[e]);
                e = (e + nb - 1) % nb;
            }
            if (xs[cb].eb == xs[prev_b].eb && xs[prev_b].tb > xs[cb].tb) {
                for (std::size_t s = 0; s < nb; ++s) loop.push_back(hole[(xs[cb].eb + nb - s) % nb]);
            }
        }
        if (xs[prev_b].enter) throw DegenerateGeometry("expected exiting crossing");
        cur = prev_b;
    } while (cur != start);

    for (const auto& c : xs)
        if (!c.visited) throw SplitCell("difference produced multiple pieces");

    Polygon res;
    for (const Vec2& v : loop)
        if (res.empty() || dist2(res.back(), v) > tol * tol) res.push_back(v);
    while (res.size() > 1 && dist2(res.front(), res.back()) <= tol * tol) res.pop_back();
    if (res.size() < 3 || signed_area(res) <= 0) throw DegenerateGeometry("invalid difference result");
    return res;
}

// Outer boundary plus optional holes. Problem B's notch is part of the outer
// loop; holes are for fully interior voids.
struct DomainShape {
    Polygon outer;
    std::vector<Polygon> holes;

    double area() const {
        double a = signed_area(outer);
        for (const auto& h : holes) a -= signed_area(h);
        return a;
    }
    double diameter() const { return polygon_diameter(outer); }

    bool contains(const Vec2& p, double margin = 0.0) const {
        if (!point_in_polygon(p, outer, 0.0)) return false;
        if (margin > 0 && distance_to_boundary(p, outer) < margin) return false;
        for (const auto& h : holes) {
            if (point_in_polygon(p, h, margin)) return false;
        }
        return true;
    }
};

enum class SeedMode { Structured, Random };

struct SeedSet {
    std::vector<Vec2> points;
    SeedMode mode = SeedMode::Random;
    std::uint64_t rng_seed = 0;
};

namespace detail {

inline void bounding_box(const Polygon& p, Vec2& lo, Vec2& hi) {
    lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi = {-lo.x, -lo.y};
    for (const Vec2& v : p) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

// Uniform bucket grid over a bounding box; ring queries give candidates in
// roughly ascending distance for the clipping prune.
struct PointGrid {
    Vec2 lo;
    double cell = 1.0;
    int nx = 1, ny = 1;
    std::vector<std::vector<int>> buckets;

    void build(const std::vector<Vec2>& pts, const Vec2& blo, const Vec2& bhi, double cell_size) {
        lo = blo;
        cell = std::max(cell_size, 1e-300);
        nx = std::max(1, static_cast<int>(std::ceil((bhi.x - blo.x) / cell)));
        ny = std::max(1, static_cast<int>(std::ceil((bhi.y - blo.y) / cell)));
        buckets.assign(static_cast<std::size_t>(nx) * ny, {});
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) buckets[bucket_of(pts[i])].push_back(i);
    }
    std::size_t bucket_of(const Vec2& p) const {
        int ix = std::clamp(static_cast<int>((p.x - lo.x) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y - lo.y) / cell), 0, ny - 1);
        return static_cast<std::size_t>(iy) * nx + ix;
    }
    template <class F>
    void for_ring(const Vec2& center, int r, F&& f) const {
        int cx = std::clamp(static_cast<int>((center.x - lo.x) / cell), 0, nx - 1);
        int cy = std::clamp(static_cast<int>((center.y - lo.y) / cell), 0, ny - 1);
        for (int iy = cy - r; iy <= cy + r; ++iy) {
            if (iy < 0 || iy >= ny) continue;
            for (int ix = cx - r; ix <= cx + r; ++ix) {
                if (ix < 0 || ix >= nx) continue;
                if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
                for (int id : buckets[static_cast<std::size_t>(iy) * nx + ix]) f(id);
            }
        }
    }
    int max_ring() const { return std::max(nx, ny); }
};

inline double max_dist2_to_vertices(const Vec2& s, const Polygon& p) {
    double m = 0.0;
    for (const Vec2& v : p) m = std::max(m, dist2(s, v));
    return m;
}

}  // namespace detail

struct VoronoiCell {
    Polygon poly;
    int seed = -1;
};

struct VoronoiResult {
    std::vector<VoronoiCell> cells;  // one per seed, in seed order
    std::vector<Vec2> seeds;         // final positions (jitter may move them)
};

// Bounded Voronoi tessellation by half-plane clipping of the domain polygon
// against each bisector, pruned with a bucket grid so only nearby seeds are
// visited. Cells overlapping holes are trimmed by polygon_difference. Seeds
// whose cell comes out degenerate or disconnected are jittered and the whole
// tessellation is recomputed (bounded retries).
inline VoronoiResult bounded_voronoi(const SeedSet& seed_set, const DomainShape& domain) {
    const double diam = domain.diameter();
    const double tol = 1e-9 * diam;
    const double clip_tol = 1e-13 * diam;
    std::vector<Vec2> seeds = seed_set.points;
    const std::size_t n = seeds.size();
    if (n == 0) throw Error("bounded_voronoi: empty seed set");
    for (std::size_t i = 0; i < n; ++i) {
        if (!domain.contains(seeds[i])) throw Error("bounded_voronoi: seed outside domain");
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist2(seeds[i], seeds[j]) <= tol * tol) throw DuplicateSeed("coincident seeds");
    }

    Rng jitter_rng = Rng(seed_set.rng_seed).substream(0x6a177e52ull);

    for (int attempt = 0; attempt < 12; ++attempt) {
        Vec2 lo, hi;
        detail::bounding_box(domain.outer, lo, hi);
        detail::PointGrid grid;
        const double spacing = std::max((hi.x - lo.x) * (hi.y - lo.y) / std::max<double>(1.0, static_cast<double>(n)), 1e-300);
        grid.build(seeds, lo, hi, std::max(std::sqrt(spacing), 1e-6 * diam));

        std::vector<VoronoiCell> cells(n);
        std::vector<int> failed;
        std::vector<std::pair<double, int>> cand;
        for (std::size_t i = 0; i < n; ++i) {
            try {
                Polygon poly = domain.outer;
                double r2 = detail::max_dist2_to_vertices(seeds[i], poly);
                for (int ring = 0; ring <= grid.max_ring(); ++ring) {
                    const double ring_min = std::max(0, ring - 1) * grid.cell;
                    if (ring_min * ring_min > 4.0 * r2) break;
                    cand.clear();
                    grid.for_ring(seeds[i], ring, [&](int j) {
                        if (j != static_cast<int>(i)) cand.emplace_back(dist2(seeds[i], seeds[j]), j);
                    });
                    std::sort(cand.begin(), cand.end());
                    for (auto [d2, j] : cand) {
                        if (d2 > 4.0 * r2) break;
                        const Vec2 mid = (seeds[i] + seeds[j]) * 0.5;
                        const Vec2 nrm = seeds[j] - seeds[i];
                        poly = clip_half_plane(poly, mid, nrm, clip_tol);
                        if (poly.empty()) throw DegenerateGeometry("cell clipped away");
                        r2 = detail::max_dist2_to_vertices(seeds[i], poly);
                    }
                }
                for (const Polygon& h : domain.holes) poly = polygon_difference(poly, h, tol);
                poly = remove_spikes(std::move(poly), tol);
                if (poly.size() < 3 || signed_area(poly) <= tol * tol) throw DegenerateGeometry("degenerate cell");
                if (polygon_has_pinch(poly, tol)) throw SplitCell("pinched cell");
                if (!point_in_polygon(seeds[i], poly, tol)) throw DegenerateGeometry("seed escaped its cell");
                for (const Vec2& v : poly) {
                    if (!point_in_polygon(v, domain.outer, tol)) throw DegenerateGeometry("cell vertex outside domain");
                    for (const Polygon& h : domain.holes)
                        if (point_in_polygon(v, h, 0.0) && distance_to_boundary(v, h) > tol)
                            throw DegenerateGeometry("cell vertex inside hole");
                }
                cells[i] = {std::move(poly), static_cast<int>(i)};
            } catch (const Error&) {
                failed.push_back(static_cast<int>(i));
            }
        }

        if (failed.empty()) return {std::move(cells), std::move(seeds)};

        // Escalating jitter: split or degenerate cells are usually caused by a
        // cell wrapping a hole corner, which only a structural move resolves.
        const double base_mag = std::min(1e-5 * std::pow(3.0, attempt), 0.03) * diam;
        for (int i : failed) {
            Rng r = jitter_rng.substream(static_cast<std::uint64_t>(attempt) * 1000003ull + static_cast<std::uint64_t>(i));
            for (int tries = 0; tries < 64; ++tries) {
                const double ang = r.range(0, 2 * M_PI);
                const double mag = base_mag * (1.0 + 0.25 * tries);
                Vec2 moved = seeds[static_cast<std::size_t>(i)] + Vec2{std::cos(ang), std::sin(ang)} * mag;
                if (domain.contains(moved, tol)) {
                    bool clash = false;
                    for (std::size_t j = 0; j < n; ++j)
                        if (j != static_cast<std::size_t>(i) && dist2(moved, seeds[j]) <= tol * tol) clash = true;
                    if (!clash) {
                        seeds[static_cast<std::size_t>(i)] = moved;
                        break;
                    }
                }
            }
        }
    }
    throw DegenerateGeometry("bounded_voronoi: retries exhausted");
}

// Lloyd relaxation: move every seed to its cell centroid until the
// coefficient of variation of cell areas drops below tol.
inline SeedSet smooth_seeds(const SeedSet& seed_set, const DomainShape& domain, int max_iters, double area_cv_tol) {
    SeedSet cur = seed_set;
    const double tol = 1e-9 * domain.diameter();
    for (int it = 0; it < max_iters; ++it) {
        VoronoiResult vr = bounded_voronoi(cur, domain);
        cur.points = vr.seeds;
        double mean = 0.0;
        std::vector<double> areas(vr.cells.size());
        for (std::size_t i = 0; i < vr.cells.size(); ++i) {
            areas[i] = signed_area(vr.cells[i].poly);
            mean += areas[i];
        }
        mean /= static_cast<double>(areas.size());
        double var = 0.0;
        for (double a : areas) var += (a - mean) * (a - mean);
        const double cv = std::sqrt(var / static_cast<double>(areas.size())) / mean;
        if (cv < area_cv_tol) break;
        std::vector<Vec2> moved = cur.points;
        for (std::size_t i = 0; i < vr.cells.size(); ++i) {
            const Vec2 c = polygon_centroid(vr.cells[i].poly);
            if (!domain.contains(c, tol)) continue;
            bool clash = false;
            for (std::size_t j = 0; j < moved.size(); ++j)
                if (j != i && dist2(c, moved[j]) <= tol * tol) clash = true;
            if (!clash) moved[i] = c;
        }
        cur.points = std::move(moved);
    }
    return cur;
}

// Grid of nx-by-ny cell centers over the outer bounding box; seeds falling in
// holes (or outside a non-rectangular outer boundary) are dropped.
inline SeedSet structured_seeds(const DomainShape& domain, int nx, int ny, std::uint64_t rng_seed = 0) {
    Vec2 lo, hi;
    detail::bounding_box(domain.outer, lo, hi);
    SeedSet s;
    s.mode = SeedMode::Structured;
    s.rng_seed = rng_seed;
    const double margin = 1e-12 * domain.diameter();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec2 p{lo.x + (i + 0.5) * (hi.x - lo.x) / nx, lo.y + (j + 0.5) * (hi.y - lo.y) / ny};
            if (domain.contains(p, margin)) s.points.push_back(p);
        }
    if (s.points.empty()) throw Error("structured_seeds: no seeds inside domain");
    return s;
}

inline SeedSet random_seeds(const DomainShape& domain, int count, std::uint64_t rng_seed) {
    Vec2 lo, hi;
    detail::bounding_box(domain.outer, lo, hi);
    const double diam = domain.diameter();
    SeedSet s;
    s.mode = SeedMode::Random;
    s.rng_seed = rng_seed;
    Rng rng = Rng(rng_seed).substream(0x5eedull);
    const double min_sep = 1e-5 * diam / std::sqrt(static_cast<double>(std::max(count, 1)));
    int guard = 0;
    while (static_cast<int>(s.points.size()) < count) {
        if (++guard > 100000 * count) throw Error("random_seeds: sampling failed");
        Vec2 p{rng.range(lo.x, hi.x), rng.range(lo.y, hi.y)};
        if (!domain.contains(p, 1e-7 * diam)) continue;
        bool clash = false;
        for (const Vec2& q : s.points)
            if (dist2(p, q) < min_sep * min_sep) clash = true;
        if (!clash) s.points.push_back(p);
    }
    return s;
}

}  // namespace vema
