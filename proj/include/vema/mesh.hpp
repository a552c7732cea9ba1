#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vema/geometry.hpp"

namespace vema {

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    int tag = 0;
};

// Polygonal mesh. Immutable after construction; refinement returns a new
// mesh. Hanging nodes are ordinary (collinear) loop vertices: after the
// stitch pass every vertex lying on an element edge is part of that
// element's loop, so interior sub-edges are shared exactly pairwise.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> elements;          // CCW vertex loops
    std::vector<std::vector<int>> vertex_elements;   // adjacency
    std::vector<BoundaryEdge> boundary;              // edges incident to one element
    std::vector<char> vertex_on_boundary;
    std::vector<PolygonProps> props;                 // per-element area/centroid/diameter
    double merge_tol = 0.0;

    Polygon element_polygon(int e) const {
        Polygon p;
        p.reserve(elements[static_cast<std::size_t>(e)].size());
        for (int v : elements[static_cast<std::size_t>(e)]) p.push_back(vertices[static_cast<std::size_t>(v)]);
        return p;
    }
    long node_count() const { return static_cast<long>(vertices.size()); }
    long element_count() const { return static_cast<long>(elements.size()); }
    double total_area() const {
        double a = 0;
        for (const auto& pr : props) a += pr.area;
        return a;
    }
    double mean_diameter() const {
        double d = 0;
        for (const auto& pr : props) d += pr.diameter;
        return d / static_cast<double>(props.size());
    }
    double diameter() const {
        Vec2 lo, hi;
        detail::bounding_box(vertices, lo, hi);
        return dist(lo, hi);
    }
};

namespace detail {

struct VertexMerger {
    PointGrid grid;
    std::vector<Vec2> pts;
    double tol;

    VertexMerger(const Vec2& lo, const Vec2& hi, double tol_, std::size_t expected) : tol(tol_) {
        grid.lo = lo;
        grid.cell = std::max({(hi.x - lo.x), (hi.y - lo.y), tol * 8}) / std::max(8.0, std::sqrt(static_cast<double>(expected)));
        grid.nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / grid.cell)));
        grid.ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / grid.cell)));
        grid.buckets.assign(static_cast<std::size_t>(grid.nx) * grid.ny, {});
    }
    int find(const Vec2& p) const {
        int hit = -1;
        for (int r = 0; r <= 1 && hit < 0; ++r)
            grid.for_ring(p, r, [&](int id) {
                if (hit < 0 && dist2(pts[static_cast<std::size_t>(id)], p) <= tol * tol) hit = id;
            });
        return hit;
    }
    int add(const Vec2& p) {
        int hit = find(p);
        if (hit >= 0) return hit;
        pts.push_back(p);
        const int id = static_cast<int>(pts.size()) - 1;
        grid.buckets[grid.bucket_of(p)].push_back(id);
        return id;
    }
    template <class F>
    void near_segment(const Vec2& a, const Vec2& b, double pad, F&& f) const {
        const double x0 = std::min(a.x, b.x) - pad, x1 = std::max(a.x, b.x) + pad;
        const double y0 = std::min(a.y, b.y) - pad, y1 = std::max(a.y, b.y) + pad;
        int ix0 = std::clamp(static_cast<int>((x0 - grid.lo.x) / grid.cell), 0, grid.nx - 1);
        int ix1 = std::clamp(static_cast<int>((x1 - grid.lo.x) / grid.cell), 0, grid.nx - 1);
        int iy0 = std::clamp(static_cast<int>((y0 - grid.lo.y) / grid.cell), 0, grid.ny - 1);
        int iy1 = std::clamp(static_cast<int>((y1 - grid.lo.y) / grid.cell), 0, grid.ny - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                for (int id : grid.buckets[static_cast<std::size_t>(iy) * grid.nx + ix]) f(id);
    }
};

}  // namespace detail

// Assembles a conforming mesh from loose polygons: vertices merged within
// tol, then every vertex lying strictly inside an element edge is inserted
// into that loop (this is what absorbs hanging nodes).
inline Mesh build_mesh(const std::vector<Polygon>& polys, double merge_tol) {
    if (polys.empty()) throw Error("build_mesh: no polygons");
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    std::size_t total = 0;
    for (const auto& p : polys) {
        total += p.size();
        for (const Vec2& v : p) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
    }
    detail::VertexMerger merger(lo, hi, merge_tol, total);

    std::vector<std::vector<int>> loops;
    loops.reserve(polys.size());
    for (const auto& p : polys) {
        Polygon q = p;
        if (signed_area(q) < 0) std::reverse(q.begin(), q.end());
        std::vector<int> loop;
        for (const Vec2& v : q) {
            const int id = merger.add(v);
            if (loop.empty() || loop.back() != id) loop.push_back(id);
        }
        while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
        if (loop.size() < 3) throw DegenerateGeometry("build_mesh: degenerate element loop");
        loops.push_back(std::move(loop));
    }

    // stitch: insert vertices that fall on an edge interior
    std::vector<std::vector<int>> stitched;
    stitched.reserve(loops.size());
    for (const auto& loop : loops) {
        std::vector<int> out;
        const std::size_t n = loop.size();
        for (std::size_t k = 0; k < n; ++k) {
            const int va = loop[k], vb = loop[(k + 1) % n];
            const Vec2 A = merger.pts[static_cast<std::size_t>(va)], B = merger.pts[static_cast<std::size_t>(vb)];
            out.push_back(va);
            const double L2 = dist2(A, B);
            if (L2 == 0) continue;
            std::vector<std::pair<double, int>> on_edge;
            merger.near_segment(A, B, merge_tol * 2, [&](int id) {
                if (id == va || id == vb) return;
                const Vec2 P = merger.pts[static_cast<std::size_t>(id)];
                const double t = dot(P - A, B - A) / L2;
                if (t <= 0 || t >= 1) return;
                if (dist2(P, A + (B - A) * t) <= merge_tol * merge_tol) on_edge.emplace_back(t, id);
            });
            std::sort(on_edge.begin(), on_edge.end());
            for (auto [t, id] : on_edge)
                if (out.back() != id) out.push_back(id);
        }
        stitched.push_back(std::move(out));
    }

    // drop orphan vertices
    std::vector<int> remap(merger.pts.size(), -1);
    Mesh m;
    m.merge_tol = merge_tol;
    for (const auto& loop : stitched)
        for (int v : loop)
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(m.vertices.size());
                m.vertices.push_back(merger.pts[static_cast<std::size_t>(v)]);
            }
    for (const auto& loop : stitched) {
        std::vector<int> l;
        l.reserve(loop.size());
        for (int v : loop) l.push_back(remap[static_cast<std::size_t>(v)]);
        m.elements.push_back(std::move(l));
    }

    m.vertex_elements.assign(m.vertices.size(), {});
    for (std::size_t e = 0; e < m.elements.size(); ++e)
        for (int v : m.elements[e]) m.vertex_elements[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& loop : m.elements)
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const int a = loop[k], b = loop[(k + 1) % loop.size()];
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    m.vertex_on_boundary.assign(m.vertices.size(), 0);
    for (const auto& [key, c] : edge_count) {
        if (c > 2) throw Error("build_mesh: edge shared by more than two elements");
        if (c == 1) {
            m.boundary.push_back({key.first, key.second, 0});
            m.vertex_on_boundary[static_cast<std::size_t>(key.first)] = 1;
            m.vertex_on_boundary[static_cast<std::size_t>(key.second)] = 1;
        }
    }

    m.props.reserve(m.elements.size());
    for (std::size_t e = 0; e < m.elements.size(); ++e) m.props.push_back(polygon_props(m.element_polygon(static_cast<int>(e))));
    return m;
}

// All elements sharing at least one vertex with e, excluding e itself.
inline std::vector<int> surrounding_elements(const Mesh& m, int e) {
    std::set<int> out;
    for (int v : m.elements[static_cast<std::size_t>(e)])
        for (int o : m.vertex_elements[static_cast<std::size_t>(v)])
            if (o != e) out.insert(o);
    return {out.begin(), out.end()};
}

struct RefinementPlan {
    std::vector<int> marked;  // ascending, unique
};

namespace detail {

inline SeedSet make_refine_seeds(const Polygon& parent, int count, SeedMode mode, Rng rng) {
    const PolygonProps pp = polygon_props(parent);
    Vec2 lo, hi;
    bounding_box(parent, lo, hi);
    const double margin = 1e-7 * pp.diameter;
    SeedSet s;
    s.mode = mode;
    s.rng_seed = rng.seed();
    const DomainShape dom{parent, {}};

    if (mode == SeedMode::Structured) {
        const double w = hi.x - lo.x, h = hi.y - lo.y;
        int bm = 1, bk = count;
        double best = 1e300;
        for (int mcols = 1; mcols <= count; ++mcols) {
            const int krows = (count + mcols - 1) / mcols;
            const double pen = std::abs(std::log((static_cast<double>(mcols) * h) / (static_cast<double>(krows) * w)));
            if (pen < best - 1e-12 ||
                (pen < best + 1e-12 && (mcols * krows < bm * bk || (mcols * krows == bm * bk && mcols < bm)))) {
                best = pen;
                bm = mcols;
                bk = krows;
            }
        }
        std::vector<Vec2> pts;
        for (int j = 0; j < bk; ++j)
            for (int i = 0; i < bm; ++i) {
                Vec2 p{lo.x + (i + 0.5) * w / bm, lo.y + (j + 0.5) * h / bk};
                if (dom.contains(p, margin)) pts.push_back(p);
            }
        if (static_cast<int>(pts.size()) > count) {
            std::vector<std::pair<double, std::size_t>> ranked;
            for (std::size_t i = 0; i < pts.size(); ++i) ranked.emplace_back(distance_to_boundary(pts[i], parent), i);
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::set<std::size_t> drop;
            for (std::size_t k = 0; k < pts.size() - static_cast<std::size_t>(count); ++k) drop.insert(ranked[k].second);
            std::vector<Vec2> kept;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (!drop.count(i)) kept.push_back(pts[i]);
            pts = std::move(kept);
        }
        s.points = std::move(pts);
    }

    const double min_sep = 1e-4 * pp.diameter;
    int guard = 0;
    while (static_cast<int>(s.points.size()) < count) {
        if (++guard > 200000) throw RefinementFailed("seed sampling failed inside element");
        Vec2 p{rng.range(lo.x, hi.x), rng.range(lo.y, hi.y)};
        if (!dom.contains(p, margin)) continue;
        bool clash = false;
        for (const Vec2& q : s.points)
            if (dist2(p, q) < min_sep * min_sep) clash = true;
        if (!clash) s.points.push_back(p);
    }
    return s;
}

}  // namespace detail

// Element refinement per the marked set: each marked element is replaced by a
// sub-tessellation of n_v seeds (its own vertex count), the seeds are Lloyd
// smoothed, and new nodes on original edges are snapped to the nearest of
// n_new+2 evenly spaced optimal positions. Edges shared by two refined
// elements pool their new nodes into one optimal set. Nodes snapped onto the
// same position (or onto an endpoint) merge. Conformity is restored by the
// build_mesh stitch pass, which also inserts the surviving nodes into
// unrefined neighbour loops.
inline Mesh refine_elements(const Mesh& m, const RefinementPlan& plan, SeedMode mode, std::uint64_t rng_seed) {
    if (plan.marked.empty()) throw Error("refine_elements: empty plan");
    for (int e : plan.marked)
        if (e < 0 || e >= static_cast<int>(m.elements.size())) throw Error("refine_elements: invalid element index");
    const double mesh_diam = m.diameter();
    const double tol = 1e-9 * mesh_diam;
    // area checks need an absolute floor: coordinates live at mesh scale, so
    // shoelace rounding does not shrink with the parent
    const double area_noise = 1e-12 * mesh_diam * mesh_diam;

    std::vector<char> is_marked(m.elements.size(), 0);
    for (int e : plan.marked) is_marked[static_cast<std::size_t>(e)] = 1;

    std::map<int, std::vector<Polygon>> children;
    Rng base(rng_seed);
    for (int e : plan.marked) {
        const Polygon parent = m.element_polygon(e);
        const int nv = static_cast<int>(parent.size());
        const double parent_area = m.props[static_cast<std::size_t>(e)].area;
        bool done = false;
        std::string last_err;
        for (int attempt = 0; attempt < 5 && !done; ++attempt) {
            try {
                Rng sub = base.substream(static_cast<std::uint64_t>(e) * 8 + static_cast<std::uint64_t>(attempt));
                SeedSet seeds = detail::make_refine_seeds(parent, nv, mode, sub);
                const DomainShape dom{parent, {}};
                seeds = smooth_seeds(seeds, dom, 100, 0.05);
                VoronoiResult vr = bounded_voronoi(seeds, dom);
                double area_sum = 0;
                std::vector<Polygon> polys;
                for (auto& c : vr.cells) {
                    area_sum += signed_area(c.poly);
                    polys.push_back(std::move(c.poly));
                }
                if (std::abs(area_sum - parent_area) > 1e-9 * parent_area + area_noise)
                    throw RefinementFailed("sub-tessellation area mismatch");
                children[e] = std::move(polys);
                done = true;
            } catch (const Error& err) {
                last_err = err.what();
            }
        }
        if (!done) throw RefinementFailed("element " + std::to_string(e) + ": " + last_err);
    }

    // Gather new nodes per original edge (keyed by vertex indices so both
    // refined neighbours pool into the same entry).
    struct EdgeNodes {
        Vec2 A, B;
        std::vector<Vec2> nodes;
        std::vector<Vec2> on_endpoint;  // new nodes landing within tol of A or B
        std::vector<int> parents;
        double min_parent_diam = 1e300;
    };
    std::map<std::pair<int, int>, EdgeNodes> edges;
    for (int e : plan.marked) {
        const auto& loop = m.elements[static_cast<std::size_t>(e)];
        const std::size_t n = loop.size();
        for (std::size_t k = 0; k < n; ++k) {
            const int va = loop[k], vb = loop[(k + 1) % n];
            const auto key = std::minmax(va, vb);
            auto& en = edges[{key.first, key.second}];
            en.A = m.vertices[static_cast<std::size_t>(key.first)];
            en.B = m.vertices[static_cast<std::size_t>(key.second)];
            en.parents.push_back(e);
            en.min_parent_diam = std::min(en.min_parent_diam, m.props[static_cast<std::size_t>(e)].diameter);
        }
    }
    for (auto& [key, en] : edges) {
        const Vec2 AB = en.B - en.A;
        const double L2 = norm2(AB);
        if (L2 == 0) continue;
        const double t_eps = tol / std::sqrt(L2);
        for (int e : en.parents)
            for (const Polygon& child : children[e])
                for (const Vec2& p : child) {
                    const double t = dot(p - en.A, AB) / L2;
                    if (t < -t_eps || t > 1 + t_eps) continue;
                    if (dist2(p, en.A + AB * std::clamp(t, 0.0, 1.0)) > tol * tol) continue;
                    if (t <= t_eps || t >= 1 - t_eps) {
                        // lands on an original vertex: merge into it exactly
                        const Vec2 target = t <= t_eps ? en.A : en.B;
                        if (dist2(p, target) > 0) en.on_endpoint.push_back(p);
                        continue;
                    }
                    bool dup = false;
                    for (const Vec2& q : en.nodes)
                        if (dist2(p, q) <= tol * tol) dup = true;
                    if (!dup) en.nodes.push_back(p);
                }
    }

    // Snap to optimal positions; collect per-parent vertex moves.
    std::map<int, std::vector<std::pair<Vec2, Vec2>>> moves;
    for (auto& [key, en] : edges) {
        for (const Vec2& p : en.on_endpoint) {
            const Vec2 target = dist2(p, en.A) <= dist2(p, en.B) ? en.A : en.B;
            for (int e : en.parents) moves[e].emplace_back(p, target);
        }
        if (en.nodes.empty()) continue;
        const Vec2 AB = en.B - en.A;
        const double L = norm(AB);
        const int n_new = static_cast<int>(en.nodes.size());
        const double spacing = L / (n_new + 1);
        if (spacing < 1e-6 * en.min_parent_diam) continue;  // short-edge guard: keep smoothed positions
        for (const Vec2& p : en.nodes) {
            const double t = dot(p - en.A, AB) / (L * L);
            int kidx = static_cast<int>(std::lround(t * (n_new + 1)));
            kidx = std::clamp(kidx, 0, n_new + 1);
            const Vec2 target = en.A + AB * (static_cast<double>(kidx) / (n_new + 1));
            for (int e : en.parents) moves[e].emplace_back(p, target);
        }
    }
    for (auto& [e, mv] : moves) {
        auto& polys = children[e];
        const double parent_area = m.props[static_cast<std::size_t>(e)].area;
        for (Polygon& child : polys)
            for (Vec2& v : child)
                for (const auto& [from, to] : mv)
                    if (dist2(v, from) <= 4 * tol * tol) v = to;
        std::vector<Polygon> cleaned;
        double area_sum = 0;
        for (Polygon& child : polys) {
            Polygon q;
            for (const Vec2& v : child)
                if (q.empty() || dist2(q.back(), v) > tol * tol) q.push_back(v);
            while (q.size() > 1 && dist2(q.front(), q.back()) <= tol * tol) q.pop_back();
            if (q.size() < 3) continue;
            const double a = signed_area(q);
            if (a < 1e-12 * parent_area + area_noise) continue;
            area_sum += a;
            cleaned.push_back(std::move(q));
        }
        if (std::abs(area_sum - parent_area) > 1e-9 * parent_area + area_noise * static_cast<double>(polys.size()))
            throw RefinementFailed("element " + std::to_string(e) + ": area lost in node snapping");
        polys = std::move(cleaned);
    }

    std::vector<Polygon> all;
    all.reserve(m.elements.size() * 2);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        if (is_marked[e]) {
            for (Polygon& c : children[static_cast<int>(e)]) all.push_back(std::move(c));
        } else {
            all.push_back(m.element_polygon(static_cast<int>(e)));
        }
    }
    Mesh out = build_mesh(all, tol);

    // carry boundary tags over: a new boundary edge lies inside exactly one
    // old boundary segment
    for (auto& be : out.boundary) {
        const Vec2 mid = (out.vertices[static_cast<std::size_t>(be.a)] + out.vertices[static_cast<std::size_t>(be.b)]) * 0.5;
        for (const auto& ob : m.boundary) {
            const Vec2 A = m.vertices[static_cast<std::size_t>(ob.a)], B = m.vertices[static_cast<std::size_t>(ob.b)];
            const double L2 = dist2(A, B);
            if (L2 == 0) continue;
            const double t = dot(mid - A, B - A) / L2;
            if (t < -1e-12 || t > 1 + 1e-12) continue;
            if (dist2(mid, A + (B - A) * t) <= 4 * tol * tol) {
                be.tag = ob.tag;
                break;
            }
        }
    }
    return out;
}

inline Mesh reference_refine(const Mesh& m, SeedMode mode, std::uint64_t rng_seed) {
    RefinementPlan plan;
    plan.marked.resize(m.elements.size());
    for (std::size_t e = 0; e < m.elements.size(); ++e) plan.marked[e] = static_cast<int>(e);
    return refine_elements(m, plan, mode, rng_seed);
}

// ---------------------------------------------------------------------------
// Mesh file format (version 1, line oriented):
//   vemamesh 1
//   <nv> <ne> <nb>
//   nv lines: x y
//   ne lines: k v0 ... v{k-1}
//   nb lines: a b tag
// Coordinates use 17 significant digits so round-trips are bit exact.

inline void write_mesh(std::ostream& os, const Mesh& m) {
    char buf[80];
    os << "vemamesh 1\n";
    os << m.vertices.size() << ' ' << m.elements.size() << ' ' << m.boundary.size() << '\n';
    for (const Vec2& v : m.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    for (const auto& loop : m.elements) {
        os << loop.size();
        for (int v : loop) os << ' ' << v;
        os << '\n';
    }
    for (const auto& be : m.boundary) os << be.a << ' ' << be.b << ' ' << be.tag << '\n';
}

inline void write_mesh(const std::string& path, const Mesh& m) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_mesh(f, m);
}

inline Mesh read_mesh(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "vemamesh" || version != 1) throw IoError("bad mesh header");
    std::size_t nv = 0, ne = 0, nb = 0;
    if (!(is >> nv >> ne >> nb)) throw IoError("bad mesh counts");
    std::vector<Polygon> polys;
    std::vector<Vec2> verts(nv);
    for (std::size_t i = 0; i < nv; ++i)
        if (!(is >> verts[i].x >> verts[i].y)) throw IoError("bad vertex at line " + std::to_string(3 + i));
    std::vector<std::vector<int>> loops(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        std::size_t k = 0;
        if (!(is >> k) || k < 3) throw IoError("bad element at line " + std::to_string(3 + nv + e));
        loops[e].resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            if (!(is >> loops[e][j]) || loops[e][j] < 0 || loops[e][j] >= static_cast<int>(nv))
                throw IoError("bad vertex index at line " + std::to_string(3 + nv + e));
        }
    }
    std::vector<BoundaryEdge> bnd(nb);
    for (std::size_t i = 0; i < nb; ++i)
        if (!(is >> bnd[i].a >> bnd[i].b >> bnd[i].tag)) throw IoError("bad boundary edge at line " + std::to_string(3 + nv + ne + i));

    Mesh m;
    m.vertices = std::move(verts);
    m.elements = std::move(loops);
    m.vertex_elements.assign(m.vertices.size(), {});
    for (std::size_t e = 0; e < m.elements.size(); ++e)
        for (int v : m.elements[e]) m.vertex_elements[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
    m.boundary = std::move(bnd);
    m.vertex_on_boundary.assign(m.vertices.size(), 0);
    for (const auto& be : m.boundary) {
        m.vertex_on_boundary[static_cast<std::size_t>(be.a)] = 1;
        m.vertex_on_boundary[static_cast<std::size_t>(be.b)] = 1;
    }
    for (std::size_t e = 0; e < m.elements.size(); ++e) m.props.push_back(polygon_props(m.element_polygon(static_cast<int>(e))));
    Vec2 lo, hi;
    detail::bounding_box(m.vertices, lo, hi);
    m.merge_tol = 1e-9 * dist(lo, hi);
    return m;
}

inline Mesh read_mesh(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    return read_mesh(f);
}

}  // namespace vema
