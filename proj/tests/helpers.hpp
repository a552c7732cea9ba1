#pragma once

#include <algorithm>
#include <vector>

#include "vema/geometry.hpp"

namespace test_util {

using vema::Polygon;
using vema::Vec2;

// Equality up to cyclic rotation of the vertex loop.
inline bool same_polygon(const Polygon& a, const Polygon& b, double tol) {
    if (a.size() != b.size()) return false;
    const std::size_t n = a.size();
    for (std::size_t shift = 0; shift < n; ++shift) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            if (vema::dist(a[i], b[(i + shift) % n]) > tol) ok = false;
        if (ok) return true;
    }
    return false;
}

inline double area_cv(const std::vector<vema::VoronoiCell>& cells) {
    double mean = 0;
    for (const auto& c : cells) mean += vema::signed_area(c.poly);
    mean /= static_cast<double>(cells.size());
    double var = 0;
    for (const auto& c : cells) {
        const double a = vema::signed_area(c.poly) - mean;
        var += a * a;
    }
    return std::sqrt(var / static_cast<double>(cells.size())) / mean;
}

// Star-shaped polygon with one vertex per angular sector (always simple);
// constant radius when convex is requested.
inline Polygon random_polygon(vema::Rng& rng, int n, bool convex) {
    Polygon p;
    const double r0 = rng.range(0.5, 2.0);
    const double phase = rng.range(0, 2 * M_PI);
    for (int i = 0; i < n; ++i) {
        const double a = phase + (i + 0.2 + 0.6 * rng.uniform01()) * 2 * M_PI / n;
        const double r = convex ? r0 : r0 * rng.range(0.55, 1.45);
        p.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return p;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}  // namespace test_util
