#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace vema {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double dist2(const Vec2& a, const Vec2& b) { return norm2(a - b); }

// Error taxonomy. Everything user-facing derives from Error so callers can
// catch one type at the boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateGeometry : Error {
    using Error::Error;
};
struct DuplicateSeed : Error {
    using Error::Error;
};
struct SplitCell : Error {
    using Error::Error;
};
struct RefinementFailed : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct SolveFailed : Error {
    using Error::Error;
};
struct ZeroEnergy : Error {
    using Error::Error;
};
struct NothingToRefine : Error {
    using Error::Error;
};
struct NotComparable : Error {
    using Error::Error;
};
struct EvaluationError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// SplitMix64 finalizer; used to whiten seeds and derive substreams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seedable, portable RNG. mt19937_64 output is fully specified by the
// standard; double conversion is done by hand because std distributions are
// not portable across implementations. Substreams are derived from the seed,
// not the stream state, so they are independent of consumption order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(mix64(seed)) {}

    std::uint64_t bits() { return eng_(); }
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
    double range(double a, double b) { return a + (b - a) * uniform01(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(bits() % n); }

    Rng substream(std::uint64_t tag) const { return Rng(mix64(seed_ ^ mix64(tag + 0x632be59bd9b4e019ull))); }
    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace vema
