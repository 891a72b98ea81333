#pragma once

#include <array>
#include <cmath>

#include "error.hpp"

namespace polydef {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double f) const { return {x * f, y * f, z * f}; }
    Vec3 operator/(double f) const { return {x / f, y / f, z / f}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// 3x3 matrix stored row-major; when used as a lattice, rows are the vectors.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
    void set_row(int i, const Vec3& v) { m[i] = {v.x, v.y, v.z}; }

    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }

    Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
        return t;
    }
};

// v interpreted as a row vector: result = v * M (fractional -> Cartesian
// when M rows are lattice vectors).
inline Vec3 mul(const Vec3& v, const Mat3& M) {
    Vec3 r;
    for (int j = 0; j < 3; ++j)
        r[j] = v.x * M.m[0][j] + v.y * M.m[1][j] + v.z * M.m[2][j];
    return r;
}

inline Mat3 inverse(const Mat3& A) {
    const double d = A.det();
    double scale = 0.0;
    for (const auto& row : A.m)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (std::fabs(d) <= 1e-14 * scale * scale * scale || scale == 0.0)
        fail_domain("singular cell matrix (degenerate lattice vectors)");
    const auto& a = A.m;
    Mat3 inv;
    inv.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
    inv.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d;
    inv.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
    inv.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d;
    inv.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
    inv.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d;
    inv.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
    inv.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d;
    inv.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
    return inv;
}

// Wrap a fractional coordinate into [0, 1).
inline double wrap01(double f) {
    f -= std::floor(f);
    if (f >= 1.0) f = 0.0; // rounding can land exactly on 1
    return f;
}

// Wrap a fractional delta into [-1/2, 1/2).
inline double wrap_half(double f) {
    f -= std::round(f);
    if (f >= 0.5) f -= 1.0;
    if (f < -0.5) f += 1.0;
    return f;
}

// Minimum-image Cartesian distance for a fractional delta under the given
// lattice (rows of `cell`). The wrapped delta is refined over the 27
// neighbour images, which is exact for any cell whose Wigner-Seitz cell is
// contained in the first shell (true for the hexagonal cells used here).
inline double min_image_distance(const Mat3& cell, Vec3 dfrac) {
    dfrac = {wrap_half(dfrac.x), wrap_half(dfrac.y), wrap_half(dfrac.z)};
    double best = norm(mul(dfrac, cell));
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                Vec3 shifted{dfrac.x + i, dfrac.y + j, dfrac.z + k};
                best = std::min(best, norm(mul(shifted, cell)));
            }
    return best;
}

// Same, but also reports the winning Cartesian displacement.
inline Vec3 min_image_delta(const Mat3& cell, Vec3 dfrac) {
    dfrac = {wrap_half(dfrac.x), wrap_half(dfrac.y), wrap_half(dfrac.z)};
    Vec3 best_v = mul(dfrac, cell);
    double best = norm(best_v);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                Vec3 cand = mul(Vec3{dfrac.x + i, dfrac.y + j, dfrac.z + k}, cell);
                double n = norm(cand);
                if (n < best) {
                    best = n;
                    best_v = cand;
                }
            }
    return best_v;
}

} // namespace polydef
