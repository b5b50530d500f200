#pragma once

#include <array>
#include <cmath>

namespace anofam {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// z-component of the cross product; |cross| = |a||b| sin(angle).
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return std::sqrt(dot(v, v)); }

// Row-major 2x2 matrix.
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // [[a,b],[c,d]]

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }
    // Columns u, v.
    static Mat2 fromColumns(const Vec2& u, const Vec2& v) { return {u.x, v.x, u.y, v.y}; }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }

    double det() const { return a * d - b * c; }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    double maxAbs() const {
        return std::max(std::max(std::fabs(a), std::fabs(b)),
                        std::max(std::fabs(c), std::fabs(d)));
    }
};

// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> symmetricEigenvalues(const Mat2& m) {
    const double tr = m.a + m.d;
    const double disc = std::sqrt(std::max(0.0, (m.a - m.d) * (m.a - m.d) + 4.0 * m.b * m.c));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

// Singular values (ascending) with respect to the Euclidean norm.
inline std::array<double, 2> singularValues(const Mat2& m) {
    const auto ev = symmetricEigenvalues(m.transpose() * m);
    return {std::sqrt(std::max(0.0, ev[0])), std::sqrt(std::max(0.0, ev[1]))};
}

}  // namespace anofam
