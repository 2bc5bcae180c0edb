#pragma once

#include <array>
#include <cmath>

namespace tow {

// Points and vectors in at most two dimensions. One-dimensional problems
// keep the second component at zero.
using Vec = std::array<double, 2>;

inline Vec operator+(Vec a, Vec b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(Vec a, Vec b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, Vec a) { return {s * a[0], s * a[1]}; }

inline double dot(Vec a, Vec b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(Vec a) { return dot(a, a); }
inline double norm(Vec a) { return std::sqrt(norm2(a)); }
inline double dist(Vec a, Vec b) { return norm(a - b); }

inline Vec normalized(Vec a) {
    double n = norm(a);
    return {a[0] / n, a[1] / n};
}

} // namespace tow
