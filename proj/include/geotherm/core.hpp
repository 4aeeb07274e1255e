#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace geotherm {

inline constexpr const char* kVersion = "geotherm 0.1.0";

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

/// Velocity gradient / Jacobian entries, a(i,j) = d u_i / d x_j.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    double frobenius2() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
};

enum class Subdomain { Fluid, Porous };

inline const char* to_string(Subdomain d) { return d == Subdomain::Fluid ? "fluid" : "porous"; }

} // namespace geotherm
