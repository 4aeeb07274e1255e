#pragma once

// Quadrature on the reference triangle (barycentric points, weights summing
// to the reference area 1/2) and Gauss-Legendre rules on [-1,1].
//
// Degrees 1-5 use the classic symmetric rules; degrees 6-10 are built as
// collapsed tensor-product Gauss rules, exact by construction.

#include "geotherm/core.hpp"

#include <array>
#include <vector>

namespace geotherm {

struct QuadPoint {
    double l1 = 0.0, l2 = 0.0, l3 = 0.0; // barycentric coordinates
    double w = 0.0;                      // reference-triangle measure
};

struct QuadratureRule {
    int degree = 0;
    std::vector<QuadPoint> points;
};

struct Gauss1D {
    std::vector<double> nodes;   // on [-1,1]
    std::vector<double> weights; // sum to 2
};

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline Gauss1D gauss_legendre(int n) {
    if (n < 1) throw Error("gauss_legendre: n must be >= 1");
    Gauss1D g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // refresh P'_n at the converged node
        {
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[i] = -x; // ascending order; cos argument gives the upper half
        g.weights[i] = w;
        g.nodes[n - 1 - i] = x;
        g.weights[n - 1 - i] = w;
    }
    return g;
}

namespace detail {

inline void push_orbit1(QuadratureRule& r, double w) { r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3, w}); }

/// Orbit of (a,b,b) under coordinate permutation: three points.
inline void push_orbit3(QuadratureRule& r, double a, double w) {
    double b = (1.0 - a) / 2.0;
    r.points.push_back({a, b, b, w});
    r.points.push_back({b, a, b, w});
    r.points.push_back({b, b, a, w});
}

inline QuadratureRule collapsed_rule(int degree) {
    // x = s, y = t (1-s) maps [0,1]^2 onto the reference triangle with
    // Jacobian (1-s); n-point Gauss per axis is exact when 2n-1 >= degree+1.
    int n = (degree + 3) / 2;
    Gauss1D g = gauss_legendre(n);
    QuadratureRule r;
    r.degree = degree;
    for (int i = 0; i < n; ++i) {
        double s = 0.5 * (g.nodes[i] + 1.0), ws = 0.5 * g.weights[i];
        for (int j = 0; j < n; ++j) {
            double t = 0.5 * (g.nodes[j] + 1.0), wt = 0.5 * g.weights[j];
            double x = s, y = t * (1.0 - s);
            r.points.push_back({1.0 - x - y, x, y, ws * wt * (1.0 - s)});
        }
    }
    return r;
}

} // namespace detail

inline QuadratureRule triangle_rule(int degree) {
    if (degree < 1 || degree > 10) throw Error("triangle_rule: degree must be in [1,10]");
    QuadratureRule r;
    r.degree = degree;
    switch (degree) {
    case 1:
        detail::push_orbit1(r, 0.5);
        break;
    case 2:
        detail::push_orbit3(r, 2.0 / 3.0, 1.0 / 6.0);
        break;
    case 3:
        detail::push_orbit1(r, -9.0 / 32.0);
        detail::push_orbit3(r, 3.0 / 5.0, 25.0 / 96.0);
        break;
    case 4:
        detail::push_orbit3(r, 0.108103018168070, 0.5 * 0.223381589678011);
        detail::push_orbit3(r, 0.816847572980459, 0.5 * 0.109951743655322);
        break;
    case 5:
        detail::push_orbit1(r, 0.5 * 0.225);
        detail::push_orbit3(r, 0.059715871789770, 0.5 * 0.132394152788506);
        detail::push_orbit3(r, 0.797426985353087, 0.5 * 0.125939180544827);
        break;
    default:
        r = detail::collapsed_rule(degree);
        break;
    }
    return r;
}

/// Exact integral of l1^a l2^b l3^c over a triangle of the given area.
inline double monomial_integral(int a, int b, int c, double area = 0.5) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    return 2.0 * area * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

} // namespace geotherm
