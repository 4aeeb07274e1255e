#pragma once

// Reference bases and per-cell element machinery.
//
// Scalar side: P1 barycentric basis plus the cubic cell bubble 27*l1*l2*l3
// (MINI enrichment). H(div) side: BDM1 / RT0 bases constructed per cell as
// the dual basis of global edge normal-moment functionals, so normal traces
// are single-valued across edges without per-cell sign bookkeeping.
//
// Edge conventions (global): an edge runs from its lower to its higher
// vertex id; the unit normal is the tangent rotated by -90 degrees,
// n = (t.y, -t.x). BDM1 takes moments against {1, s} with s in [-1,1]
// affine along the edge; RT0 takes the 0th moment only.

#include "geotherm/core.hpp"
#include "geotherm/mesh.hpp"
#include "geotherm/quadrature.hpp"

#include <array>

namespace geotherm {

struct Bary {
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

/// P1 values are the barycentric coordinates themselves.
inline std::array<double, 3> eval_p1(Bary p) { return {p.l1, p.l2, p.l3}; }

inline double eval_bubble(Bary p) { return 27.0 * p.l1 * p.l2 * p.l3; }

/// Per-cell geometry: physical P1 gradients and the area.
struct CellGeom {
    std::array<Vec2, 3> p{};
    std::array<Vec2, 3> grad{}; // physical gradients of the barycentric functions
    double area = 0.0;

    CellGeom() = default;
    CellGeom(Vec2 p0, Vec2 p1, Vec2 p2) {
        p = {p0, p1, p2};
        double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        if (det <= 0.0) throw Error("CellGeom: nonpositive triangle area");
        area = 0.5 * det;
        grad[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
        grad[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
        grad[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
    }

    Vec2 point(Bary b) const {
        return {b.l1 * p[0].x + b.l2 * p[1].x + b.l3 * p[2].x,
                b.l1 * p[0].y + b.l2 * p[1].y + b.l3 * p[2].y};
    }

    Vec2 grad_bubble(Bary b) const {
        return 27.0 * (b.l2 * b.l3 * grad[0] + b.l1 * b.l3 * grad[1] + b.l1 * b.l2 * grad[2]);
    }
};

enum class HdivFamily { BDM1, RT0 };

/// Basis of linear (BDM1, 6 dofs) or lowest Raviart-Thomas (RT0, 3 dofs)
/// vector fields on one physical cell, dual to the edge normal-moment
/// functionals of the cell's three edges taken with the global orientation.
class HdivBasis {
public:
    struct EdgeFrame {
        Vec2 a, b;     // endpoints in global order (low vertex id -> high)
        Vec2 normal;   // unit, tangent rotated by -90 degrees
        double length; // |b - a|
    };

    HdivBasis(HdivFamily family, const CellGeom& cell, const std::array<EdgeFrame, 3>& edges)
        : family_(family), cell_(cell) {
        n_ = family == HdivFamily::BDM1 ? 6 : 3;
        build(edges);
    }

    int size() const { return n_; }

    /// Value of basis function i at a physical point.
    Vec2 value(int i, Vec2 x) const {
        const auto& c = coef_[i];
        double dx = x.x - xc_.x, dy = x.y - xc_.y;
        return {c[0] + c[1] * dx + c[2] * dy, c[3] + c[4] * dx + c[5] * dy};
    }

    /// Divergence of basis function i (constant on the cell).
    double div(int i) const { return coef_[i][1] + coef_[i][5]; }

    /// Gradient of basis function i (constant on the cell), a(r,c) = d v_r / d x_c.
    Mat2 grad(int i) const {
        const auto& c = coef_[i];
        return {c[1], c[2], c[4], c[5]};
    }

private:
    void build(const std::array<EdgeFrame, 3>& edges) {
        // Monomial coefficients (1, x-xc, y-yc) per component; RT0 restricts
        // the linear part to the radial direction c*(x-xc, y-yc).
        xc_ = {(cell_.p[0].x + cell_.p[1].x + cell_.p[2].x) / 3.0,
               (cell_.p[0].y + cell_.p[1].y + cell_.p[2].y) / 3.0};

        // Moments of monomial fields over each edge with 2-point Gauss
        // (integrands are quadratic at most).
        Gauss1D g = gauss_legendre(2);
        double M[6][6] = {};
        auto mono = [&](int m, Vec2 x) -> Vec2 {
            double dx = x.x - xc_.x, dy = x.y - xc_.y;
            switch (m) {
            case 0: return {1.0, 0.0};
            case 1: return {dx, 0.0};
            case 2: return {dy, 0.0};
            case 3: return {0.0, 1.0};
            case 4: return {0.0, dx};
            default: return {0.0, dy};
            }
        };
        // RT0 monomials: {(1,0),(0,1),(dx,dy)}
        auto mono_rt = [&](int m, Vec2 x) -> Vec2 {
            double dx = x.x - xc_.x, dy = x.y - xc_.y;
            switch (m) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            default: return {dx, dy};
            }
        };

        for (int e = 0; e < 3; ++e) {
            const EdgeFrame& fr = edges[e];
            for (int q = 0; q < 2; ++q) {
                double s = g.nodes[q];              // in [-1,1] along a->b
                double w = g.weights[q] * fr.length / 2.0;
                Vec2 x = {0.5 * (1.0 - s) * fr.a.x + 0.5 * (1.0 + s) * fr.b.x,
                          0.5 * (1.0 - s) * fr.a.y + 0.5 * (1.0 + s) * fr.b.y};
                for (int m = 0; m < n_; ++m) {
                    Vec2 v = family_ == HdivFamily::BDM1 ? mono(m, x) : mono_rt(m, x);
                    double vn = v.dot(fr.normal);
                    if (family_ == HdivFamily::BDM1) {
                        M[2 * e][m] += w * vn;         // moment against 1
                        M[2 * e + 1][m] += w * vn * s; // moment against s
                    } else {
                        M[e][m] += w * vn;
                    }
                }
            }
        }

        // Invert the functional matrix: columns of the inverse give the dual
        // basis coefficients in the monomial frame.
        double A[6][12];
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) A[i][j] = M[i][j];
            for (int j = 0; j < n_; ++j) A[i][n_ + j] = (i == j) ? 1.0 : 0.0;
        }
        for (int col = 0; col < n_; ++col) {
            int piv = col;
            for (int r = col + 1; r < n_; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            if (std::abs(A[piv][col]) < 1e-14) throw Error("HdivBasis: degenerate cell");
            if (piv != col)
                for (int j = 0; j < 2 * n_; ++j) std::swap(A[piv][j], A[col][j]);
            double d = A[col][col];
            for (int j = 0; j < 2 * n_; ++j) A[col][j] /= d;
            for (int r = 0; r < n_; ++r) {
                if (r == col) continue;
                double f = A[r][col];
                if (f == 0.0) continue;
                for (int j = 0; j < 2 * n_; ++j) A[r][j] -= f * A[col][j];
            }
        }
        for (int i = 0; i < n_; ++i) {
            // basis i = sum_m inv(M)[m][i] * monomial_m
            std::array<double, 6> c{};
            if (family_ == HdivFamily::BDM1) {
                for (int m = 0; m < 6; ++m) c[m] = A[m][n_ + i];
            } else {
                c[0] = A[0][n_ + i];
                c[3] = A[1][n_ + i];
                c[1] = A[2][n_ + i]; // radial part contributes dx to vx
                c[5] = A[2][n_ + i]; // and dy to vy
            }
            coef_[i] = c;
        }
    }

    HdivFamily family_;
    CellGeom cell_;
    Vec2 xc_{};
    int n_ = 0;
    std::array<std::array<double, 6>, 6> coef_{};
};

} // namespace geotherm
