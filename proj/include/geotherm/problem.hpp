#pragma once

// Problem data consumed by the time stepper (forcing, boundary traces,
// initial fields) and the manufactured problems used for verification.
//
// The manufactured velocity/pressure pair comes from stream functions, so
// both exact velocities are divergence-free; the temperatures vanish on the
// interface from both sides, so temperature continuity and the printed flux
// balance hold exactly. Forcing terms are the strong operators applied to
// the exact fields, hard-coded from hand-derived closed forms and guarded by
// a finite-difference residual test.
//
// The Darcy momentum equation has no external force in the scheme; for
// verification runs the manufactured residual of the exact fields enters
// Step 3 as an explicit load (ProblemData::darcy_load). Physical runs leave
// it empty.

#include "geotherm/assembly.hpp"
#include "geotherm/core.hpp"

#include <functional>

namespace geotherm {

struct ProblemData {
    // volumetric data
    std::function<Vec2(Vec2, double)> body_force;                // f_f
    std::function<double(Vec2, double)> heat_src_f, heat_src_p;  // Upsilon_f, Upsilon_p
    std::function<Vec2(Vec2, double)> darcy_load;                // verification only

    // Dirichlet traces; velocity covers all of the fluid boundary including
    // the interface, temperatures cover the exterior boundaries only.
    std::function<Vec2(Vec2, double)> vel_trace;
    std::function<double(Vec2, double)> temp_f_trace, temp_p_trace;

    // initial fields
    std::function<Vec2(Vec2)> u_f0, u_p0;
    std::function<double(Vec2)> p_f0, phi_p0, th_f0, th_p0;
};

/// All-zero data: zero forcing, homogeneous boundary and initial conditions.
inline ProblemData zero_problem() {
    ProblemData p;
    auto zv = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    auto zs = [](Vec2, double) { return 0.0; };
    p.body_force = zv;
    p.heat_src_f = p.heat_src_p = zs;
    p.vel_trace = zv;
    p.temp_f_trace = p.temp_p_trace = zs;
    p.u_f0 = p.u_p0 = [](Vec2) { return Vec2{0.0, 0.0}; };
    p.p_f0 = p.phi_p0 = p.th_f0 = p.th_p0 = [](Vec2) { return 0.0; };
    return p;
}

struct ManufacturedProblem {
    PhysicalParams params;
    double k = 1.0;        // conductivity realization entering the Darcy operator
    double amplitude = 1.0; // velocity scale of the fluid stream function
    double a = 1.0;        // temperature scale

    // exact fields
    std::function<Vec2(Vec2, double)> u_f, u_p;
    std::function<Mat2(Vec2, double)> grad_u_f, grad_u_p;
    std::function<double(Vec2, double)> p_f, phi_p, th_f, th_p;
    std::function<Vec2(Vec2, double)> grad_th_f, grad_th_p;

    // manufactured forcing
    std::function<Vec2(Vec2, double)> f_f, f_p;
    std::function<double(Vec2, double)> ups_f, ups_p;

    ProblemData problem_data() const {
        ProblemData pd;
        pd.body_force = f_f;
        pd.heat_src_f = ups_f;
        pd.heat_src_p = ups_p;
        pd.darcy_load = f_p;
        pd.vel_trace = u_f;
        pd.temp_f_trace = th_f;
        pd.temp_p_trace = th_p;
        auto uf = u_f, up = u_p;
        auto pf = p_f, pp = phi_p, tf = th_f, tp = th_p;
        pd.u_f0 = [uf](Vec2 x) { return uf(x, 0.0); };
        pd.u_p0 = [up](Vec2 x) { return up(x, 0.0); };
        pd.p_f0 = [pf](Vec2 x) { return pf(x, 0.0); };
        pd.phi_p0 = [pp](Vec2 x) { return pp(x, 0.0); };
        pd.th_f0 = [tf](Vec2 x) { return tf(x, 0.0); };
        pd.th_p0 = [tp](Vec2 x) { return tp(x, 0.0); };
        return pd;
    }
};

namespace detail {
// 1D factors of the fluid stream function and their derivatives.
inline double polyX(double x) { return x * x * (x - 1.0) * (x - 1.0); }
inline double polyX1(double x) { return 2.0 * x * (x - 1.0) * (2.0 * x - 1.0); }
inline double polyX2(double x) { return 12.0 * x * x - 12.0 * x + 2.0; }
inline double polyX3(double x) { return 24.0 * x - 12.0; }
} // namespace detail

/// Shared construction: fluid velocity u = amp/2 * curl(X(x) G(y)) cos t,
/// Darcy velocity from the sin^2 stream function, quadratic temperatures.
inline ManufacturedProblem make_manufactured(double amplitude, double k_darcy, double a,
                                             const PhysicalParams& params) {
    using detail::polyX;
    using detail::polyX1;
    using detail::polyX2;
    using detail::polyX3;
    ManufacturedProblem mp;
    mp.params = params;
    mp.k = k_darcy;
    mp.amplitude = amplitude;
    mp.a = a;
    const double A = amplitude / 2.0;
    const double Pr = params.Pr, Ra = params.Ra, Ca = params.Ca, L2 = params.L * params.L;
    const double kf = params.kf, kp = params.kp, k = k_darcy;

    mp.u_f = [A](Vec2 p, double t) {
        double c = std::cos(t);
        return Vec2{A * polyX(p.x) * polyX1(p.y) * c, -A * polyX1(p.x) * polyX(p.y) * c};
    };
    mp.grad_u_f = [A](Vec2 p, double t) {
        double c = std::cos(t);
        Mat2 g;
        g.a11 = A * polyX1(p.x) * polyX1(p.y) * c;
        g.a12 = A * polyX(p.x) * polyX2(p.y) * c;
        g.a21 = -A * polyX2(p.x) * polyX(p.y) * c;
        g.a22 = -A * polyX1(p.x) * polyX1(p.y) * c;
        return g;
    };
    mp.p_f = [](Vec2 p, double t) { return 10.0 * (2.0 * p.x - 1.0) * (2.0 * p.y - 1.0) * std::cos(t); };
    mp.th_f = [a](Vec2 p, double t) { return a * p.x * (1.0 - p.x) * (1.0 - p.y) * std::exp(-t); };
    mp.grad_th_f = [a](Vec2 p, double t) {
        double E = std::exp(-t);
        return Vec2{a * (1.0 - 2.0 * p.x) * (1.0 - p.y) * E, -a * p.x * (1.0 - p.x) * E};
    };

    mp.u_p = [](Vec2 p, double t) {
        double c = std::cos(t);
        double sx = std::sin(M_PI * p.x), sy = std::sin(M_PI * p.y);
        return Vec2{M_PI * sx * sx * std::sin(2.0 * M_PI * p.y) * c,
                    -M_PI * std::sin(2.0 * M_PI * p.x) * sy * sy * c};
    };
    mp.grad_u_p = [](Vec2 p, double t) {
        double c = std::cos(t);
        double sx = std::sin(M_PI * p.x), sy = std::sin(M_PI * p.y);
        double dx = M_PI * std::sin(2.0 * M_PI * p.x), dy = M_PI * std::sin(2.0 * M_PI * p.y);
        Mat2 g;
        g.a11 = dx * dy * c;
        g.a12 = sx * sx * 2.0 * M_PI * M_PI * std::cos(2.0 * M_PI * p.y) * c;
        g.a21 = -2.0 * M_PI * M_PI * std::cos(2.0 * M_PI * p.x) * sy * sy * c;
        g.a22 = -dx * dy * c;
        return g;
    };
    mp.phi_p = [](Vec2 p, double t) { return std::cos(M_PI * p.x) * std::cos(M_PI * p.y) * std::cos(t); };
    mp.th_p = [a](Vec2 p, double t) {
        return a * p.x * (1.0 - p.x) * p.y * (1.0 - p.y) * std::exp(-t);
    };
    mp.grad_th_p = [a](Vec2 p, double t) {
        double E = std::exp(-t);
        return Vec2{a * (1.0 - 2.0 * p.x) * p.y * (1.0 - p.y) * E,
                    a * p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y) * E};
    };

    mp.f_f = [A, Pr, Ra, a](Vec2 p, double t) {
        double c = std::cos(t), s = std::sin(t);
        double X = polyX(p.x), X1 = polyX1(p.x), X2 = polyX2(p.x), X3 = polyX3(p.x);
        double G = polyX(p.y), G1 = polyX1(p.y), G2 = polyX2(p.y), G3 = polyX3(p.y);
        double u1 = A * X * G1 * c, u2 = -A * X1 * G * c;
        double u1x = A * X1 * G1 * c, u1y = A * X * G2 * c;
        double u2x = -A * X2 * G * c, u2y = -A * X1 * G1 * c;
        double lap1 = A * (X2 * G1 + X * G3) * c;
        double lap2 = -A * (X3 * G + X1 * G2) * c;
        double px = 20.0 * (2.0 * p.y - 1.0) * c, py = 20.0 * (2.0 * p.x - 1.0) * c;
        double thf = a * p.x * (1.0 - p.x) * (1.0 - p.y) * std::exp(-t);
        return Vec2{-A * X * G1 * s - Pr * lap1 + u1 * u1x + u2 * u1y + px,
                    A * X1 * G * s - Pr * lap2 + u1 * u2x + u2 * u2y + py - Pr * Ra * thf};
    };

    mp.ups_f = [A, kf, a](Vec2 p, double t) {
        double c = std::cos(t), E = std::exp(-t);
        double u1 = A * polyX(p.x) * polyX1(p.y) * c, u2 = -A * polyX1(p.x) * polyX(p.y) * c;
        double thf = a * p.x * (1.0 - p.x) * (1.0 - p.y) * E;
        double tx = a * (1.0 - 2.0 * p.x) * (1.0 - p.y) * E, ty = -a * p.x * (1.0 - p.x) * E;
        return -thf + 2.0 * kf * a * (1.0 - p.y) * E + u1 * tx + u2 * ty;
    };

    mp.f_p = [Pr, Ra, Ca, L2, k, a](Vec2 p, double t) {
        double c = std::cos(t), s = std::sin(t), E = std::exp(-t);
        double sx = std::sin(M_PI * p.x), sy = std::sin(M_PI * p.y);
        double up1 = M_PI * sx * sx * std::sin(2.0 * M_PI * p.y) * c;
        double up2 = -M_PI * std::sin(2.0 * M_PI * p.x) * sy * sy * c;
        double up1t = -M_PI * sx * sx * std::sin(2.0 * M_PI * p.y) * s;
        double up2t = M_PI * std::sin(2.0 * M_PI * p.x) * sy * sy * s;
        double phix = -M_PI * sx * std::cos(M_PI * p.y) * c;
        double phiy = -M_PI * std::cos(M_PI * p.x) * sy * c;
        double thp = a * p.x * (1.0 - p.x) * p.y * (1.0 - p.y) * E;
        return Vec2{Ca * k / L2 * up1t + Pr * up1 + k / L2 * phix,
                    Ca * k / L2 * up2t + Pr * up2 + k / L2 * phiy - Pr * Ra * k / L2 * thp};
    };

    mp.ups_p = [kp, a](Vec2 p, double t) {
        double c = std::cos(t), E = std::exp(-t);
        double sx = std::sin(M_PI * p.x), sy = std::sin(M_PI * p.y);
        double up1 = M_PI * sx * sx * std::sin(2.0 * M_PI * p.y) * c;
        double up2 = -M_PI * std::sin(2.0 * M_PI * p.x) * sy * sy * c;
        double thp = a * p.x * (1.0 - p.x) * p.y * (1.0 - p.y) * E;
        double tx = a * (1.0 - 2.0 * p.x) * p.y * (1.0 - p.y) * E;
        double ty = a * p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y) * E;
        double lap = -2.0 * a * (p.y * (1.0 - p.y) + p.x * (1.0 - p.x)) * E;
        return -thp - kp * lap + up1 * tx + up2 * ty;
    };

    return mp;
}

/// Constant-conductivity study: the printed fluid velocity carries the
/// conductivity as an amplitude factor, u_f ~ 10 k.
inline ManufacturedProblem build_problem_const_k(double k_value, double a, const PhysicalParams& params) {
    if (!(k_value > 0.0)) throw Error("build_problem_const_k: k must be positive");
    return make_manufactured(10.0 * k_value, k_value, a, params);
}

/// Random-conductivity study: k = 3 + sigma (l1 + l2), fluid velocity scaled
/// by 1/k so the sigma -> 0 limit degenerates to the constant k = 3 problem.
inline ManufacturedProblem build_problem_affine_k(double lambda1, double lambda2, double sigma,
                                                  double a, const PhysicalParams& params) {
    if (std::abs(lambda1) > 1.0 || std::abs(lambda2) > 1.0)
        throw Error("build_problem_affine_k: lambda draws must lie in [-1,1]");
    double k = 3.0 + sigma * (lambda1 + lambda2);
    return make_manufactured(10.0 / k, k, a, params);
}

} // namespace geotherm
