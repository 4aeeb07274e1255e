#pragma once

// Assembly of the four linear systems of the decoupled march and the
// interface integrals that couple the two temperature spaces.
//
// Step 1  Navier-Stokes with lagged skew convection and explicit buoyancy:
//         (1/dt)(u,v) + Pr(grad u, grad v) + c(u_old; u, v) - (p, div v)
//         [+ zero-mean multiplier]  =  (1/dt)(u_old,v) + Pr Ra (xi th_f_old, v) + (f_f, v)
// Step 2  fluid heat with Nitsche penalty against th_p_old and the lagged
//         one-sided consistency flux n_f . grad th_f_old
// Step 3  Darcy with the conductivity sample k(x) multiplying the integrands;
//         matrix is constant per sample so callers keep the factorization
// Step 4  porous heat; penalty against th_f at the NEW level, consistency
//         flux with the opposite sign of Step 2
//
// Convection blocks are assembled in skew form, C = (N - N^T)/2 as quadrature
// sums, so w^T C w = 0 holds to round-off for any quadrature.

#include "geotherm/core.hpp"
#include "geotherm/linalg.hpp"
#include "geotherm/mesh.hpp"
#include "geotherm/space.hpp"

#include <functional>
#include <vector>

namespace geotherm {

struct PhysicalParams {
    double Pr = 1.0;
    double Ra = 1.0;
    double Ca = 1.0;
    double L = 1.0;
    double kf = 1.0;
    double kp = 1.0;
    double gamma = 1e5;

    void validate() const {
        if (!(Pr > 0 && Ra > 0 && Ca > 0 && L > 0 && kf > 0 && kp > 0))
            throw Error("PhysicalParams: Pr, Ra, Ca, L, kf, kp must be positive");
        if (gamma < 0) throw Error("PhysicalParams: gamma must be >= 0");
    }
};

struct FormContext {
    PhysicalParams params;
    std::function<double(Vec2)> conductivity; // k(x), one sample realization
    double dt = 1e-3;
    double h_penalty = 0.25; // the h of gamma/h; the global grid spacing

    void validate() const {
        params.validate();
        if (!(dt > 0)) throw Error("FormContext: dt must be positive");
        if (!(h_penalty > 0)) throw Error("FormContext: h_penalty must be positive");
        if (!conductivity) throw Error("FormContext: missing conductivity sample");
    }
};

/// Discrete spaces and cached per-cell data shared by all samples of a run.
/// Immutable after build; safe to share across concurrent sample solves.
struct Spaces {
    const Mesh* mesh = nullptr;
    DofMap vel_f, pres_f, temp_f; // fluid: MINI velocity, P1 pressure, P1 temperature
    DofMap vel_p, pres_p, temp_p; // porous: BDM1/RT0 velocity, P0 pressure, P1 temperature
    QuadratureRule quad;          // assembly rule
    QuadratureRule quad_err;      // error-norm rule
    std::vector<CellGeom> geo;    // by mesh triangle id
    std::vector<HdivBasis> hdiv;  // by porous local cell
    std::vector<InterfaceEdge> iface;
    std::vector<double> pres_f_int, pres_p_int; // zero-mean multiplier columns

    int ns_dim() const { return vel_f.n_dofs + pres_f.n_dofs + 1; }
    int darcy_dim() const { return vel_p.n_dofs + pres_p.n_dofs + 1; }
};

inline Spaces build_spaces(const Mesh& mesh, ElementFamily darcy_family = ElementFamily::BDM1,
                           int quad_degree = 6, int quad_err_degree = 8) {
    if (darcy_family != ElementFamily::BDM1 && darcy_family != ElementFamily::RT0)
        throw Error("build_spaces: darcy family must be BDM1 or RT0");
    Spaces s;
    s.mesh = &mesh;
    s.vel_f = build_dofmap(mesh, ElementFamily::MiniVector, Subdomain::Fluid);
    s.pres_f = build_dofmap(mesh, ElementFamily::P1, Subdomain::Fluid);
    s.temp_f = build_dofmap(mesh, ElementFamily::P1, Subdomain::Fluid);
    s.vel_p = build_dofmap(mesh, darcy_family, Subdomain::Porous);
    s.pres_p = build_dofmap(mesh, ElementFamily::P0, Subdomain::Porous);
    s.temp_p = build_dofmap(mesh, ElementFamily::P1, Subdomain::Porous);
    s.quad = triangle_rule(quad_degree);
    s.quad_err = triangle_rule(quad_err_degree);
    s.geo.reserve(mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
        s.geo.push_back(cell_geometry(mesh, t));
    s.hdiv.reserve(s.vel_p.cells.size());
    for (size_t c = 0; c < s.vel_p.cells.size(); ++c)
        s.hdiv.push_back(hdiv_basis(mesh, s.vel_p, static_cast<int>(c)));
    s.iface = interface_edges(mesh);
    s.pres_f_int = integral_weights(s.pres_f, mesh);
    s.pres_p_int = integral_weights(s.pres_p, mesh);
    return s;
}

/// Scalar shape values/gradients on a cell: P1 functions then the bubble.
struct ScalarShape {
    std::array<double, 4> N{};
    std::array<Vec2, 4> G{};
};

inline ScalarShape mini_shape(const CellGeom& g, Bary b) {
    ScalarShape s;
    s.N = {b.l1, b.l2, b.l3, eval_bubble(b)};
    s.G = {g.grad[0], g.grad[1], g.grad[2], g.grad_bubble(b)};
    return s;
}

namespace detail {

/// Outward unit normal of the fluid triangle on an interface edge.
inline Vec2 fluid_outward_normal(const Mesh& mesh, const InterfaceEdge& ie) {
    const Edge& e = mesh.edges[ie.edge];
    Vec2 a = mesh.vertices[e.a], b = mesh.vertices[e.b];
    Vec2 t = b - a;
    Vec2 n = {t.y / ie.length, -t.x / ie.length};
    const Triangle& tf = mesh.triangles[ie.fluid_tri];
    Vec2 cen = {(mesh.vertices[tf.v[0]].x + mesh.vertices[tf.v[1]].x + mesh.vertices[tf.v[2]].x) / 3.0,
                (mesh.vertices[tf.v[0]].y + mesh.vertices[tf.v[1]].y + mesh.vertices[tf.v[2]].y) / 3.0};
    Vec2 mid = {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
    if (n.dot(cen - mid) > 0) n = {-n.x, -n.y};
    return n;
}

} // namespace detail

/// Vector of integrals  int_I (n_f . grad th_f) phi_i dl  over the trace
/// basis of the target temperature space. The gradient is one-sided, taken
/// from the unique fluid triangle of each interface edge.
inline std::vector<double> interface_flux_vector(const Spaces& S, const std::vector<double>& th_f,
                                                 Subdomain target) {
    const Mesh& mesh = *S.mesh;
    const DofMap& dmf = S.temp_f;
    const DofMap& dmt = target == Subdomain::Fluid ? S.temp_f : S.temp_p;
    std::vector<double> out(dmt.n_dofs, 0.0);
    Gauss1D gl = gauss_legendre(2);
    for (const InterfaceEdge& ie : S.iface) {
        const Edge& e = mesh.edges[ie.edge];
        Vec2 nf = detail::fluid_outward_normal(mesh, ie);

        // constant P1 gradient on the fluid triangle
        const Triangle& tf = mesh.triangles[ie.fluid_tri];
        const CellGeom& g = S.geo[ie.fluid_tri];
        Vec2 grad = {0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            double c = th_f[dmf.vertex_dof[tf.v[k]]];
            grad = grad + c * g.grad[k];
        }
        double flux = nf.dot(grad);

        int da = dmt.vertex_dof[e.a], db = dmt.vertex_dof[e.b];
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double s = 0.5 * (gl.nodes[q] + 1.0);
            double w = gl.weights[q] * ie.length / 2.0;
            out[da] += w * flux * (1.0 - s);
            out[db] += w * flux * s;
        }
    }
    return out;
}

/// Step 1. Unknown layout [u_f | p_f | mean multiplier].
inline SparseSystem assemble_ns(const FormContext& ctx, const Spaces& S,
                                const std::vector<double>& u_old, const std::vector<double>& th_f_old,
                                double t_next, const std::function<Vec2(Vec2, double)>& f_f) {
    ctx.validate();
    const Mesh& mesh = *S.mesh;
    const PhysicalParams& P = ctx.params;
    const int nu = S.vel_f.n_dofs, np = S.pres_f.n_dofs;
    SparseSystem sys(nu + np + 1);

    int ud[8], pd[3], td[3];
    for (size_t c = 0; c < S.vel_f.cells.size(); ++c) {
        const int tri = S.vel_f.cells[c];
        const CellGeom& g = S.geo[tri];
        S.vel_f.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.pres_f.cell_global_dofs(static_cast<int>(c), mesh, pd);
        S.temp_f.cell_global_dofs(static_cast<int>(c), mesh, td);

        double Auu[8][8] = {}, Aup[8][3] = {}, Fu[8] = {};
        for (const QuadPoint& qp : S.quad.points) {
            ScalarShape sh = mini_shape(g, {qp.l1, qp.l2, qp.l3});
            double w = 2.0 * g.area * qp.w;
            Vec2 xq = g.point({qp.l1, qp.l2, qp.l3});

            Vec2 w_old{0.0, 0.0};
            for (int k = 0; k < 4; ++k) {
                w_old.x += u_old[ud[2 * k]] * sh.N[k];
                w_old.y += u_old[ud[2 * k + 1]] * sh.N[k];
            }
            double th_old = 0.0;
            for (int k = 0; k < 3; ++k) th_old += th_f_old[td[k]] * sh.N[k];
            Vec2 fq = f_f(xq, t_next);

            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    double mass = sh.N[i] * sh.N[j] / ctx.dt;
                    double stiff = P.Pr * sh.G[i].dot(sh.G[j]);
                    double conv = 0.5 * (w_old.dot(sh.G[j]) * sh.N[i] - w_old.dot(sh.G[i]) * sh.N[j]);
                    double s = w * (mass + stiff + conv);
                    Auu[2 * i][2 * j] += s;
                    Auu[2 * i + 1][2 * j + 1] += s;
                }
                for (int j = 0; j < 3; ++j) {
                    Aup[2 * i][j] -= w * sh.N[j] * sh.G[i].x;
                    Aup[2 * i + 1][j] -= w * sh.N[j] * sh.G[i].y;
                }
                Fu[2 * i] += w * sh.N[i] * (w_old.x / ctx.dt + fq.x);
                Fu[2 * i + 1] += w * sh.N[i] * (w_old.y / ctx.dt + P.Pr * P.Ra * th_old + fq.y);
            }
        }
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) sys.add(ud[i], ud[j], Auu[i][j]);
            for (int j = 0; j < 3; ++j) {
                sys.add(ud[i], nu + pd[j], Aup[i][j]);
                sys.add(nu + pd[j], ud[i], -Aup[i][j]); // +(q, div u) row
            }
            sys.add_rhs(ud[i], Fu[i]);
        }
    }
    for (int q = 0; q < np; ++q) {
        sys.add(nu + q, nu + np, S.pres_f_int[q]);
        sys.add(nu + np, nu + q, S.pres_f_int[q]);
    }
    return sys;
}

/// Step 2. Unknowns on the fluid temperature space.
inline SparseSystem assemble_theta_f(const FormContext& ctx, const Spaces& S,
                                     const std::vector<double>& u_f_old,
                                     const std::vector<double>& th_f_old,
                                     const std::vector<double>& th_p_old, double t_next,
                                     const std::function<double(Vec2, double)>& src) {
    ctx.validate();
    const Mesh& mesh = *S.mesh;
    const PhysicalParams& P = ctx.params;
    SparseSystem sys(S.temp_f.n_dofs);

    int ud[8], td[3];
    for (size_t c = 0; c < S.temp_f.cells.size(); ++c) {
        const int tri = S.temp_f.cells[c];
        const CellGeom& g = S.geo[tri];
        S.vel_f.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.temp_f.cell_global_dofs(static_cast<int>(c), mesh, td);

        double A[3][3] = {}, F[3] = {};
        for (const QuadPoint& qp : S.quad.points) {
            ScalarShape sh = mini_shape(g, {qp.l1, qp.l2, qp.l3});
            double w = 2.0 * g.area * qp.w;
            Vec2 xq = g.point({qp.l1, qp.l2, qp.l3});

            Vec2 w_old{0.0, 0.0};
            for (int k = 0; k < 4; ++k) {
                w_old.x += u_f_old[ud[2 * k]] * sh.N[k];
                w_old.y += u_f_old[ud[2 * k + 1]] * sh.N[k];
            }
            double th_old = 0.0;
            for (int k = 0; k < 3; ++k) th_old += th_f_old[td[k]] * sh.N[k];
            double sq = src(xq, t_next);

            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    double mass = sh.N[i] * sh.N[j] / ctx.dt;
                    double stiff = P.kf * sh.G[i].dot(sh.G[j]);
                    double conv = 0.5 * (w_old.dot(sh.G[j]) * sh.N[i] - w_old.dot(sh.G[i]) * sh.N[j]);
                    A[i][j] += w * (mass + stiff + conv);
                }
                F[i] += w * sh.N[i] * (th_old / ctx.dt + sq);
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) sys.add(td[i], td[j], A[i][j]);
            sys.add_rhs(td[i], F[i]);
        }
    }

    // Interface: penalty (kf gamma/h) (th, phi)_I on the left, lagged porous
    // trace and lagged consistency flux on the right.
    const double pen = P.kf * P.gamma / ctx.h_penalty;
    Gauss1D gl = gauss_legendre(2);
    for (const InterfaceEdge& ie : S.iface) {
        const Edge& e = mesh.edges[ie.edge];
        int fa = S.temp_f.vertex_dof[e.a], fb = S.temp_f.vertex_dof[e.b];
        int pa = S.temp_p.vertex_dof[e.a], pb = S.temp_p.vertex_dof[e.b];
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double s = 0.5 * (gl.nodes[q] + 1.0);
            double w = gl.weights[q] * ie.length / 2.0;
            double Nf[2] = {1.0 - s, s};
            double thp = th_p_old[pa] * Nf[0] + th_p_old[pb] * Nf[1];
            int dof[2] = {fa, fb};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) sys.add(dof[i], dof[j], pen * w * Nf[i] * Nf[j]);
                sys.add_rhs(dof[i], pen * w * Nf[i] * thp);
            }
        }
    }
    std::vector<double> flux = interface_flux_vector(S, th_f_old, Subdomain::Fluid);
    for (int i = 0; i < S.temp_f.n_dofs; ++i) sys.add_rhs(i, P.kf * flux[i]);
    return sys;
}

/// Step 3. Unknown layout [u_p | phi_p | mean multiplier]. The matrix depends
/// only on (sample, dt, params); callers reuse its factorization across steps.
inline SparseSystem assemble_darcy(const FormContext& ctx, const Spaces& S,
                                   const std::vector<double>& u_p_old,
                                   const std::vector<double>& th_p_old, double t_next,
                                   const std::function<Vec2(Vec2, double)>& load = {}) {
    ctx.validate();
    const Mesh& mesh = *S.mesh;
    const PhysicalParams& P = ctx.params;
    const int nu = S.vel_p.n_dofs, np = S.pres_p.n_dofs;
    const double L2 = P.L * P.L;
    SparseSystem sys(nu + np + 1);

    const int nb = S.vel_p.dofs_per_cell();
    int ud[6], td[3];
    for (size_t c = 0; c < S.vel_p.cells.size(); ++c) {
        const int tri = S.vel_p.cells[c];
        const CellGeom& g = S.geo[tri];
        const HdivBasis& hb = S.hdiv[c];
        S.vel_p.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.temp_p.cell_global_dofs(static_cast<int>(c), mesh, td);

        double Auu[6][6] = {}, Aup[6] = {}, Fu[6] = {};
        for (const QuadPoint& qp : S.quad.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            double w = 2.0 * g.area * qp.w;
            Vec2 xq = g.point(b);
            double k = ctx.conductivity(xq);
            if (!(k > 0.0)) throw Error("assemble_darcy: nonpositive conductivity in sample");

            Vec2 V[6];
            for (int i = 0; i < nb; ++i) V[i] = hb.value(i, xq);
            Vec2 up_old{0.0, 0.0};
            for (int i = 0; i < nb; ++i) up_old = up_old + u_p_old[ud[i]] * V[i];
            double thp = 0.0;
            for (int k3 = 0; k3 < 3; ++k3) thp += th_p_old[td[k3]] * eval_p1(b)[k3];
            Vec2 lq = load ? load(xq, t_next) : Vec2{0.0, 0.0};

            for (int i = 0; i < nb; ++i) {
                for (int j = 0; j < nb; ++j)
                    Auu[i][j] += w * (P.Ca / (L2 * ctx.dt) * k + P.Pr) * V[i].dot(V[j]);
                Aup[i] -= w * (k / L2) * hb.div(i); // -(1/L^2)(K phi, div v); P0 basis = 1
                Fu[i] += w * (P.Ca / (L2 * ctx.dt) * k * up_old.dot(V[i]) +
                              (P.Pr * P.Ra / L2) * k * thp * V[i].y + lq.dot(V[i]));
            }
        }
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) sys.add(ud[i], ud[j], Auu[i][j]);
            sys.add(ud[i], nu + static_cast<int>(c), Aup[i]);
            sys.add(nu + static_cast<int>(c), ud[i], -Aup[i]); // +(1/L^2)(K psi, div u) row
            sys.add_rhs(ud[i], Fu[i]);
        }
    }
    for (int q = 0; q < np; ++q) {
        sys.add(nu + q, nu + np, S.pres_p_int[q]);
        sys.add(nu + np, nu + q, S.pres_p_int[q]);
    }
    return sys;
}

/// Step 4. Unknowns on the porous temperature space; consumes the Step-2
/// output th_f_new in the penalty and the lagged flux with flipped sign.
inline SparseSystem assemble_theta_p(const FormContext& ctx, const Spaces& S,
                                     const std::vector<double>& u_p_old,
                                     const std::vector<double>& th_p_old,
                                     const std::vector<double>& th_f_new,
                                     const std::vector<double>& th_f_old, double t_next,
                                     const std::function<double(Vec2, double)>& src) {
    ctx.validate();
    const Mesh& mesh = *S.mesh;
    const PhysicalParams& P = ctx.params;
    SparseSystem sys(S.temp_p.n_dofs);

    const int nb = S.vel_p.dofs_per_cell();
    int ud[6], td[3];
    for (size_t c = 0; c < S.temp_p.cells.size(); ++c) {
        const int tri = S.temp_p.cells[c];
        const CellGeom& g = S.geo[tri];
        const HdivBasis& hb = S.hdiv[c];
        S.vel_p.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.temp_p.cell_global_dofs(static_cast<int>(c), mesh, td);

        double A[3][3] = {}, F[3] = {};
        for (const QuadPoint& qp : S.quad.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            ScalarShape sh = mini_shape(g, b);
            double w = 2.0 * g.area * qp.w;
            Vec2 xq = g.point(b);

            Vec2 w_old{0.0, 0.0};
            for (int i = 0; i < nb; ++i) w_old = w_old + u_p_old[ud[i]] * hb.value(i, xq);
            double th_old = 0.0;
            for (int k = 0; k < 3; ++k) th_old += th_p_old[td[k]] * sh.N[k];
            double sq = src(xq, t_next);

            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    double mass = sh.N[i] * sh.N[j] / ctx.dt;
                    double stiff = P.kp * sh.G[i].dot(sh.G[j]);
                    double conv = 0.5 * (w_old.dot(sh.G[j]) * sh.N[i] - w_old.dot(sh.G[i]) * sh.N[j]);
                    A[i][j] += w * (mass + stiff + conv);
                }
                F[i] += w * sh.N[i] * (th_old / ctx.dt + sq);
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) sys.add(td[i], td[j], A[i][j]);
            sys.add_rhs(td[i], F[i]);
        }
    }

    const double pen = P.kf * P.gamma / ctx.h_penalty; // kf scale on both sides of I
    Gauss1D gl = gauss_legendre(2);
    for (const InterfaceEdge& ie : S.iface) {
        const Edge& e = mesh.edges[ie.edge];
        int fa = S.temp_f.vertex_dof[e.a], fb = S.temp_f.vertex_dof[e.b];
        int pa = S.temp_p.vertex_dof[e.a], pb = S.temp_p.vertex_dof[e.b];
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double s = 0.5 * (gl.nodes[q] + 1.0);
            double w = gl.weights[q] * ie.length / 2.0;
            double N[2] = {1.0 - s, s};
            double thf_new = th_f_new[fa] * N[0] + th_f_new[fb] * N[1];
            int dof[2] = {pa, pb};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) sys.add(dof[i], dof[j], pen * w * N[i] * N[j]);
                sys.add_rhs(dof[i], pen * w * N[i] * thf_new);
            }
        }
    }
    std::vector<double> flux = interface_flux_vector(S, th_f_old, Subdomain::Porous);
    for (int i = 0; i < S.temp_p.n_dofs; ++i) sys.add_rhs(i, -P.kf * flux[i]);
    return sys;
}

// ---- FE function norms (quadrature, no mass matrices) ---------------------

inline double fe_l2_norm(const Spaces& S, const DofMap& dm, const std::vector<double>& x) {
    const Mesh& mesh = *S.mesh;
    double acc = 0.0;
    int gd[8];
    for (size_t c = 0; c < dm.cells.size(); ++c) {
        const CellGeom& g = S.geo[dm.cells[c]];
        dm.cell_global_dofs(static_cast<int>(c), mesh, gd);
        for (const QuadPoint& qp : S.quad.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            double w = 2.0 * g.area * qp.w;
            switch (dm.family) {
            case ElementFamily::P1: {
                auto N = eval_p1(b);
                double v = x[gd[0]] * N[0] + x[gd[1]] * N[1] + x[gd[2]] * N[2];
                acc += w * v * v;
                break;
            }
            case ElementFamily::P0: {
                acc += w * x[gd[0]] * x[gd[0]];
                break;
            }
            case ElementFamily::MiniVector: {
                ScalarShape sh = mini_shape(g, b);
                Vec2 v{0.0, 0.0};
                for (int k = 0; k < 4; ++k) {
                    v.x += x[gd[2 * k]] * sh.N[k];
                    v.y += x[gd[2 * k + 1]] * sh.N[k];
                }
                acc += w * v.dot(v);
                break;
            }
            default: { // H(div)
                const HdivBasis& hb = S.hdiv[c];
                Vec2 v{0.0, 0.0};
                for (int i = 0; i < dm.dofs_per_cell(); ++i) v = v + x[gd[i]] * hb.value(i, g.point(b));
                acc += w * v.dot(v);
                break;
            }
            }
        }
    }
    return std::sqrt(acc);
}

/// Broken gradient seminorm (cellwise gradients; H(div) fields are only
/// normally continuous, so their gradient seminorm is the broken one).
inline double fe_h1_seminorm(const Spaces& S, const DofMap& dm, const std::vector<double>& x) {
    const Mesh& mesh = *S.mesh;
    double acc = 0.0;
    int gd[8];
    for (size_t c = 0; c < dm.cells.size(); ++c) {
        const CellGeom& g = S.geo[dm.cells[c]];
        dm.cell_global_dofs(static_cast<int>(c), mesh, gd);
        for (const QuadPoint& qp : S.quad.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            double w = 2.0 * g.area * qp.w;
            switch (dm.family) {
            case ElementFamily::P1: {
                Vec2 gr{0.0, 0.0};
                for (int k = 0; k < 3; ++k) gr = gr + x[gd[k]] * g.grad[k];
                acc += w * gr.dot(gr);
                break;
            }
            case ElementFamily::MiniVector: {
                ScalarShape sh = mini_shape(g, b);
                Vec2 gx{0.0, 0.0}, gy{0.0, 0.0};
                for (int k = 0; k < 4; ++k) {
                    gx = gx + x[gd[2 * k]] * sh.G[k];
                    gy = gy + x[gd[2 * k + 1]] * sh.G[k];
                }
                acc += w * (gx.dot(gx) + gy.dot(gy));
                break;
            }
            case ElementFamily::BDM1:
            case ElementFamily::RT0: {
                const HdivBasis& hb = S.hdiv[c];
                Mat2 gm{};
                for (int i = 0; i < dm.dofs_per_cell(); ++i) {
                    Mat2 gi = hb.grad(i);
                    gm.a11 += x[gd[i]] * gi.a11;
                    gm.a12 += x[gd[i]] * gi.a12;
                    gm.a21 += x[gd[i]] * gi.a21;
                    gm.a22 += x[gd[i]] * gi.a22;
                }
                acc += w * gm.frobenius2();
                break;
            }
            default: throw Error("fe_h1_seminorm: unsupported family");
            }
        }
    }
    return std::sqrt(acc);
}

/// Maximum cellwise |div u| of an H(div) function (mass-balance check).
inline double max_cell_divergence(const Spaces& S, const DofMap& dm, const std::vector<double>& x) {
    double worst = 0.0;
    int gd[8];
    for (size_t c = 0; c < dm.cells.size(); ++c) {
        dm.cell_global_dofs(static_cast<int>(c), *S.mesh, gd);
        const HdivBasis& hb = S.hdiv[c];
        double dv = 0.0;
        for (int i = 0; i < dm.dofs_per_cell(); ++i) dv += x[gd[i]] * hb.div(i);
        worst = std::max(worst, std::abs(dv));
    }
    return worst;
}

} // namespace geotherm
