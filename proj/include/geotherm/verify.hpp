#pragma once

// Error measurement against manufactured solutions and the two order
// estimators of the tables: the spatial rate rho between mesh levels and the
// temporal ratio beta between successive time-step halvings.
//
// Errors integrate with a degree-8 rule so quadrature error stays far below
// discretization error at every level of the studies.

#include "geotherm/problem.hpp"
#include "geotherm/stepper.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace geotherm {

struct ErrorRecord {
    double uf_l2 = 0, uf_h1 = 0;
    double thf_l2 = 0, thf_h1 = 0;
    double up_l2 = 0, up_hdiv = 0;
    double thp_l2 = 0, thp_h1 = 0;
    double pf_l2 = 0, phip_l2 = 0;

    // squared-error view used by the Monte Carlo RMS aggregation
    std::array<double, 10> squares() const {
        return {uf_l2 * uf_l2,  uf_h1 * uf_h1,   thf_l2 * thf_l2, thf_h1 * thf_h1, up_l2 * up_l2,
                up_hdiv * up_hdiv, thp_l2 * thp_l2, thp_h1 * thp_h1, pf_l2 * pf_l2,   phip_l2 * phip_l2};
    }
    static ErrorRecord from_squares(const std::array<double, 10>& s) {
        ErrorRecord r;
        r.uf_l2 = std::sqrt(s[0]);
        r.uf_h1 = std::sqrt(s[1]);
        r.thf_l2 = std::sqrt(s[2]);
        r.thf_h1 = std::sqrt(s[3]);
        r.up_l2 = std::sqrt(s[4]);
        r.up_hdiv = std::sqrt(s[5]);
        r.thp_l2 = std::sqrt(s[6]);
        r.thp_h1 = std::sqrt(s[7]);
        r.pf_l2 = std::sqrt(s[8]);
        r.phip_l2 = std::sqrt(s[9]);
        return r;
    }
};

/// Errors of one state against the exact fields at time t. All second-column
/// norms are full norms, L2 plus the broken gradient seminorm; for the
/// div-conforming Darcy velocity the divergence error vanishes identically
/// (see max_cell_divergence), so the gradient seminorm is the informative
/// part and matches the reference tables.
inline ErrorRecord error_norms(const Spaces& S, const CoupledState& st, const ManufacturedProblem& mp,
                               double t) {
    const Mesh& mesh = *S.mesh;
    double uf2 = 0, ufg2 = 0, thf2 = 0, thfg2 = 0, pf2 = 0;
    double up2 = 0, updiv2 = 0, thp2 = 0, thpg2 = 0, phip2 = 0;

    int ud[8], pd[3], td[3];
    for (size_t c = 0; c < S.vel_f.cells.size(); ++c) {
        const CellGeom& g = S.geo[S.vel_f.cells[c]];
        S.vel_f.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.pres_f.cell_global_dofs(static_cast<int>(c), mesh, pd);
        S.temp_f.cell_global_dofs(static_cast<int>(c), mesh, td);
        for (const QuadPoint& qp : S.quad_err.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            ScalarShape sh = mini_shape(g, b);
            double w = 2.0 * g.area * qp.w;
            Vec2 x = g.point(b);

            Vec2 uh{0, 0}, gx{0, 0}, gy{0, 0};
            for (int k = 0; k < 4; ++k) {
                uh.x += st.u_f[ud[2 * k]] * sh.N[k];
                uh.y += st.u_f[ud[2 * k + 1]] * sh.N[k];
                gx = gx + st.u_f[ud[2 * k]] * sh.G[k];
                gy = gy + st.u_f[ud[2 * k + 1]] * sh.G[k];
            }
            double ph = 0, th = 0;
            Vec2 gth{0, 0};
            for (int k = 0; k < 3; ++k) {
                ph += st.p_f[pd[k]] * sh.N[k];
                th += st.th_f[td[k]] * sh.N[k];
                gth = gth + st.th_f[td[k]] * sh.G[k];
            }

            Vec2 ue = mp.u_f(x, t);
            Mat2 ge = mp.grad_u_f(x, t);
            double the = mp.th_f(x, t);
            Vec2 gthe = mp.grad_th_f(x, t);
            double pe = mp.p_f(x, t);

            uf2 += w * ((uh.x - ue.x) * (uh.x - ue.x) + (uh.y - ue.y) * (uh.y - ue.y));
            ufg2 += w * ((gx.x - ge.a11) * (gx.x - ge.a11) + (gx.y - ge.a12) * (gx.y - ge.a12) +
                         (gy.x - ge.a21) * (gy.x - ge.a21) + (gy.y - ge.a22) * (gy.y - ge.a22));
            thf2 += w * (th - the) * (th - the);
            thfg2 += w * ((gth.x - gthe.x) * (gth.x - gthe.x) + (gth.y - gthe.y) * (gth.y - gthe.y));
            pf2 += w * (ph - pe) * (ph - pe);
        }
    }

    for (size_t c = 0; c < S.vel_p.cells.size(); ++c) {
        const CellGeom& g = S.geo[S.vel_p.cells[c]];
        const HdivBasis& hb = S.hdiv[c];
        const int nb = S.vel_p.dofs_per_cell();
        S.vel_p.cell_global_dofs(static_cast<int>(c), mesh, ud);
        S.pres_p.cell_global_dofs(static_cast<int>(c), mesh, pd);
        S.temp_p.cell_global_dofs(static_cast<int>(c), mesh, td);
        Mat2 gh{};
        for (int i = 0; i < nb; ++i) {
            Mat2 gi = hb.grad(i);
            gh.a11 += st.u_p[ud[i]] * gi.a11;
            gh.a12 += st.u_p[ud[i]] * gi.a12;
            gh.a21 += st.u_p[ud[i]] * gi.a21;
            gh.a22 += st.u_p[ud[i]] * gi.a22;
        }
        for (const QuadPoint& qp : S.quad_err.points) {
            Bary b{qp.l1, qp.l2, qp.l3};
            ScalarShape sh = mini_shape(g, b);
            double w = 2.0 * g.area * qp.w;
            Vec2 x = g.point(b);

            Vec2 uh{0, 0};
            for (int i = 0; i < nb; ++i) uh = uh + st.u_p[ud[i]] * hb.value(i, x);
            double th = 0;
            Vec2 gth{0, 0};
            for (int k = 0; k < 3; ++k) {
                th += st.th_p[td[k]] * sh.N[k];
                gth = gth + st.th_p[td[k]] * sh.G[k];
            }
            double ph = st.phi_p[pd[0]];

            Vec2 ue = mp.u_p(x, t);
            Mat2 ge = mp.grad_u_p(x, t);
            double the = mp.th_p(x, t);
            Vec2 gthe = mp.grad_th_p(x, t);
            double pe = mp.phi_p(x, t);

            up2 += w * ((uh.x - ue.x) * (uh.x - ue.x) + (uh.y - ue.y) * (uh.y - ue.y));
            updiv2 += w * ((gh.a11 - ge.a11) * (gh.a11 - ge.a11) + (gh.a12 - ge.a12) * (gh.a12 - ge.a12) +
                           (gh.a21 - ge.a21) * (gh.a21 - ge.a21) + (gh.a22 - ge.a22) * (gh.a22 - ge.a22));
            thp2 += w * (th - the) * (th - the);
            thpg2 += w * ((gth.x - gthe.x) * (gth.x - gthe.x) + (gth.y - gthe.y) * (gth.y - gthe.y));
            phip2 += w * (ph - pe) * (ph - pe);
        }
    }

    ErrorRecord r;
    r.uf_l2 = std::sqrt(uf2);
    r.uf_h1 = std::sqrt(uf2 + ufg2);
    r.thf_l2 = std::sqrt(thf2);
    r.thf_h1 = std::sqrt(thf2 + thfg2);
    r.up_l2 = std::sqrt(up2);
    r.up_hdiv = std::sqrt(up2 + updiv2);
    r.thp_l2 = std::sqrt(thp2);
    r.thp_h1 = std::sqrt(thp2 + thpg2);
    r.pf_l2 = std::sqrt(pf2);
    r.phip_l2 = std::sqrt(phip2);
    return r;
}

// ---- convergence tables ----------------------------------------------------

struct ReportRow {
    double h_or_dt = 0.0;
    ErrorRecord errors;
};

struct ConvergenceReport {
    std::vector<ReportRow> rows; // h (or dt) strictly decreasing
};

/// rho = log(e1/e2) / log(h1/h2) between consecutive rows; NaN for the first.
inline std::vector<double> spatial_rates(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() != err.size() || h.size() < 2) throw Error("spatial_rates: need >= 2 rows");
    std::vector<double> rates(h.size(), std::nan(""));
    for (size_t i = 1; i < h.size(); ++i) {
        if (!(h[i] < h[i - 1])) throw Error("spatial_rates: h must be strictly decreasing");
        if (err[i] == 0.0) throw Error("spatial_rates: zero error in denominator");
        rates[i] = std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]);
    }
    return rates;
}

struct TemporalOrder {
    double beta = 0.0;  // ||v_dt - v_dt/2|| / ||v_dt/2 - v_dt/4||
    double order = 0.0; // log2(beta)
};

inline TemporalOrder temporal_order(double diff_coarse, double diff_fine) {
    if (diff_fine == 0.0) throw Error("temporal_order: zero denominator (identical states)");
    TemporalOrder t;
    t.beta = diff_coarse / diff_fine;
    t.order = std::log2(t.beta);
    return t;
}

// ---- CSV -------------------------------------------------------------------

namespace detail {
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace detail

/// Rate column flavor: spatial tables carry rho = log(e1/e2)/log(h1/h2),
/// temporal tables carry the raw ratio beta = e1/e2 of successive rows.
enum class RateKind { SpatialRho, TemporalBeta };

/// Table-layout CSV: h (or dt), then error/rate pairs for the four reported
/// fields. The first row carries "-" in the rate columns.
inline void write_report_csv(std::ostream& os, const ConvergenceReport& rep, bool h1_flavor,
                             RateKind kind = RateKind::SpatialRho) {
    os << (h1_flavor ? "h_or_dt,err_uf_H1,rate,err_thf_H1,rate,err_up_Hdiv,rate,err_thp_H1,rate\n"
                     : "h_or_dt,err_uf_L2,rate,err_thf_L2,rate,err_up_L2,rate,err_thp_L2,rate\n");
    std::vector<double> h;
    std::array<std::vector<double>, 4> cols;
    for (const ReportRow& r : rep.rows) {
        h.push_back(r.h_or_dt);
        cols[0].push_back(h1_flavor ? r.errors.uf_h1 : r.errors.uf_l2);
        cols[1].push_back(h1_flavor ? r.errors.thf_h1 : r.errors.thf_l2);
        cols[2].push_back(h1_flavor ? r.errors.up_hdiv : r.errors.up_l2);
        cols[3].push_back(h1_flavor ? r.errors.thp_h1 : r.errors.thp_l2);
    }
    std::array<std::vector<double>, 4> rates;
    for (int f = 0; f < 4; ++f) {
        rates[f].assign(rep.rows.size(), std::nan(""));
        for (size_t i = 1; i < rep.rows.size(); ++i)
            rates[f][i] = kind == RateKind::SpatialRho
                              ? std::log(cols[f][i - 1] / cols[f][i]) / std::log(h[i - 1] / h[i])
                              : cols[f][i - 1] / cols[f][i];
    }
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        os << detail::fmt(h[i]);
        for (int f = 0; f < 4; ++f) {
            os << ',' << detail::fmt(cols[f][i]) << ',';
            if (i == 0)
                os << '-';
            else
                os << detail::fmt(rates[f][i]);
        }
        os << '\n';
    }
}

} // namespace geotherm
