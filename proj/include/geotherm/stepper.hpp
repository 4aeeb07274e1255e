#pragma once

// March one conductivity sample through the decoupled scheme. Each time step
// runs Step 1 (Navier-Stokes), Step 2 (fluid heat), Step 3 (Darcy), Step 4
// (porous heat), in that order; Step 4 sees the Step-2 output of the same
// level. The Step-3 matrix depends only on (sample, dt, params), so one
// factorization per sample serves all steps.

#include "geotherm/assembly.hpp"
#include "geotherm/linalg.hpp"
#include "geotherm/problem.hpp"

#include <optional>
#include <vector>

namespace geotherm {

struct CoupledState {
    double t = 0.0;
    std::vector<double> u_f, p_f, th_f; // fluid: MINI velocity, P1 pressure, P1 temperature
    std::vector<double> u_p, phi_p, th_p; // porous: H(div) velocity, P0 pressure, P1 temperature
};

struct RunConfig {
    PhysicalParams params;
    double dt = 1e-3;
    double T = 0.5;
    double solver_tol = 1e-10;

    int n_steps() const {
        double ratio = T / dt;
        int n = static_cast<int>(std::lround(ratio));
        if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
            throw Error("RunConfig: T/dt must be a positive integer");
        return n;
    }
};

struct StepDiagnostics {
    int step = 0;
    double t = 0.0;
    double uf_l2 = 0, pf_l2 = 0, thf_l2 = 0, up_l2 = 0, phip_l2 = 0, thp_l2 = 0;
};

inline const std::vector<BoundaryTag>& fluid_velocity_tags() {
    static const std::vector<BoundaryTag> tags = {BoundaryTag::Top, BoundaryTag::LeftFluid,
                                                  BoundaryTag::RightFluid, BoundaryTag::Interface};
    return tags;
}
inline const std::vector<BoundaryTag>& fluid_exterior_tags() {
    static const std::vector<BoundaryTag> tags = {BoundaryTag::Top, BoundaryTag::LeftFluid,
                                                  BoundaryTag::RightFluid};
    return tags;
}
inline const std::vector<BoundaryTag>& porous_exterior_tags() {
    static const std::vector<BoundaryTag> tags = {BoundaryTag::Bottom, BoundaryTag::LeftPorous,
                                                  BoundaryTag::RightPorous};
    return tags;
}
inline const std::vector<BoundaryTag>& porous_noflux_tags() {
    static const std::vector<BoundaryTag> tags = {BoundaryTag::Bottom, BoundaryTag::LeftPorous,
                                                  BoundaryTag::RightPorous, BoundaryTag::Interface};
    return tags;
}

class SampleStepper {
public:
    SampleStepper(const Spaces& spaces, FormContext ctx, ProblemData prob, double solver_tol = 1e-10)
        : S_(spaces), ctx_(std::move(ctx)), prob_(std::move(prob)), tol_(solver_tol) {
        ctx_.validate();
        // u_p . n_p = 0 on the whole porous boundary including the interface;
        // values are zero for all time, so the constrained Step-3 matrix is constant.
        bc_darcy_ = dirichlet_hdiv_normal(S_.vel_p, *S_.mesh, porous_noflux_tags(),
                                          [](Vec2) { return Vec2{0.0, 0.0}; });
    }

    CoupledState initial_state() const {
        CoupledState st;
        st.t = 0.0;
        st.u_f = interpolate_velocity([&](Vec2 p) { return prob_.u_f0(p); }, S_.vel_f, *S_.mesh);
        st.p_f = interpolate_scalar([&](Vec2 p) { return prob_.p_f0(p); }, S_.pres_f, *S_.mesh);
        st.th_f = interpolate_scalar([&](Vec2 p) { return prob_.th_f0(p); }, S_.temp_f, *S_.mesh);
        st.u_p = interpolate_hdiv([&](Vec2 p) { return prob_.u_p0(p); }, S_.vel_p, *S_.mesh);
        st.phi_p = interpolate_scalar([&](Vec2 p) { return prob_.phi_p0(p); }, S_.pres_p, *S_.mesh);
        st.th_p = interpolate_scalar([&](Vec2 p) { return prob_.th_p0(p); }, S_.temp_p, *S_.mesh);
        return st;
    }

    CoupledState advance(const CoupledState& old) {
        const Mesh& mesh = *S_.mesh;
        const double t_next = old.t + ctx_.dt;
        CoupledState st;
        st.t = t_next;

        try { // Step 1: Navier-Stokes
            SparseSystem sys = assemble_ns(ctx_, S_, old.u_f, old.th_f, t_next, prob_.body_force);
            DirichletBC bc = dirichlet_velocity(S_.vel_f, mesh, fluid_velocity_tags(),
                                                [&](Vec2 p) { return prob_.vel_trace(p, t_next); });
            sys.constrain(bc.rows);
            auto [x, fact] = solve(sys, tol_);
            st.u_f.assign(x.data(), x.data() + S_.vel_f.n_dofs);
            st.p_f.assign(x.data() + S_.vel_f.n_dofs, x.data() + S_.vel_f.n_dofs + S_.pres_f.n_dofs);
        } catch (const Error& e) {
            throw Error(std::string("step 1 (Navier-Stokes) at t=") + std::to_string(t_next) + ": " + e.what());
        }

        try { // Step 2: fluid temperature
            SparseSystem sys = assemble_theta_f(ctx_, S_, old.u_f, old.th_f, old.th_p, t_next, prob_.heat_src_f);
            DirichletBC bc = dirichlet_scalar(S_.temp_f, mesh, fluid_exterior_tags(),
                                              [&](Vec2 p) { return prob_.temp_f_trace(p, t_next); });
            sys.constrain(bc.rows);
            st.th_f = to_std(solve(sys, tol_).first);
        } catch (const Error& e) {
            throw Error(std::string("step 2 (fluid temperature) at t=") + std::to_string(t_next) + ": " + e.what());
        }

        try { // Step 3: Darcy, factorization reused across steps
            SparseSystem sys = assemble_darcy(ctx_, S_, old.u_p, old.th_p, t_next, prob_.darcy_load);
            sys.constrain(bc_darcy_.rows);
            if (!darcy_fact_) darcy_fact_ = factorize(sys);
            DVec x = solve_with(*darcy_fact_, sys.rhs, tol_);
            st.u_p.assign(x.data(), x.data() + S_.vel_p.n_dofs);
            st.phi_p.assign(x.data() + S_.vel_p.n_dofs, x.data() + S_.vel_p.n_dofs + S_.pres_p.n_dofs);
        } catch (const Error& e) {
            throw Error(std::string("step 3 (Darcy) at t=") + std::to_string(t_next) + ": " + e.what());
        }

        try { // Step 4: porous temperature, consumes th_f of this level
            SparseSystem sys = assemble_theta_p(ctx_, S_, old.u_p, old.th_p, st.th_f, old.th_f, t_next,
                                                prob_.heat_src_p);
            DirichletBC bc = dirichlet_scalar(S_.temp_p, mesh, porous_exterior_tags(),
                                              [&](Vec2 p) { return prob_.temp_p_trace(p, t_next); });
            sys.constrain(bc.rows);
            st.th_p = to_std(solve(sys, tol_).first);
        } catch (const Error& e) {
            throw Error(std::string("step 4 (porous temperature) at t=") + std::to_string(t_next) + ": " + e.what());
        }
        return st;
    }

    const FormContext& context() const { return ctx_; }
    const ProblemData& problem() const { return prob_; }

private:
    static std::vector<double> to_std(const DVec& v) { return {v.data(), v.data() + v.size()}; }

    const Spaces& S_;
    FormContext ctx_;
    ProblemData prob_;
    double tol_;
    DirichletBC bc_darcy_;
    std::optional<Factorization> darcy_fact_;
};

struct SampleRunResult {
    CoupledState final_state;
    std::vector<StepDiagnostics> diagnostics;
};

inline StepDiagnostics state_norms(const Spaces& S, const CoupledState& st, int step) {
    StepDiagnostics d;
    d.step = step;
    d.t = st.t;
    d.uf_l2 = fe_l2_norm(S, S.vel_f, st.u_f);
    d.pf_l2 = fe_l2_norm(S, S.pres_f, st.p_f);
    d.thf_l2 = fe_l2_norm(S, S.temp_f, st.th_f);
    d.up_l2 = fe_l2_norm(S, S.vel_p, st.u_p);
    d.phip_l2 = fe_l2_norm(S, S.pres_p, st.phi_p);
    d.thp_l2 = fe_l2_norm(S, S.temp_p, st.th_p);
    return d;
}

/// Interpolate initial data and march N = T/dt steps.
inline SampleRunResult run_sample(const Spaces& spaces, const RunConfig& config, const FormContext& ctx,
                                  const ProblemData& prob, bool collect_diagnostics = false) {
    const int n = config.n_steps();
    FormContext c = ctx;
    c.dt = config.dt;
    SampleStepper stepper(spaces, c, prob, config.solver_tol);
    SampleRunResult out;
    CoupledState st = stepper.initial_state();
    if (collect_diagnostics) out.diagnostics.push_back(state_norms(spaces, st, 0));
    for (int k = 0; k < n; ++k) {
        st = stepper.advance(st);
        if (collect_diagnostics) out.diagnostics.push_back(state_norms(spaces, st, k + 1));
    }
    out.final_state = std::move(st);
    return out;
}

/// Mean of a pressure field; the zero-mean constraint keeps these at zero.
inline double pressure_integral(const Spaces& S, const DofMap& dm, const std::vector<double>& x) {
    const std::vector<double>& w = (&dm == &S.pres_f) ? S.pres_f_int : S.pres_p_int;
    double acc = 0.0;
    for (int i = 0; i < dm.n_dofs; ++i) acc += w[i] * x[i];
    return acc;
}

} // namespace geotherm
