#include "geotherm/mcm.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace geotherm;

namespace {

ChannelGeometry unit_pair() {
    ChannelGeometry g;
    g.x_range = {0.0, 1.0};
    g.y_range_p = {0.0, 1.0};
    g.y_range_f = {1.0, 2.0};
    g.interface_y = 1.0;
    return g;
}

McPlan small_plan(int J, double sigma, uint64_t seed = 7) {
    McPlan plan;
    plan.J = J;
    plan.base_seed = seed;
    plan.sampler.kind = SampleKind::AffineUniform;
    plan.sampler.sigma = sigma;
    plan.run.dt = 0.01;
    plan.run.T = 0.02;
    return plan;
}

std::function<ManufacturedProblem(const ConductivitySample&)> affine_builder(double sigma) {
    PhysicalParams params;
    return [sigma, params](const ConductivitySample& s) {
        return build_problem_affine_k(s.lambda_draw.at(0), s.lambda_draw.at(1), sigma, 1.0, params);
    };
}

bool records_equal(const ErrorRecord& a, const ErrorRecord& b, double tol) {
    auto sa = a.squares(), sb = b.squares();
    for (int i = 0; i < 10; ++i)
        if (std::abs(std::sqrt(sa[i]) - std::sqrt(sb[i])) > tol) return false;
    return true;
}

} // namespace

TEST(Mcm, EstimateRmsExamples) {
    EXPECT_NEAR(estimate_rms({1.0, 16.0, 64.0}), std::sqrt(27.0), 1e-14);
    EXPECT_NEAR(estimate_rms({9.0}), 3.0, 1e-15);
    EXPECT_NEAR(estimate_rms({4.0, 4.0, 4.0}), 2.0, 1e-15);
    EXPECT_THROW(estimate_rms({}), Error);
}

TEST(Mcm, EstimateMeanFieldExamples) {
    EXPECT_EQ(estimate_mean_field({{1, 2}})[0], 1.0); // J=1 identity
    auto m = estimate_mean_field({{1, 2}, {3, 4}, {5, 6}});
    EXPECT_DOUBLE_EQ(m[0], 3.0);
    EXPECT_DOUBLE_EQ(m[1], 4.0);
    auto z = estimate_mean_field({{1, -2}, {-1, 2}});
    EXPECT_DOUBLE_EQ(z[0], 0.0);
    EXPECT_DOUBLE_EQ(z[1], 0.0);
    EXPECT_THROW(estimate_mean_field({{1, 2}, {1}}), Error);
}

TEST(Mcm, SingleSampleEstimatorIsIdentity) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(1, 0.1);
    McResult res = run_mc(S, plan, affine_builder(0.1));
    ASSERT_EQ(res.samples.size(), 1u);
    EXPECT_TRUE(records_equal(res.rms, res.samples[0].errors, 1e-15));
}

// sigma = 0 degenerates every sample to the deterministic k = 3 problem.
TEST(Mcm, SigmaZeroCollapsesToDeterministic) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(4, 0.0);
    McResult res = run_mc(S, plan, affine_builder(0.0));
    for (const auto& s : res.samples) EXPECT_TRUE(records_equal(s.errors, res.rms, 1e-15));

    // deterministic comparator: constant k = 3 through the same machinery
    PhysicalParams params;
    ManufacturedProblem mp = build_problem_affine_k(0.0, 0.0, 0.0, 1.0, params);
    FormContext ctx;
    ctx.params = params;
    ctx.conductivity = [](Vec2) { return 3.0; };
    ctx.dt = plan.run.dt;
    ctx.h_penalty = mesh.h_grid;
    SampleRunResult run = run_sample(S, plan.run, ctx, mp.problem_data());
    ErrorRecord det = error_norms(S, run.final_state, mp, run.final_state.t);
    EXPECT_TRUE(records_equal(res.rms, det, 1e-12));
}

TEST(Mcm, ParallelScheduleInvariance) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan serial = small_plan(6, 0.1);
    serial.jobs = 1;
    McPlan parallel = small_plan(6, 0.1);
    parallel.jobs = 3;
    McResult a = run_mc(S, serial, affine_builder(0.1));
    McResult b = run_mc(S, parallel, affine_builder(0.1));
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (size_t j = 0; j < a.samples.size(); ++j)
        EXPECT_TRUE(records_equal(a.samples[j].errors, b.samples[j].errors, 0.0));
    EXPECT_TRUE(records_equal(a.rms, b.rms, 0.0));
}

TEST(Mcm, AggregateRecomputableFromRecords) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(5, 0.1);
    McResult res = run_mc(S, plan, affine_builder(0.1));
    std::array<double, 10> acc{};
    for (const auto& s : res.samples) {
        auto sq = s.errors.squares();
        for (int i = 0; i < 10; ++i) acc[i] += sq[i];
    }
    for (double& v : acc) v /= plan.J;
    ErrorRecord recomputed = ErrorRecord::from_squares(acc);
    EXPECT_TRUE(records_equal(recomputed, res.rms, 1e-14));
}

TEST(Mcm, PersistenceAndResume) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "geotherm_mcm_test";
    fs::remove_all(dir);

    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(4, 0.1);
    plan.records_dir = dir.string();
    McResult first = run_mc(S, plan, affine_builder(0.1));
    ASSERT_TRUE(fs::exists(dir / "sample_00002.csv"));

    // resume skips completed samples: drop one record, rerun, same aggregate
    fs::remove(dir / "sample_00001.csv");
    McResult second = run_mc(S, plan, affine_builder(0.1));
    EXPECT_TRUE(records_equal(first.rms, second.rms, 1e-14));
    for (size_t j = 0; j < first.samples.size(); ++j)
        EXPECT_TRUE(records_equal(first.samples[j].errors, second.samples[j].errors, 1e-14));
    fs::remove_all(dir);
}

TEST(Mcm, MeanFieldsComputed) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(3, 0.1);
    McResult res = run_mc(S, plan, affine_builder(0.1), true);
    EXPECT_EQ(static_cast<int>(res.mean_u_f.size()), S.vel_f.n_dofs);
    EXPECT_EQ(static_cast<int>(res.mean_th_p.size()), S.temp_p.n_dofs);
    double norm = 0.0;
    for (double v : res.mean_th_f) norm += v * v;
    EXPECT_GT(norm, 0.0);
}

TEST(Mcm, SampleFailureReportsIndex) {
    Mesh mesh = build_channel_mesh(unit_pair(), 2, 2, 2);
    Spaces S = build_spaces(mesh);
    McPlan plan = small_plan(4, 0.1);
    auto broken = [&](const ConductivitySample& s) -> ManufacturedProblem {
        if (s.sample_index == 2) throw Error("deliberately broken sample");
        return affine_builder(0.1)(s);
    };
    try {
        run_mc(S, plan, broken);
        FAIL() << "expected failure";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("sample 2"), std::string::npos);
    }
}
