#pragma once

// Experiment configs (strict JSON schema) and the study drivers behind the
// CLI: deterministic/stochastic spatial convergence, the temporal
// step-halving study, the interface penalty sweep, and plain single runs.
//
// All artifacts are CSV plus a human-readable summary and a metadata record;
// no timestamps anywhere, so re-running a config reproduces files
// byte-for-byte.

#include "geotherm/mcm.hpp"
#include "geotherm/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace geotherm {

struct ExperimentConfig {
    int schema_version = 1;
    std::string experiment; // det_convergence | stoch_convergence | temporal_convergence |
                            // penalty_study | single_run
    PhysicalParams params;
    double a = 1.0;
    std::string problem_type = "const_k"; // const_k | affine_k
    double k = 2.21;                      // const_k conductivity
    double sigma = 0.1;                   // affine_k spread
    std::vector<int> mesh_levels;         // nx per level; h = 1/nx
    double dt = 1e-3;
    double T = 0.5;
    std::vector<double> dt_list;    // temporal_convergence
    std::vector<double> gamma_list; // penalty_study
    int J = 1;
    uint64_t base_seed = 0;
    int jobs = 1;
    std::string darcy_family = "BDM1"; // BDM1 | RT0
    bool dump_mesh = false;
    std::string out_dir = "out";

    ElementFamily darcy() const {
        if (darcy_family == "BDM1") return ElementFamily::BDM1;
        if (darcy_family == "RT0") return ElementFamily::RT0;
        throw Error("config: darcy_family must be BDM1 or RT0");
    }
};

// ---- parsing / validation --------------------------------------------------

namespace cfgdetail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where, std::vector<std::string>& errs) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) errs.push_back(where + ": unknown key '" + it.key() + "'");
}

} // namespace cfgdetail

/// Parse with unknown-key detection. Violations are collected, not thrown,
/// so `validate` can list all of them at once.
inline ExperimentConfig parse_config(const nlohmann::json& j, std::vector<std::string>& errs) {
    ExperimentConfig c;
    cfgdetail::check_keys(j,
                          {"schema_version", "experiment", "params", "a", "problem", "mesh_levels", "dt",
                           "T", "dt_list", "gamma_list", "J", "base_seed", "jobs", "darcy_family",
                           "dump_mesh", "out_dir"},
                          "config", errs);
    auto grab = [&](const char* key, auto& dst, bool required) {
        if (j.contains(key)) {
            try {
                dst = j.at(key).get<std::decay_t<decltype(dst)>>();
            } catch (const std::exception&) {
                errs.push_back(std::string("config: bad value for '") + key + "'");
            }
        } else if (required) {
            errs.push_back(std::string("config: missing required key '") + key + "'");
        }
    };
    grab("schema_version", c.schema_version, true);
    grab("experiment", c.experiment, true);
    grab("a", c.a, false);
    grab("mesh_levels", c.mesh_levels, false);
    grab("dt", c.dt, false);
    grab("T", c.T, false);
    grab("dt_list", c.dt_list, false);
    grab("gamma_list", c.gamma_list, false);
    grab("J", c.J, false);
    grab("base_seed", c.base_seed, false);
    grab("jobs", c.jobs, false);
    grab("darcy_family", c.darcy_family, false);
    grab("dump_mesh", c.dump_mesh, false);
    grab("out_dir", c.out_dir, false);

    if (j.contains("params")) {
        const auto& p = j.at("params");
        cfgdetail::check_keys(p, {"Pr", "Ra", "Ca", "L", "kf", "kp", "gamma"}, "params", errs);
        auto grabp = [&](const char* key, double& dst) {
            if (p.contains(key)) {
                try {
                    dst = p.at(key).get<double>();
                } catch (const std::exception&) {
                    errs.push_back(std::string("params: bad value for '") + key + "'");
                }
            }
        };
        grabp("Pr", c.params.Pr);
        grabp("Ra", c.params.Ra);
        grabp("Ca", c.params.Ca);
        grabp("L", c.params.L);
        grabp("kf", c.params.kf);
        grabp("kp", c.params.kp);
        grabp("gamma", c.params.gamma);
    }
    if (j.contains("problem")) {
        const auto& p = j.at("problem");
        cfgdetail::check_keys(p, {"type", "k", "sigma"}, "problem", errs);
        if (p.contains("type")) c.problem_type = p.at("type").get<std::string>();
        if (p.contains("k")) c.k = p.at("k").get<double>();
        if (p.contains("sigma")) c.sigma = p.at("sigma").get<double>();
    }
    return c;
}

inline bool integer_step_count(double T, double dt) {
    double ratio = T / dt;
    return ratio >= 1.0 - 1e-9 && std::abs(ratio - std::lround(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> errs;
    static const std::set<std::string> kinds = {"det_convergence", "stoch_convergence",
                                                "temporal_convergence", "penalty_study", "single_run"};
    if (!kinds.count(c.experiment)) errs.push_back("experiment: unknown kind '" + c.experiment + "'");
    if (c.schema_version != 1) errs.push_back("schema_version: only version 1 is supported");
    if (c.problem_type != "const_k" && c.problem_type != "affine_k")
        errs.push_back("problem.type: must be const_k or affine_k");
    if (c.problem_type == "const_k" && !(c.k > 0)) errs.push_back("problem.k: must be positive");
    if (c.problem_type == "affine_k" && c.sigma < 0) errs.push_back("problem.sigma: must be >= 0");
    try {
        c.params.validate();
    } catch (const Error& e) {
        errs.push_back(e.what());
    }
    try {
        c.darcy();
    } catch (const Error& e) {
        errs.push_back(e.what());
    }
    if (c.J < 1) errs.push_back("J: must be >= 1");
    if (c.jobs < 1) errs.push_back("jobs: must be >= 1");
    if (!(c.T > 0)) errs.push_back("T: must be positive");

    if (c.mesh_levels.empty()) errs.push_back("mesh_levels: at least one level required");
    for (int nx : c.mesh_levels)
        if (nx < 1) errs.push_back("mesh_levels: entries must be >= 1");
    for (size_t i = 1; i < c.mesh_levels.size(); ++i)
        if (c.mesh_levels[i] <= c.mesh_levels[i - 1])
            errs.push_back("mesh_levels: must be strictly refining");

    if (c.experiment == "temporal_convergence") {
        if (c.dt_list.size() < 2) errs.push_back("dt_list: temporal study needs >= 2 steps");
        for (size_t i = 0; i < c.dt_list.size(); ++i) {
            if (!(c.dt_list[i] > 0)) errs.push_back("dt_list: entries must be positive");
            if (i > 0 && std::abs(c.dt_list[i] - 0.5 * c.dt_list[i - 1]) > 1e-12 * c.dt_list[i - 1])
                errs.push_back("dt_list: entries must halve (required by the beta estimator)");
        }
        // the study also runs the extra dt/2 level behind the finest entry
        if (!c.dt_list.empty())
            for (double d : {c.dt_list.back() / 2.0})
                if (!integer_step_count(c.T, d)) errs.push_back("dt_list: T/(dt/2) must be an integer");
        for (double d : c.dt_list)
            if (!integer_step_count(c.T, d)) errs.push_back("dt_list: T/dt must be an integer for every entry");
        if (c.mesh_levels.size() != 1) errs.push_back("temporal_convergence: exactly one mesh level");
    } else {
        if (!(c.dt > 0))
            errs.push_back("dt: must be positive");
        else if (!integer_step_count(c.T, c.dt))
            errs.push_back("dt: T/dt must be a positive integer");
    }
    if (c.experiment == "penalty_study") {
        if (c.gamma_list.size() < 2) errs.push_back("gamma_list: penalty study needs >= 2 values");
        for (double g : c.gamma_list)
            if (g < 0) errs.push_back("gamma_list: values must be >= 0");
        if (c.mesh_levels.size() != 1) errs.push_back("penalty_study: exactly one mesh level");
    }
    if (c.experiment == "single_run" && c.mesh_levels.size() != 1)
        errs.push_back("single_run: exactly one mesh level");
    if (c.experiment == "stoch_convergence" && c.problem_type != "affine_k")
        errs.push_back("stoch_convergence: requires problem.type affine_k");
    if (c.experiment == "det_convergence" && c.problem_type != "const_k")
        errs.push_back("det_convergence: requires problem.type const_k");
    return errs;
}

/// Canonical echo of a config (sorted keys, fixed layout).
inline nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["schema_version"] = c.schema_version;
    j["experiment"] = c.experiment;
    j["params"] = {{"Pr", c.params.Pr}, {"Ra", c.params.Ra}, {"Ca", c.params.Ca}, {"L", c.params.L},
                   {"kf", c.params.kf}, {"kp", c.params.kp}, {"gamma", c.params.gamma}};
    j["a"] = c.a;
    if (c.problem_type == "const_k")
        j["problem"] = {{"type", c.problem_type}, {"k", c.k}};
    else
        j["problem"] = {{"type", c.problem_type}, {"sigma", c.sigma}};
    j["mesh_levels"] = c.mesh_levels;
    j["dt"] = c.dt;
    j["T"] = c.T;
    if (!c.dt_list.empty()) j["dt_list"] = c.dt_list;
    if (!c.gamma_list.empty()) j["gamma_list"] = c.gamma_list;
    j["J"] = c.J;
    j["base_seed"] = c.base_seed;
    j["jobs"] = c.jobs;
    j["darcy_family"] = c.darcy_family;
    j["dump_mesh"] = c.dump_mesh;
    j["out_dir"] = c.out_dir;
    return j;
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// ---- shared pieces ----------------------------------------------------------

inline ChannelGeometry reference_geometry() {
    ChannelGeometry g;
    g.x_range = {0.0, 1.0};
    g.y_range_p = {0.0, 1.0};
    g.y_range_f = {1.0, 2.0};
    g.interface_y = 1.0;
    return g;
}

inline std::function<ManufacturedProblem(const ConductivitySample&)>
problem_builder(const ExperimentConfig& c) {
    if (c.problem_type == "const_k") {
        return [c](const ConductivitySample&) { return build_problem_const_k(c.k, c.a, c.params); };
    }
    return [c](const ConductivitySample& s) {
        if (s.lambda_draw.size() < 2) throw Error("affine_k problem needs a two-variate sample");
        return build_problem_affine_k(s.lambda_draw[0], s.lambda_draw[1], c.sigma, c.a, c.params);
    };
}

inline SamplerSpec sampler_spec(const ExperimentConfig& c) {
    SamplerSpec sp;
    if (c.problem_type == "const_k") {
        sp.kind = SampleKind::Constant;
        sp.k_value = c.k;
    } else {
        sp.kind = SampleKind::AffineUniform;
        sp.sigma = c.sigma;
    }
    return sp;
}

// ---- study results ----------------------------------------------------------

struct SpatialStudy {
    std::vector<int> levels;
    ConvergenceReport report; // rows keyed by h = 1/nx
};

struct TemporalStudy {
    std::vector<double> dts;   // table rows; differences against the dt/2 run
    ConvergenceReport report;  // rows keyed by dt, errors = successive differences
};

struct PenaltyStudy {
    std::vector<double> gammas;
    std::vector<ErrorRecord> errors; // RMS over J samples per gamma
};

/// Spatial convergence study: deterministic runs for const_k, Monte Carlo
/// RMS expectations for affine_k.
inline SpatialStudy run_spatial_study(const ExperimentConfig& c, const std::string& records_root = "") {
    SpatialStudy out;
    out.levels = c.mesh_levels;
    for (int nx : c.mesh_levels) {
        Mesh mesh = build_channel_mesh(reference_geometry(), nx, nx, nx);
        Spaces S = build_spaces(mesh, c.darcy());
        McPlan plan;
        plan.J = c.problem_type == "const_k" ? 1 : c.J;
        plan.base_seed = c.base_seed;
        plan.sampler = sampler_spec(c);
        plan.run.params = c.params;
        plan.run.dt = c.dt;
        plan.run.T = c.T;
        plan.jobs = c.jobs;
        if (!records_root.empty()) plan.records_dir = records_root + "/samples_h" + std::to_string(nx);
        McResult res = run_mc(S, plan, problem_builder(c));
        out.report.rows.push_back({mesh.h_grid, res.rms});
    }
    return out;
}

/// Step-halving study at one mesh level. Runs every dt of the list plus the
/// extra halved step, takes per-sample successive differences at T, then the
/// RMS expectation of those differences.
inline TemporalStudy run_temporal_study(const ExperimentConfig& c) {
    TemporalStudy out;
    out.dts = c.dt_list;
    const int nx = c.mesh_levels.at(0);
    Mesh mesh = build_channel_mesh(reference_geometry(), nx, nx, nx);
    Spaces S = build_spaces(mesh, c.darcy());

    std::vector<double> runs = c.dt_list;
    runs.push_back(c.dt_list.back() / 2.0);

    // per dt, per sample: final state
    const int J = c.problem_type == "const_k" ? 1 : c.J;
    SamplerSpec sampler = sampler_spec(c);
    auto builder = problem_builder(c);

    // accumulate squared difference norms per table row and field
    struct Acc {
        double uf_l2 = 0, uf_h1 = 0, thf_l2 = 0, thf_h1 = 0, up_l2 = 0, up_hdiv = 0, thp_l2 = 0,
               thp_h1 = 0;
    };
    std::vector<Acc> acc(c.dt_list.size());

    for (int j = 0; j < J; ++j) {
        RngStream rng = derive_stream(c.base_seed, static_cast<uint64_t>(j));
        ConductivitySample sample = sampler.draw(rng);
        sample.sample_index = j;
        ManufacturedProblem mp = builder(sample);
        ProblemData pd = mp.problem_data();

        std::vector<CoupledState> finals;
        finals.reserve(runs.size());
        for (double dt : runs) {
            FormContext ctx;
            ctx.params = c.params;
            ctx.conductivity = sample.k_eval;
            ctx.dt = dt;
            ctx.h_penalty = mesh.h_grid;
            RunConfig rc;
            rc.params = c.params;
            rc.dt = dt;
            rc.T = c.T;
            finals.push_back(run_sample(S, rc, ctx, pd).final_state);
        }
        auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
            std::vector<double> d(a.size());
            for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
            return d;
        };
        for (size_t r = 0; r < c.dt_list.size(); ++r) {
            const CoupledState& coarse = finals[r];
            const CoupledState& fine = finals[r + 1];
            auto duf = diff(coarse.u_f, fine.u_f);
            auto dthf = diff(coarse.th_f, fine.th_f);
            auto dup = diff(coarse.u_p, fine.u_p);
            auto dthp = diff(coarse.th_p, fine.th_p);
            double uf = fe_l2_norm(S, S.vel_f, duf), ufs = fe_h1_seminorm(S, S.vel_f, duf);
            double tf = fe_l2_norm(S, S.temp_f, dthf), tfs = fe_h1_seminorm(S, S.temp_f, dthf);
            double up = fe_l2_norm(S, S.vel_p, dup), ups = fe_h1_seminorm(S, S.vel_p, dup);
            double tp = fe_l2_norm(S, S.temp_p, dthp), tps = fe_h1_seminorm(S, S.temp_p, dthp);
            acc[r].uf_l2 += uf * uf;
            acc[r].uf_h1 += uf * uf + ufs * ufs;
            acc[r].thf_l2 += tf * tf;
            acc[r].thf_h1 += tf * tf + tfs * tfs;
            acc[r].up_l2 += up * up;
            acc[r].up_hdiv += up * up + ups * ups;
            acc[r].thp_l2 += tp * tp;
            acc[r].thp_h1 += tp * tp + tps * tps;
        }
    }
    for (size_t r = 0; r < c.dt_list.size(); ++r) {
        ErrorRecord e;
        e.uf_l2 = std::sqrt(acc[r].uf_l2 / J);
        e.uf_h1 = std::sqrt(acc[r].uf_h1 / J);
        e.thf_l2 = std::sqrt(acc[r].thf_l2 / J);
        e.thf_h1 = std::sqrt(acc[r].thf_h1 / J);
        e.up_l2 = std::sqrt(acc[r].up_l2 / J);
        e.up_hdiv = std::sqrt(acc[r].up_hdiv / J);
        e.thp_l2 = std::sqrt(acc[r].thp_l2 / J);
        e.thp_h1 = std::sqrt(acc[r].thp_h1 / J);
        out.report.rows.push_back({c.dt_list[r], e});
    }
    return out;
}

inline PenaltyStudy run_penalty_study(const ExperimentConfig& c) {
    PenaltyStudy out;
    out.gammas = c.gamma_list;
    const int nx = c.mesh_levels.at(0);
    Mesh mesh = build_channel_mesh(reference_geometry(), nx, nx, nx);
    for (double gamma : c.gamma_list) {
        ExperimentConfig cg = c;
        cg.params.gamma = gamma;
        Spaces S = build_spaces(mesh, c.darcy());
        McPlan plan;
        plan.J = c.problem_type == "const_k" ? 1 : c.J;
        plan.base_seed = c.base_seed; // same samples across gammas
        plan.sampler = sampler_spec(cg);
        plan.run.params = cg.params;
        plan.run.dt = c.dt;
        plan.run.T = c.T;
        plan.jobs = c.jobs;
        McResult res = run_mc(S, plan, problem_builder(cg));
        out.errors.push_back(res.rms);
    }
    return out;
}

// ---- artifact emission --------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << body;
}

inline void write_metadata(const ExperimentConfig& c, const std::string& dir) {
    nlohmann::json meta;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_json(c).dump())));
    meta["generator"] = kVersion;
    meta["rng"] = kRngIdentity;
    meta["config_hash"] = hash;
    meta["config"] = config_json(c);
    write_text_file(dir + "/metadata.json", meta.dump(2) + "\n");
}

inline std::string summary_table(const ConvergenceReport& rep, bool h1_flavor, RateKind kind,
                                 const char* key_label) {
    std::ostringstream os;
    const char* rate_label = kind == RateKind::SpatialRho ? "rate" : "beta";
    os << key_label << (h1_flavor ? "      uf_H1      " : "      uf_L2      ") << rate_label
       << (h1_flavor ? "    thf_H1     " : "    thf_L2     ") << rate_label
       << (h1_flavor ? "    up_Hdiv    " : "    up_L2      ") << rate_label
       << (h1_flavor ? "    thp_H1     " : "    thp_L2     ") << rate_label << '\n';
    std::ostringstream csv;
    write_report_csv(csv, rep, h1_flavor, kind);
    std::istringstream rows(csv.str());
    std::string line;
    std::getline(rows, line); // header
    while (std::getline(rows, line)) {
        std::istringstream ls(line);
        std::string tok;
        bool first = true;
        int col = 0;
        while (std::getline(ls, tok, ',')) {
            double v;
            char buf[32];
            if (tok == "-")
                std::snprintf(buf, sizeof(buf), "%9s", "-");
            else {
                v = std::stod(tok);
                std::snprintf(buf, sizeof(buf), col % 2 == 1 ? "%12.6g" : "%9.6g", v);
            }
            os << (first ? "" : "  ") << buf;
            first = false;
            ++col;
        }
        os << '\n';
    }
    return os.str();
}

/// Run the configured experiment and write its artifacts under out_dir.
inline void run_experiment(const ExperimentConfig& c) {
    std::vector<std::string> errs = validate_config(c);
    if (!errs.empty()) {
        std::string all = "invalid config:";
        for (const auto& e : errs) all += "\n  - " + e;
        throw Error(all);
    }
    std::filesystem::create_directories(c.out_dir);
    write_metadata(c, c.out_dir);

    if (c.experiment == "det_convergence" || c.experiment == "stoch_convergence") {
        SpatialStudy st = run_spatial_study(c, c.experiment == "stoch_convergence" ? c.out_dir : "");
        std::ostringstream l2, h1;
        write_report_csv(l2, st.report, false, RateKind::SpatialRho);
        write_report_csv(h1, st.report, true, RateKind::SpatialRho);
        write_text_file(c.out_dir + "/l2.csv", l2.str());
        write_text_file(c.out_dir + "/h1.csv", h1.str());
        std::string sum = "spatial convergence (" + c.experiment + ")\n\nL2 errors\n" +
                          summary_table(st.report, false, RateKind::SpatialRho, "h       ") +
                          "\nH1 / H(div) errors\n" +
                          summary_table(st.report, true, RateKind::SpatialRho, "h       ");
        write_text_file(c.out_dir + "/summary.txt", sum);
        return;
    }
    if (c.experiment == "temporal_convergence") {
        TemporalStudy st = run_temporal_study(c);
        std::ostringstream l2, h1;
        write_report_csv(l2, st.report, false, RateKind::TemporalBeta);
        write_report_csv(h1, st.report, true, RateKind::TemporalBeta);
        write_text_file(c.out_dir + "/temporal_l2.csv", l2.str());
        write_text_file(c.out_dir + "/temporal_h1.csv", h1.str());
        std::string sum = "temporal study (successive step-halving differences at T)\n"
                          "beta = ||v_dt - v_dt/2|| / ||v_dt/2 - v_dt/4||; order = log2(beta)\n\nL2\n" +
                          summary_table(st.report, false, RateKind::TemporalBeta, "dt      ") + "\nH1\n" +
                          summary_table(st.report, true, RateKind::TemporalBeta, "dt      ");
        write_text_file(c.out_dir + "/summary.txt", sum);
        return;
    }
    if (c.experiment == "penalty_study") {
        PenaltyStudy st = run_penalty_study(c);
        std::ostringstream l2, h1, sum;
        l2 << "gamma,err_uf_L2,err_thf_L2,err_up_L2,err_thp_L2\n";
        h1 << "gamma,err_uf_H1,err_thf_H1,err_up_Hdiv,err_thp_H1\n";
        sum << "penalty sweep at h=1/" << c.mesh_levels.at(0) << ", dt=" << c.dt << ", T=" << c.T
            << "\n\n  gamma       uf_L2        thf_L2       up_L2        thp_L2\n";
        for (size_t i = 0; i < st.gammas.size(); ++i) {
            const ErrorRecord& e = st.errors[i];
            l2 << detail::fmt(st.gammas[i]) << ',' << detail::fmt(e.uf_l2) << ',' << detail::fmt(e.thf_l2)
               << ',' << detail::fmt(e.up_l2) << ',' << detail::fmt(e.thp_l2) << '\n';
            h1 << detail::fmt(st.gammas[i]) << ',' << detail::fmt(e.uf_h1) << ',' << detail::fmt(e.thf_h1)
               << ',' << detail::fmt(e.up_hdiv) << ',' << detail::fmt(e.thp_h1) << '\n';
            char row[160];
            std::snprintf(row, sizeof(row), "%9.3g  %12.6g %12.6g %12.6g %12.6g\n", st.gammas[i], e.uf_l2,
                          e.thf_l2, e.up_l2, e.thp_l2);
            sum << row;
        }
        write_text_file(c.out_dir + "/penalty_l2.csv", l2.str());
        write_text_file(c.out_dir + "/penalty_h1.csv", h1.str());
        write_text_file(c.out_dir + "/summary.txt", sum.str());
        return;
    }
    if (c.experiment == "single_run") {
        const int nx = c.mesh_levels.at(0);
        Mesh mesh = build_channel_mesh(reference_geometry(), nx, nx, nx);
        Spaces S = build_spaces(mesh, c.darcy());
        RngStream rng = derive_stream(c.base_seed, 0);
        ConductivitySample sample = sampler_spec(c).draw(rng);
        ManufacturedProblem mp = problem_builder(c)(sample);
        FormContext ctx;
        ctx.params = c.params;
        ctx.conductivity = sample.k_eval;
        ctx.dt = c.dt;
        ctx.h_penalty = mesh.h_grid;
        RunConfig rc;
        rc.params = c.params;
        rc.dt = c.dt;
        rc.T = c.T;
        SampleRunResult run = run_sample(S, rc, ctx, mp.problem_data(), true);

        std::ostringstream diag;
        diag << "step,t,uf_l2,pf_l2,thf_l2,up_l2,phip_l2,thp_l2\n";
        for (const StepDiagnostics& d : run.diagnostics)
            diag << d.step << ',' << detail::fmt(d.t) << ',' << detail::fmt(d.uf_l2) << ','
                 << detail::fmt(d.pf_l2) << ',' << detail::fmt(d.thf_l2) << ',' << detail::fmt(d.up_l2)
                 << ',' << detail::fmt(d.phip_l2) << ',' << detail::fmt(d.thp_l2) << '\n';
        write_text_file(c.out_dir + "/diagnostics.csv", diag.str());

        ErrorRecord e = error_norms(S, run.final_state, mp, run.final_state.t);
        std::ostringstream fin;
        fin << "uf_l2,uf_h1,thf_l2,thf_h1,up_l2,up_hdiv,thp_l2,thp_h1,pf_l2,phip_l2\n"
            << detail::fmt(e.uf_l2) << ',' << detail::fmt(e.uf_h1) << ',' << detail::fmt(e.thf_l2) << ','
            << detail::fmt(e.thf_h1) << ',' << detail::fmt(e.up_l2) << ',' << detail::fmt(e.up_hdiv) << ','
            << detail::fmt(e.thp_l2) << ',' << detail::fmt(e.thp_h1) << ',' << detail::fmt(e.pf_l2) << ','
            << detail::fmt(e.phip_l2) << '\n';
        write_text_file(c.out_dir + "/final_errors.csv", fin.str());

        std::ostringstream sum;
        sum << "single run: nx=" << nx << " dt=" << c.dt << " T=" << c.T << " J-index 0\n"
            << "final-time errors: uf_l2=" << e.uf_l2 << " thf_l2=" << e.thf_l2 << " up_l2=" << e.up_l2
            << " thp_l2=" << e.thp_l2 << "\n";
        write_text_file(c.out_dir + "/summary.txt", sum.str());

        if (c.dump_mesh) {
            std::ostringstream ms;
            write_mesh_text(mesh, ms);
            write_text_file(c.out_dir + "/mesh.txt", ms.str());
        }
        return;
    }
    throw Error("run_experiment: unhandled experiment kind");
}

} // namespace geotherm
