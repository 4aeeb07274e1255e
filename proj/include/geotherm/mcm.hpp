#pragma once

// Monte Carlo driver. Sample j draws its conductivity from the stream
// derive_stream(base_seed, j), marches the decoupled scheme, and is scored
// against its own (possibly draw-dependent) exact solution. Per-sample
// records are written before aggregation when a records directory is set,
// so an interrupted study resumes by skipping completed samples. Results
// depend only on (plan, problem), never on scheduling.

#include "geotherm/mesh.hpp"
#include "geotherm/randfield.hpp"
#include "geotherm/stepper.hpp"
#include "geotherm/verify.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace geotherm {

struct SamplerSpec {
    SampleKind kind = SampleKind::Constant;
    double k_value = 1.0; // Constant
    double sigma = 0.1;   // AffineUniform
    KlParams kl;          // KlField

    ConductivitySample draw(RngStream& rng) const {
        switch (kind) {
        case SampleKind::Constant: return sample_constant(k_value);
        case SampleKind::AffineUniform: return sample_affine_uniform(sigma, rng);
        default: return sample_kl_field(kl, rng);
        }
    }
};

struct McPlan {
    int J = 1;
    uint64_t base_seed = 0;
    SamplerSpec sampler;
    RunConfig run;
    int jobs = 1;
    std::string records_dir; // empty: in-memory only

    void validate() const {
        if (J < 1) throw Error("McPlan: J must be >= 1");
        if (jobs < 1) throw Error("McPlan: jobs must be >= 1");
    }
};

struct SampleRecord {
    int j = 0;
    SampleKind kind = SampleKind::Constant;
    double k_min = 0, k_max = 0;
    std::vector<double> draws;
    ErrorRecord errors;
};

struct McResult {
    std::vector<SampleRecord> samples; // indexed by j
    ErrorRecord rms;                   // sqrt of mean squared errors
    // componentwise means of the final coefficient vectors (E[v] estimator)
    std::vector<double> mean_u_f, mean_th_f, mean_u_p, mean_th_p;
};

/// sqrt((1/J) sum of squares); inputs are squared norms.
inline double estimate_rms(const std::vector<double>& squared) {
    if (squared.empty()) throw Error("estimate_rms: empty input");
    double acc = 0.0;
    for (double v : squared) acc += v;
    return std::sqrt(acc / static_cast<double>(squared.size()));
}

inline std::vector<double> estimate_mean_field(const std::vector<std::vector<double>>& fields) {
    if (fields.empty()) throw Error("estimate_mean_field: empty input");
    std::vector<double> mean(fields[0].size(), 0.0);
    for (const auto& f : fields) {
        if (f.size() != mean.size()) throw Error("estimate_mean_field: length mismatch");
        for (size_t i = 0; i < f.size(); ++i) mean[i] += f[i];
    }
    for (double& v : mean) v /= static_cast<double>(fields.size());
    return mean;
}

namespace detail {

inline std::string record_path(const std::string& dir, int j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%05d.csv", j);
    return dir + "/" + buf;
}

inline void write_record(const std::string& path, const SampleRecord& r) {
    std::ostringstream os;
    os << r.j << ',' << to_string(r.kind) << ',' << fmt(r.k_min) << ',' << fmt(r.k_max) << ','
       << r.draws.size();
    for (double d : r.draws) os << ',' << fmt(d);
    auto sq = r.errors;
    os << ',' << fmt(sq.uf_l2) << ',' << fmt(sq.uf_h1) << ',' << fmt(sq.thf_l2) << ',' << fmt(sq.thf_h1)
       << ',' << fmt(sq.up_l2) << ',' << fmt(sq.up_hdiv) << ',' << fmt(sq.thp_l2) << ',' << fmt(sq.thp_h1)
       << ',' << fmt(sq.pf_l2) << ',' << fmt(sq.phip_l2) << '\n';
    std::ofstream f(path);
    f << os.str();
}

inline bool read_record(const std::string& path, int j, SampleRecord& out) {
    std::ifstream f(path);
    if (!f) return false;
    std::string line;
    if (!std::getline(f, line)) return false;
    std::istringstream is(line);
    std::string tok;
    auto next = [&]() {
        if (!std::getline(is, tok, ',')) throw Error("sample record: truncated line in " + path);
        return tok;
    };
    out.j = std::stoi(next());
    if (out.j != j) return false;
    std::string kind = next();
    out.kind = kind == "constant" ? SampleKind::Constant
                                  : (kind == "affine_uniform" ? SampleKind::AffineUniform : SampleKind::KlField);
    out.k_min = std::stod(next());
    out.k_max = std::stod(next());
    int nd = std::stoi(next());
    out.draws.resize(nd);
    for (int i = 0; i < nd; ++i) out.draws[i] = std::stod(next());
    double* e[] = {&out.errors.uf_l2, &out.errors.uf_h1,  &out.errors.thf_l2, &out.errors.thf_h1,
                   &out.errors.up_l2, &out.errors.up_hdiv, &out.errors.thp_l2, &out.errors.thp_h1,
                   &out.errors.pf_l2, &out.errors.phip_l2};
    for (double* p : e) *p = std::stod(next());
    return true;
}

} // namespace detail

/// Run J independent samples against the manufactured problem family; the
/// builder maps each drawn sample to its exact solution and forcing.
inline McResult run_mc(const Spaces& S, const McPlan& plan,
                       const std::function<ManufacturedProblem(const ConductivitySample&)>& problem_for,
                       bool mean_fields = false) {
    plan.validate();
    const bool persist = !plan.records_dir.empty();
    if (persist) std::filesystem::create_directories(plan.records_dir);

    McResult res;
    res.samples.resize(plan.J);
    std::vector<CoupledState> finals(mean_fields ? plan.J : 0);

    std::atomic<int> next_j{0};
    std::atomic<bool> failed{false};
    std::string fail_msg;
    std::mutex fail_mu;

    auto work = [&]() {
        for (;;) {
            int j = next_j.fetch_add(1);
            if (j >= plan.J || failed.load()) return;
            try {
                SampleRecord rec;
                bool resumed = persist && !mean_fields &&
                               detail::read_record(detail::record_path(plan.records_dir, j), j, rec);
                if (!resumed) {
                    RngStream rng = derive_stream(plan.base_seed, static_cast<uint64_t>(j));
                    ConductivitySample sample = plan.sampler.draw(rng);
                    sample.sample_index = j;
                    ManufacturedProblem mp = problem_for(sample);
                    FormContext ctx;
                    ctx.params = plan.run.params;
                    ctx.conductivity = sample.k_eval;
                    ctx.dt = plan.run.dt;
                    ctx.h_penalty = S.mesh->h_grid;
                    SampleRunResult run = run_sample(S, plan.run, ctx, mp.problem_data());
                    rec.j = j;
                    rec.kind = sample.kind;
                    rec.k_min = sample.k_min_realized;
                    rec.k_max = sample.k_max_realized;
                    rec.draws = sample.lambda_draw;
                    rec.errors = error_norms(S, run.final_state, mp, run.final_state.t);
                    if (persist) detail::write_record(detail::record_path(plan.records_dir, j), rec);
                    if (mean_fields) finals[j] = std::move(run.final_state);
                }
                res.samples[j] = std::move(rec);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mu);
                failed.store(true);
                if (fail_msg.empty()) fail_msg = "sample " + std::to_string(j) + ": " + e.what();
            }
        }
    };

    int jobs = std::min(plan.jobs, plan.J);
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw Error("run_mc aborted: " + fail_msg);

    // Aggregation in j order, independent of completion order.
    std::array<double, 10> acc{};
    for (const SampleRecord& r : res.samples) {
        auto sq = r.errors.squares();
        for (int i = 0; i < 10; ++i) acc[i] += sq[i];
    }
    for (double& v : acc) v /= static_cast<double>(plan.J);
    res.rms = ErrorRecord::from_squares(acc);

    if (mean_fields) {
        auto mean_of = [&](auto member) {
            std::vector<std::vector<double>> fields;
            fields.reserve(plan.J);
            for (const CoupledState& st : finals) fields.push_back(st.*member);
            return estimate_mean_field(fields);
        };
        res.mean_u_f = mean_of(&CoupledState::u_f);
        res.mean_th_f = mean_of(&CoupledState::th_f);
        res.mean_u_p = mean_of(&CoupledState::u_p);
        res.mean_th_p = mean_of(&CoupledState::th_p);
    }
    return res;
}

} // namespace geotherm
