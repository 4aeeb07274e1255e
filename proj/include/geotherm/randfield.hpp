#pragma once

// Conductivity sampling. Streams are counter-based (splitmix64 finalizer over
// key + counter), so sample j is reproducible from (base_seed, j) alone and
// samples can run in any order or in parallel without shared RNG state.

#include "geotherm/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace geotherm {

inline constexpr const char* kRngIdentity = "splitmix64-counter";

class RngStream {
public:
    RngStream() = default;
    explicit RngStream(uint64_t key) : key_(key) {}

    uint64_t next_u64() {
        uint64_t z = key_ + (counter_++) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

/// Statistically independent stream for sample j under one base seed.
inline RngStream derive_stream(uint64_t base_seed, uint64_t j) {
    auto mix = [](uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    return RngStream(mix(base_seed + 0x9E3779B97F4A7C15ull) ^ mix(j * 0xD1B54A32D192ED03ull + 1));
}

enum class SampleKind { Constant, AffineUniform, KlField };

inline const char* to_string(SampleKind k) {
    switch (k) {
    case SampleKind::Constant: return "constant";
    case SampleKind::AffineUniform: return "affine_uniform";
    default: return "kl_field";
    }
}

struct ConductivitySample {
    SampleKind kind = SampleKind::Constant;
    std::function<double(Vec2)> k_eval;
    double k_min_realized = 0.0;
    double k_max_realized = 0.0;
    std::vector<double> lambda_draw; // raw variates behind the sample
    int sample_index = 0;
};

inline ConductivitySample sample_constant(double k_value) {
    if (!(k_value > 0.0)) throw Error("sample_constant: k must be positive");
    ConductivitySample s;
    s.kind = SampleKind::Constant;
    s.k_eval = [k_value](Vec2) { return k_value; };
    s.k_min_realized = s.k_max_realized = k_value;
    return s;
}

/// k = 3 + sigma (l1 + l2) with l1, l2 ~ U[-1,1].
inline ConductivitySample sample_affine_uniform(double sigma, RngStream& rng) {
    if (sigma < 0.0) throw Error("sample_affine_uniform: sigma must be >= 0");
    ConductivitySample s;
    s.kind = SampleKind::AffineUniform;
    double l1 = rng.uniform(-1.0, 1.0);
    double l2 = rng.uniform(-1.0, 1.0);
    double k = 3.0 + sigma * (l1 + l2);
    s.k_eval = [k](Vec2) { return k; };
    s.lambda_draw = {l1, l2};
    s.k_min_realized = s.k_max_realized = k;
    return s;
}

struct KlParams {
    double a0 = 1.0;
    double sigma = 0.15;
    int n_f = 3;
    double L_c = 0.25;
    double floor = 0.01;  // reject-and-redraw threshold on the probe minimum
    Interval probe_y{0.0, 1.0};
    Interval probe_x{0.0, 1.0};
};

/// Eigenvalue weights of the truncated expansion:
/// w0 = sqrt(pi Lc)/2, wi = sqrt(pi) Lc exp(-(i pi Lc)^2/4).
inline double kl_weight(const KlParams& kp, int i) {
    if (i == 0) return std::sqrt(M_PI * kp.L_c) / 2.0;
    return std::sqrt(M_PI) * kp.L_c * std::exp(-(i * M_PI * kp.L_c) * (i * M_PI * kp.L_c) / 4.0);
}

/// Closed form of the field for given variates Y_0..Y_{2 n_f}; the field
/// varies in y only.
inline double kl_field_eval(const KlParams& kp, const std::vector<double>& Y, Vec2 p) {
    double k = kp.a0 + kp.sigma * std::sqrt(kl_weight(kp, 0)) * Y.at(0);
    for (int i = 1; i <= kp.n_f; ++i)
        k += kp.sigma * std::sqrt(kl_weight(kp, i)) *
             (Y.at(i) * std::cos(i * M_PI * p.y) + Y.at(kp.n_f + i) * std::sin(i * M_PI * p.y));
    return k;
}

/// Truncated-expansion field with Y ~ U[-sqrt(3), sqrt(3)] (zero mean, unit
/// variance); draws whose probe-grid minimum falls at or below the floor are
/// rejected and redrawn.
inline ConductivitySample sample_kl_field(const KlParams& kp, RngStream& rng) {
    if (!(kp.a0 > 0.0) || kp.n_f < 1) throw Error("sample_kl_field: need a0 > 0 and n_f >= 1");
    const double sqrt3 = std::sqrt(3.0);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> Y(2 * kp.n_f + 1);
        for (double& y : Y) y = rng.uniform(-sqrt3, sqrt3);

        auto eval = [kp, Y](Vec2 p) { return kl_field_eval(kp, Y, p); };

        double kmin = 1e300, kmax = -1e300;
        for (int iy = 0; iy < 50; ++iy)
            for (int ix = 0; ix < 50; ++ix) {
                Vec2 p{kp.probe_x.lo + kp.probe_x.length() * (ix + 0.5) / 50.0,
                       kp.probe_y.lo + kp.probe_y.length() * (iy + 0.5) / 50.0};
                double k = eval(p);
                kmin = std::min(kmin, k);
                kmax = std::max(kmax, k);
            }
        if (kmin <= kp.floor) continue; // reject, redraw from the same stream

        ConductivitySample s;
        s.kind = SampleKind::KlField;
        s.k_eval = eval;
        s.lambda_draw = Y;
        s.k_min_realized = kmin;
        s.k_max_realized = kmax;
        return s;
    }
    throw Error("sample_kl_field: rejection cap reached; field parameters leave no positive draws");
}

} // namespace geotherm
