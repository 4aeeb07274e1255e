#include "geotherm/randfield.hpp"

#include <gtest/gtest.h>

using namespace geotherm;

TEST(RandField, ConstantSamples) {
    ConductivitySample s = sample_constant(2.21);
    EXPECT_DOUBLE_EQ(s.k_eval({0.3, 0.7}), 2.21);
    EXPECT_DOUBLE_EQ(s.k_eval({0.9, 0.1}), 2.21);
    EXPECT_DOUBLE_EQ(s.k_min_realized, 2.21);

    ConductivitySample s3 = sample_constant(6.21);
    EXPECT_DOUBLE_EQ(s3.k_min_realized, 6.21);
    EXPECT_DOUBLE_EQ(s3.k_max_realized, 6.21);

    EXPECT_THROW(sample_constant(0.0), Error);
    EXPECT_THROW(sample_constant(-1.0), Error);
}

TEST(RandField, AffineUniformBounds) {
    RngStream rng = derive_stream(123, 0);
    for (int i = 0; i < 2000; ++i) {
        ConductivitySample s = sample_affine_uniform(0.1, rng);
        double k = s.k_eval({0.5, 0.5});
        EXPECT_GE(k, 2.8);
        EXPECT_LE(k, 3.2);
        EXPECT_GE(s.k_min_realized, 3.0 - 2.0 * 0.1); // analytic lower bound
        ASSERT_EQ(s.lambda_draw.size(), 2u);
        EXPECT_LE(std::abs(s.lambda_draw[0]), 1.0);
        EXPECT_LE(std::abs(s.lambda_draw[1]), 1.0);
    }
}

TEST(RandField, SigmaZeroIsDegenerate) {
    RngStream a = derive_stream(9, 4);
    RngStream b = derive_stream(9, 77);
    ConductivitySample sa = sample_affine_uniform(0.0, a);
    ConductivitySample sb = sample_affine_uniform(0.0, b);
    EXPECT_DOUBLE_EQ(sa.k_eval({0.2, 0.2}), 3.0);
    EXPECT_DOUBLE_EQ(sb.k_eval({0.8, 0.9}), 3.0);
}

// Law of large numbers: the sample mean of k approaches 3.
TEST(RandField, AffineUniformMean) {
    RngStream rng = derive_stream(2024, 1);
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += sample_affine_uniform(0.1, rng).k_eval({0, 0});
    EXPECT_NEAR(acc / n, 3.0, 0.01);
}

TEST(RandField, KlWeightClosedForm) {
    KlParams kp;
    kp.L_c = 0.25;
    EXPECT_NEAR(kl_weight(kp, 0), std::sqrt(M_PI * 0.25) / 2.0, 1e-15);
    EXPECT_NEAR(kl_weight(kp, 0), 0.443113, 1e-6);
    EXPECT_NEAR(kl_weight(kp, 1), std::sqrt(M_PI) * 0.25 * std::exp(-std::pow(M_PI * 0.25, 2) / 4.0),
                1e-15);
}

TEST(RandField, KlSigmaZeroIsFlat) {
    KlParams kp;
    kp.sigma = 0.0;
    RngStream rng = derive_stream(5, 0);
    ConductivitySample s = sample_kl_field(kp, rng);
    EXPECT_DOUBLE_EQ(s.k_eval({0.1, 0.9}), kp.a0);
    EXPECT_DOUBLE_EQ(s.k_min_realized, kp.a0);
}

// Plugging the extreme variates into the closed form bounds the probe max.
TEST(RandField, KlExtremeVariatesMatchClosedForm) {
    KlParams kp; // a0=1, sigma=0.15, n_f=3, L_c=0.25
    std::vector<double> Y(2 * kp.n_f + 1, std::sqrt(3.0));
    double probe_max = -1e300;
    Vec2 argmax{0, 0};
    for (int iy = 0; iy < 50; ++iy) {
        Vec2 p{0.5, (iy + 0.5) / 50.0};
        double k = kl_field_eval(kp, Y, p);
        if (k > probe_max) {
            probe_max = k;
            argmax = p;
        }
    }
    EXPECT_NEAR(probe_max, kl_field_eval(kp, Y, argmax), 1e-12);
    // the y-only field is constant in x
    EXPECT_NEAR(kl_field_eval(kp, Y, {0.0, 0.3}), kl_field_eval(kp, Y, {0.9, 0.3}), 1e-15);
}

TEST(RandField, KlPositivityGuard) {
    KlParams kp;
    kp.sigma = 0.0;
    kp.floor = 0.99; // a0 = 1 > floor, accepted
    RngStream rng = derive_stream(1, 0);
    EXPECT_NO_THROW(sample_kl_field(kp, rng));
    kp.floor = 1.01; // every draw rejected
    EXPECT_THROW(sample_kl_field(kp, rng), Error);
}

TEST(RandField, KlSampleWithinRealizedBounds) {
    KlParams kp;
    RngStream rng = derive_stream(77, 3);
    ConductivitySample s = sample_kl_field(kp, rng);
    EXPECT_GT(s.k_min_realized, kp.floor);
    // exact containment on the probe grid itself
    for (int iy = 0; iy < 50; ++iy) {
        double k = s.k_eval({0.37, (iy + 0.5) / 50.0});
        EXPECT_GE(k, s.k_min_realized);
        EXPECT_LE(k, s.k_max_realized);
    }
    // elsewhere the field can poke past the grid extrema by the wiggle scale
    for (int i = 0; i < 100; ++i) {
        double k = s.k_eval({0.37, i / 99.0});
        EXPECT_GE(k, s.k_min_realized - 0.05);
        EXPECT_LE(k, s.k_max_realized + 0.05);
    }
    EXPECT_EQ(s.lambda_draw.size(), 7u); // 2 n_f + 1 variates recorded
}

TEST(RandField, StreamDeterminismAndSeparation) {
    RngStream a1 = derive_stream(42, 0);
    RngStream a2 = derive_stream(42, 0);
    RngStream b = derive_stream(42, 1);
    bool all_equal = true, any_equal = false;
    for (int i = 0; i < 1000; ++i) {
        uint64_t x = a1.next_u64(), y = a2.next_u64(), z = b.next_u64();
        all_equal = all_equal && (x == y);
        any_equal = any_equal || (x == z);
    }
    EXPECT_TRUE(all_equal);
    EXPECT_FALSE(any_equal);
}

// Chi-square over 20 equal bins; 1% critical value for 19 dof is 36.191.
TEST(RandField, UniformVariatesPassChiSquare) {
    RngStream rng = derive_stream(7, 0);
    const int n = 100000, bins = 20;
    int count[bins] = {};
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        count[static_cast<int>(u * bins)]++;
    }
    double expect = static_cast<double>(n) / bins, chi2 = 0.0;
    for (int c : count) chi2 += (c - expect) * (c - expect) / expect;
    EXPECT_LT(chi2, 36.191);
}

TEST(RandField, ScheduleIndependence) {
    // drawing sample j never depends on other samples having been drawn
    auto draw_k = [](uint64_t j) {
        RngStream rng = derive_stream(99, j);
        return sample_affine_uniform(0.1, rng).k_eval({0, 0});
    };
    double k3_first = draw_k(3);
    (void)draw_k(0);
    (void)draw_k(7);
    EXPECT_DOUBLE_EQ(draw_k(3), k3_first);
}
