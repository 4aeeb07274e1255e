#include "geotherm/quadrature.hpp"

#include <gtest/gtest.h>

using namespace geotherm;

TEST(Quadrature, Degree1IsCentroidRule) {
    QuadratureRule r = triangle_rule(1);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_NEAR(r.points[0].l1, 1.0 / 3, 1e-15);
    EXPECT_NEAR(r.points[0].w, 0.5, 1e-15);
}

TEST(Quadrature, WeightsSumToReferenceArea) {
    for (int d = 1; d <= 10; ++d) {
        QuadratureRule r = triangle_rule(d);
        double s = 0.0;
        for (const auto& q : r.points) s += q.w;
        EXPECT_NEAR(s, 0.5, 1e-14) << "degree " << d;
    }
}

// Oracle: closed-form monomial integrals over the reference triangle.
TEST(Quadrature, ExactnessTable) {
    for (int d = 1; d <= 10; ++d) {
        QuadratureRule r = triangle_rule(d);
        for (int a = 0; a + 0 <= d; ++a)
            for (int b = 0; a + b <= d; ++b) {
                // x = l2, y = l3 on the reference triangle
                double num = 0.0;
                for (const auto& q : r.points) num += q.w * std::pow(q.l2, a) * std::pow(q.l3, b);
                double exact = monomial_integral(0, a, b);
                EXPECT_NEAR(num, exact, 1e-13 * std::max(1.0, std::abs(exact)))
                    << "degree " << d << " monomial x^" << a << " y^" << b;
            }
    }
}

TEST(Quadrature, Degree2IntegratesXY) {
    QuadratureRule r = triangle_rule(2);
    double num = 0.0;
    for (const auto& q : r.points) num += q.w * q.l2 * q.l3;
    EXPECT_NEAR(num, 1.0 / 24, 1e-15); // integral of x y over the reference triangle
}

TEST(Quadrature, Degree6IntegratesSexticBarycentric) {
    QuadratureRule r = triangle_rule(6);
    double num = 0.0;
    for (const auto& q : r.points) num += q.w * std::pow(q.l1, 3) * std::pow(q.l2, 3);
    EXPECT_NEAR(num, monomial_integral(3, 3, 0), 1e-15);
}

TEST(Quadrature, RejectsUnsupportedDegree) {
    EXPECT_THROW(triangle_rule(0), Error);
    EXPECT_THROW(triangle_rule(11), Error);
}

TEST(GaussLegendre, NodesAndWeights) {
    for (int n = 1; n <= 10; ++n) {
        Gauss1D g = gauss_legendre(n);
        double s = 0.0;
        for (double w : g.weights) s += w;
        EXPECT_NEAR(s, 2.0, 1e-14);
        // exact up to degree 2n-1 on [-1,1]
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double num = 0.0;
            for (size_t i = 0; i < g.nodes.size(); ++i) num += g.weights[i] * std::pow(g.nodes[i], p);
            double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
            EXPECT_NEAR(num, exact, 1e-13) << "n=" << n << " p=" << p;
        }
    }
}
