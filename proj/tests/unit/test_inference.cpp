#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "classo/error.hpp"
#include "classo/estimators.hpp"
#include "classo/inference.hpp"
#include "classo/simulate.hpp"
#include "oracle.hpp"

using namespace classo;

namespace {

Vector column_with_norm(double norm, std::size_t n = 25) {
    Vector v(n, norm / std::sqrt(static_cast<double>(n)));
    return v;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Normal, CdfCheckpoints) {
    EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-9);
    EXPECT_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_sf(8.0), 6.22096057427178e-16, 1e-25);
}

TEST(Normal, QuantileInvertsCdf) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(0.75), 0.6744897501960817, 1e-12);
    for (double p = 1e-12; p < 1.0; p = p < 0.01 ? p * 10.0 : p + 0.01) {
        const double x = normal_quantile(p);
        EXPECT_NEAR(normal_cdf(x), p, 1e-10 * std::max(p, 1e-3)) << p;
    }
    EXPECT_THROW(normal_quantile(0.0), ConfigError);
    EXPECT_THROW(normal_quantile(1.0), ConfigError);
}

TEST(ContrastCi, Examples) {
    Matrix xt(100, 1, 1.0);  // X̃ᵀX̃ = 100
    const Interval ci = contrast_ci(Vector{1.0}, Vector{0.0}, xt, 1.0, 0.05);
    EXPECT_NEAR(ci.half_width(), 0.19600, 5e-6);
    EXPECT_NEAR(ci.half_width(), 1.959963984540054 * 0.1, 1e-12);
    EXPECT_LT(contrast_ci(Vector{1.0}, Vector{0.0}, xt, 1.0, 0.999999).half_width(), 1e-6);
    EXPECT_NEAR(contrast_ci(Vector{1.0}, Vector{0.0}, xt, 2.0, 0.05).half_width(), 2.0 * ci.half_width(), 1e-15);
}

TEST(ContrastCi, CentredAndAgreesWithComponentForSingleColumn) {
    const Matrix xt = ref::gaussian_matrix(40, 1, 3);
    const Interval a = contrast_ci(Vector{1.0}, Vector{0.7}, xt, 1.3, 0.1);
    const Interval b = component_ci(0.7, xt.col(0), 1.3, 0.1);
    EXPECT_NEAR(a.lower, b.lower, 1e-12);
    EXPECT_NEAR(a.upper, b.upper, 1e-12);
    EXPECT_NEAR(a.center(), 0.7, 1e-15);
}

TEST(ContrastCi, Errors) {
    const Matrix xt = ref::gaussian_matrix(40, 2, 4);
    EXPECT_THROW(contrast_ci(Vector{0.0, 0.0}, Vector{1, 1}, xt, 1.0, 0.05), ConfigError);
    EXPECT_THROW(contrast_ci(Vector{1.0}, Vector{1}, xt, 1.0, 0.05), DimensionMismatch);
    EXPECT_THROW(contrast_ci(Vector{1.0, 1.0}, Vector{1, 1}, xt, 1.0, 1.5), ConfigError);
    Matrix collinear(40, 2);
    for (std::size_t i = 0; i < 40; ++i) collinear(i, 0) = collinear(i, 1) = xt(i, 0);
    EXPECT_THROW(contrast_ci(Vector{1.0, 0.0}, Vector{1, 1}, collinear, 1.0, 0.05), SingularSystem);
}

TEST(ComponentCi, Examples) {
    const Interval ci = component_ci(0.0, column_with_norm(10.0), 1.0, 0.05);
    EXPECT_NEAR(ci.lower, -0.19600, 5e-6);
    EXPECT_NEAR(ci.upper, 0.19600, 5e-6);
    const Interval twice = component_ci(0.0, column_with_norm(20.0), 1.0, 0.05);
    EXPECT_NEAR(twice.half_width(), 0.5 * ci.half_width(), 1e-15);
    const Interval half = component_ci(0.0, column_with_norm(10.0), 1.0, 0.5);
    EXPECT_NEAR(half.half_width(), 0.67449 / 10.0, 1e-6);
    EXPECT_THROW(component_ci(0.0, Vector(5, 0.0), 1.0, 0.05), DegenerateResidual);
}

TEST(ComponentCiProperty, SymmetricAndWidensAsLevelDrops) {
    const Vector x = ref::gaussian_vector(30, 5);
    for (double b : {-2.0, 0.0, 0.37}) {
        double prev = 0.0;
        for (double a : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
            const Interval ci = component_ci(b, x, 0.8, a);
            EXPECT_TRUE(ci.contains(b));
            EXPECT_NEAR(ci.center(), b, 1e-15);
            EXPECT_GT(ci.half_width(), prev);
            prev = ci.half_width();
        }
    }
}

TEST(PValue, Examples) {
    const Vector x = column_with_norm(4.0);
    EXPECT_EQ(p_value_component(0.0, x, 1.0), 1.0);
    EXPECT_NEAR(p_value_component(1.95996 / 4.0, x, 1.0), 0.05, 1e-5);
    double prev = 1.1;
    for (double b = 0.0; b < 2.0; b += 0.05) {
        const double p = p_value_component(b, x, 1.0);
        EXPECT_LT(p, prev);
        prev = p;
    }
    EXPECT_THROW(p_value_component(1.0, Vector(3, 0.0), 1.0), DegenerateResidual);
}

TEST(PValueProperty, RejectsExactlyWhenZeroOutsideInterval) {
    RandomStream rng(5, 0, 1);
    for (int k = 0; k < 1000; ++k) {
        const double b = 3.0 * (rng.uniform() - 0.5);
        const Vector x = column_with_norm(1.0 + 10.0 * rng.uniform());
        const double s = 0.2 + rng.uniform();
        const double a = 0.001 + 0.3 * rng.uniform();
        const bool rejected = p_value_component(b, x, s) < a;
        EXPECT_EQ(rejected, !component_ci(b, x, s, a).contains(0.0)) << k;
    }
}

TEST(TestContrast, PointNullAtEstimate) {
    const Matrix xt = ref::gaussian_matrix(40, 2, 6);
    const Vector theta{0.4, -1.1};
    const TestResult t = test_contrast(Vector{1.0, 2.0}, 0.4 - 2.2, theta, xt, 1.0, 0.05);
    EXPECT_NEAR(t.statistic, 0.0, 1e-15);
    EXPECT_NEAR(t.p_value, 1.0, 1e-15);
    EXPECT_FALSE(t.reject);
}

// CI/test duality on randomized (u, data) pairs.
TEST(TestContrastProperty, DualityWithInterval) {
    RandomStream rng(7, 0, 1);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t d = 1 + static_cast<std::size_t>(k % 3);
        const Matrix xt = ref::gaussian_matrix(20 + k % 7, d, 1000 + k);
        Vector r(d), theta(d);
        for (std::size_t j = 0; j < d; ++j) {
            r[j] = rng.normal();
            theta[j] = rng.normal();
        }
        const double s = 0.1 + 2.0 * rng.uniform();
        const double a = 0.001 + 0.5 * rng.uniform();
        const Interval ci = contrast_ci(r, theta, xt, s, a);
        const double u = ci.center() + (rng.uniform() - 0.5) * 4.0 * ci.half_width();
        const TestResult t = test_contrast(r, u, theta, xt, s, a);
        EXPECT_EQ(t.reject, !ci.contains(u)) << k;
        EXPECT_EQ(t.reject, t.p_value < a) << k;
        EXPECT_GE(t.p_value, 0.0);
        EXPECT_LE(t.p_value, 1.0);
    }
}

TEST(TestContrast, NullCalibrationOnClassoFits) {
    // Y = Zγ* + w with θ* = 0 for a d = 2 block; test θ₁ − θ₂ = 0 at α = 0.05.
    std::size_t rejections = 0;
    const std::size_t reps = 1000;
    for (std::size_t r = 0; r < reps; ++r) {
        const Matrix x = ref::gaussian_matrix(200, 2, 500 + r, 1);
        const Matrix z = ref::gaussian_matrix(200, 20, 500 + r, 2);
        Vector y = ref::gaussian_vector(200, 500 + r, 3);
        for (std::size_t i = 0; i < 200; ++i) y[i] += 1.5 * z(i, 0) - z(i, 3);
        const ClassoEstimate est = classo_fit({y, x, z});
        const TestResult t =
            test_contrast(Vector{1.0, -1.0}, 0.0, est.theta, est.alpha.xtilde, est.sigma_hat, 0.05);
        if (t.reject) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    EXPECT_GE(rate, 0.03);
    EXPECT_LE(rate, 0.07);
}

TEST(Holm, Examples) {
    const HolmOutcome none = holm(Vector{1.0, 1.0, 1.0}, 0.05);
    EXPECT_TRUE(none.rejected_indices.empty());
    EXPECT_EQ(none.cutoff_index, 1u);

    const HolmOutcome two = holm(Vector{0.4, 0.001, 0.02}, 0.05);
    EXPECT_EQ(two.cutoff_index, 3u);
    EXPECT_EQ(two.rejected_indices, (std::vector<std::size_t>{1, 2}));

    const HolmOutcome all = holm(Vector{0.0, 0.0, 0.0, 0.0}, 0.05);
    EXPECT_EQ(all.cutoff_index, 5u);
    EXPECT_EQ(all.rejected_indices.size(), 4u);
}

TEST(Holm, BoundaryUsesStrictInequalityAndStableTies) {
    // P_(1) = α/m exactly is not "greater than" the threshold, so it is rejected.
    const HolmOutcome h = holm(Vector{0.025, 0.5}, 0.05);
    EXPECT_EQ(h.rejected_indices, (std::vector<std::size_t>{0}));
    const HolmOutcome ties = holm(Vector{0.001, 0.3, 0.001, 0.001}, 0.05);
    EXPECT_EQ(ties.rejected_indices, (std::vector<std::size_t>{0, 2, 3}));
    EXPECT_THROW(holm(Vector{0.5, 1.5}, 0.05), ConfigError);
}

TEST(HolmProperty, MonotoneInLevelAndContainsBonferroni) {
    RandomStream rng(9, 0, 1);
    for (int k = 0; k < 500; ++k) {
        const std::size_t m = 1 + static_cast<std::size_t>(k % 30);
        Vector p(m);
        for (double& v : p) v = std::pow(rng.uniform(), 3.0);
        const double a1 = 0.2 * rng.uniform() + 1e-4, a2 = a1 + 0.1 * rng.uniform();
        const auto r1 = as_set(holm(p, a1).rejected_indices);
        const auto r2 = as_set(holm(p, a2).rejected_indices);
        EXPECT_TRUE(std::includes(r2.begin(), r2.end(), r1.begin(), r1.end()));
        std::set<std::size_t> bonf;
        for (std::size_t j = 0; j < m; ++j)
            if (p[j] <= a1 / static_cast<double>(m)) bonf.insert(j);
        EXPECT_TRUE(std::includes(r1.begin(), r1.end(), bonf.begin(), bonf.end()));
        // The rejected set is the k − 1 smallest p-values.
        const HolmOutcome h = holm(p, a1);
        EXPECT_EQ(h.rejected_indices.size() + 1, h.cutoff_index);
        Vector sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j : h.rejected_indices)
            EXPECT_LE(p[j], sorted[h.rejected_indices.size() - 1]);
    }
}
