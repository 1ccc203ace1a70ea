#include "classo/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "classo/error.hpp"
#include "classo/kernels.hpp"
#include "classo/linalg.hpp"

namespace classo {

namespace {

void check_level(double level_alpha) {
    if (!(level_alpha > 0.0 && level_alpha < 1.0))
        throw ConfigError("significance level must lie strictly between 0 and 1");
}

void check_sigma(double sigma_hat) {
    if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
        throw ConfigError("sigma_hat must be positive and finite");
}

// z_{α/2}: the 1 − α/2 standard normal quantile.
double two_sided_z(double level_alpha) {
    check_level(level_alpha);
    return -normal_quantile(0.5 * level_alpha);
}

double residual_norm(std::span<const double> xtilde_j) {
    const double nrm = norm2(xtilde_j);
    if (!(nrm > 1e-12)) throw DegenerateResidual("residual column has (numerically) zero norm");
    return nrm;
}

// rᵀ(X̃ᵀX̃)⁻¹r
double contrast_variance_factor(std::span<const double> r, const Matrix& xtilde) {
    if (r.size() != xtilde.cols()) throw DimensionMismatch("contrast: r must have length d");
    const Matrix g = crossprod(xtilde, xtilde);
    const Matrix w = solve(g, Matrix::column_vector(r));
    const double q = kernels::dot(r, w.col(0));
    if (!(q > 0.0)) throw ConfigError("contrast: rᵀ(X̃ᵀX̃)⁻¹r must be positive");
    return q;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Acklam's rational approximation followed by one Halley step on erfc.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Refine against the lower or upper tail, whichever is smaller, to keep
    // relative accuracy far out in the tails.
    for (int it = 0; it < 2; ++it) {
        const double e = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double contrast_half_width(std::span<const double> r, const Matrix& xtilde, double sigma_hat,
                           double level_alpha) {
    check_sigma(sigma_hat);
    const double z = two_sided_z(level_alpha);
    return z * sigma_hat * std::sqrt(contrast_variance_factor(r, xtilde));
}

Interval contrast_ci(std::span<const double> r, std::span<const double> theta_hat,
                     const Matrix& xtilde, double sigma_hat, double level_alpha) {
    if (theta_hat.size() != r.size()) throw DimensionMismatch("contrast_ci: r and theta differ in length");
    const double center = kernels::dot(r, theta_hat);
    const double hw = contrast_half_width(r, xtilde, sigma_hat, level_alpha);
    return {center - hw, center + hw, level_alpha};
}

Interval component_ci(double beta_hat_j, std::span<const double> xtilde_j, double sigma_hat,
                      double level_alpha) {
    check_sigma(sigma_hat);
    const double hw = two_sided_z(level_alpha) * sigma_hat / residual_norm(xtilde_j);
    return {beta_hat_j - hw, beta_hat_j + hw, level_alpha};
}

double p_value_component(double beta_hat_j, std::span<const double> xtilde_j, double sigma_hat) {
    check_sigma(sigma_hat);
    const double stat = std::abs(beta_hat_j) * residual_norm(xtilde_j) / sigma_hat;
    return std::min(1.0, 2.0 * normal_sf(stat));
}

TestResult test_contrast(std::span<const double> r, double u, std::span<const double> theta_hat,
                         const Matrix& xtilde, double sigma_hat, double level_alpha) {
    const Interval ci = contrast_ci(r, theta_hat, xtilde, sigma_hat, level_alpha);
    const double diff = kernels::dot(r, theta_hat) - u;
    const double se = sigma_hat * std::sqrt(contrast_variance_factor(r, xtilde));
    TestResult out;
    out.level_alpha = level_alpha;
    out.statistic = diff / se;
    out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(out.statistic)));
    out.reject = !ci.contains(u);
    return out;
}

Interval normal_interval(double estimate, double std_error, double level_alpha) {
    if (!(std_error >= 0.0) || !std::isfinite(std_error))
        throw ConfigError("standard error must be finite and non-negative");
    const double hw = two_sided_z(level_alpha) * std_error;
    return {estimate - hw, estimate + hw, level_alpha};
}

double normal_p_value(double estimate, double std_error) {
    if (!(std_error > 0.0)) throw DegenerateResidual("standard error is zero");
    return std::min(1.0, 2.0 * normal_sf(std::abs(estimate) / std_error));
}

HolmOutcome holm(std::span<const double> p_values, double level_alpha) {
    check_level(level_alpha);
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("holm: p-values must lie in [0, 1]");
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    HolmOutcome out;
    out.cutoff_index = m + 1;
    for (std::size_t k = 1; k <= m; ++k) {
        const double threshold = level_alpha / static_cast<double>(m + 1 - k);
        if (p_values[order[k - 1]] > threshold) {
            out.cutoff_index = k;
            break;
        }
    }
    out.rejected_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(out.cutoff_index - 1));
    return out;
}

}  // namespace classo
