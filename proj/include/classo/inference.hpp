#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "classo/matrix.hpp"

namespace classo {

/// Standard normal CDF Φ.
double normal_cdf(double x);
/// Upper tail 1 − Φ(x), accurate for large x.
double normal_sf(double x);
/// Φ⁻¹(p) for p in (0, 1).
double normal_quantile(double p);

/// A symmetric interval about the point estimate; `level_alpha` is the
/// significance level it was built at (coverage 1 − level_alpha).
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double level_alpha = 0.05;

    double center() const noexcept { return 0.5 * (lower + upper); }
    double half_width() const noexcept { return 0.5 * (upper - lower); }
    bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double level_alpha = 0.05;
};

struct HolmOutcome {
    /// Original indices of rejected hypotheses, in increasing p-value order.
    std::vector<std::size_t> rejected_indices;
    /// 1-based k: the first sorted position with P_(k) > α/(m + 1 − k), or m + 1.
    std::size_t cutoff_index = 1;
};

/// Half-width z_{α/2} σ̂ √(rᵀ(X̃ᵀX̃)⁻¹r) of the interval for rᵀθ.
double contrast_half_width(std::span<const double> r, const Matrix& xtilde, double sigma_hat,
                           double level_alpha);

/// (1 − α) interval for rᵀθ centred at rᵀθ̂. Throws SingularSystem when
/// X̃ᵀX̃ is singular and ConfigError for invalid levels or a null contrast.
Interval contrast_ci(std::span<const double> r, std::span<const double> theta_hat,
                     const Matrix& xtilde, double sigma_hat, double level_alpha);

/// β̂_j ± z_{1−α/2} σ̂ / ‖x̃_j‖. Throws DegenerateResidual if ‖x̃_j‖ ≤ 1e-12.
Interval component_ci(double beta_hat_j, std::span<const double> xtilde_j, double sigma_hat,
                      double level_alpha);

/// 2 (1 − Φ(|β̂_j| ‖x̃_j‖ / σ̂)).
double p_value_component(double beta_hat_j, std::span<const double> xtilde_j, double sigma_hat);

/// Two-sided test of rᵀθ = u; rejects exactly when u lies outside
/// contrast_ci at the same level.
TestResult test_contrast(std::span<const double> r, double u, std::span<const double> theta_hat,
                         const Matrix& xtilde, double sigma_hat, double level_alpha);

/// Interval b ± z_{1−α/2} · se for a generic normal estimate.
Interval normal_interval(double estimate, double std_error, double level_alpha);

/// Two-sided normal p-value of estimate / std_error.
double normal_p_value(double estimate, double std_error);

/// Holm step-down procedure at family-wise level α.
HolmOutcome holm(std::span<const double> p_values, double level_alpha);

}  // namespace classo
