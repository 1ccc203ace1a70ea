#pragma once

// Cyclic coordinate descent for
//
//     minimize  (2n)⁻¹ ‖y − Xβ‖² + λ ‖β‖₁
//
// plus the scaled Lasso, which estimates β jointly with the noise level.
// No intercept is fitted and columns are used as given.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "classo/matrix.hpp"

namespace classo {

inline double soft_threshold(double z, double lam) noexcept {
    if (z > lam) return z - lam;
    if (z < -lam) return z + lam;
    return 0.0;
}

struct LassoProblem {
    const Matrix& design;
    std::span<const double> response;
    double lambda = 0.0;
    std::optional<Vector> warm_start{};
};

/// The same program described by its sufficient statistics:
/// gram = n⁻¹XᵀX, xty = n⁻¹Xᵀy, yty = n⁻¹‖y‖².
struct CovarianceProblem {
    const Matrix& gram;
    std::span<const double> xty;
    double yty = 0.0;
    double lambda = 0.0;
    std::span<const double> warm_start{};
};

struct LassoOptions {
    double tol = 1e-8;
    std::size_t max_sweeps = 10000;
    /// Cyclic visiting order; empty means 0, 1, ..., m-1.
    std::vector<std::size_t> order{};
    /// Keep the objective value after every sweep in LassoSolution::objective_trace.
    bool record_objective = false;
};

struct LassoSolution {
    Vector coef;
    double objective = 0.0;
    double kkt_violation = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
    Vector objective_trace{};
};

/// Largest subgradient-condition violation of `coef` for the problem; see
/// kkt_residual_from_gradient for the per-coordinate rule.
double kkt_residual(const LassoProblem& problem, std::span<const double> coef);

/// max_j of |g_j − λ sign(β_j)| if β_j ≠ 0, else max(|g_j| − λ, 0),
/// with g = n⁻¹Xᵀ(y − Xβ) supplied by the caller.
double kkt_residual_from_gradient(std::span<const double> gradient,
                                  std::span<const double> coef, double lambda);

/// (2n)⁻¹‖y − Xβ‖² + λ‖β‖₁ evaluated from the residual.
double lasso_objective(const LassoProblem& problem, std::span<const double> coef);

/// Solves the Lasso. Uses cached gram updates when m ≤ n and residual updates
/// otherwise. A solve that hits max_sweeps is returned with converged = false;
/// the caller decides whether that is an error.
LassoSolution solve_lasso(const LassoProblem& problem, const LassoOptions& options = {});

/// Coordinate descent on precomputed sufficient statistics.
LassoSolution solve_lasso_covariance(const CovarianceProblem& problem,
                                     const LassoOptions& options = {});

/// n⁻¹‖y − Xβ‖² from sufficient statistics, clamped at zero.
double mean_squared_residual(const CovarianceProblem& problem, std::span<const double> coef);

struct ScaledLassoFit {
    Vector coef;
    double sigma_hat = 0.0;
    /// Penalty σλ̃ used in the final coefficient solve.
    double lambda = 0.0;
    /// |σ_{k+1} − σ_k| / σ_k at exit.
    double fixed_point_residual = 0.0;
    std::size_t alternations = 0;
};

struct ScaledLassoOptions {
    LassoOptions inner{};
    std::size_t max_alternations = 100;
    double rel_tol = 1e-8;
};

/// Universal penalty √(2 log m / n).
double universal_penalty(std::size_t n, std::size_t m);

/// 1e-4 times the sample standard deviation of y, or 1e-4 when y is constant.
double sigma_floor(std::span<const double> y);

/// Scaled Lasso with the universal penalty. Alternates a Lasso solve at
/// λ = σλ̃ with σ ← max(‖y − Uβ‖/√n, floor) until the relative change in σ
/// is at most 1e-8. Throws ConfigError if U has fewer than two columns and
/// NonConverged when the alternation limit is reached.
ScaledLassoFit scaled_lasso(const Matrix& design, std::span<const double> response,
                            const ScaledLassoOptions& options = {});

/// Scaled Lasso on sufficient statistics. `n` is the sample size behind them.
ScaledLassoFit scaled_lasso_covariance(const Matrix& gram, std::span<const double> xty,
                                       double yty, std::size_t n, double floor,
                                       const ScaledLassoOptions& options = {});

}  // namespace classo
