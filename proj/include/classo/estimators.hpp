#pragma once

// Estimators for θ in Y = Xθ + Zγ + w:
//
//   * CLasso: alternates θ ← [(X − Zα)ᵀX]⁻¹(X − Zα)ᵀ(Y − Zγ) with a Lasso
//     update of γ on the residual Y − Xθ, starting from the joint Lasso.
//   * UP Lasso: the same iteration with α ≡ 0.
//   * De-sparsified Lasso: one-step correction of the joint Lasso, compared
//     against the first CLasso iterate.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "classo/data.hpp"
#include "classo/nodewise.hpp"

namespace classo {

/// How node-wise penalties are chosen when not given explicitly.
enum class NodewisePenalty {
    /// σ̂_j √(2 log p / n) with σ̂_j from a scaled Lasso of X_j on Z.
    nodewise_scaled,
    /// σ̂ √(2 log p / n) with the response noise estimate σ̂.
    response_sigma,
};

struct ClassoConfig {
    /// Base penalty λ. Unset means σ̂ √(2 log m / n), m = d + p.
    std::optional<double> lambda_base{};
    /// c in λ_t = λ (1 + c ‖γ^{t−1} − γ^{t−2}‖₁).
    double schedule_c = 0.5;
    /// Maximum number of (θ, γ) updates T.
    std::size_t iterations = 10;
    double inner_tol = 1e-8;
    bool record_trace = false;
    /// Use α ≡ 0 (UP Lasso).
    bool alpha_zero = false;
    /// Explicit node-wise penalties, one per column of X.
    std::optional<Vector> nodewise_lambdas{};
    NodewisePenalty nodewise_penalty = NodewisePenalty::nodewise_scaled;
    /// Noise level used for λ and Ω̂. Unset means scaled Lasso on (X, Z).
    std::optional<double> sigma_hat{};
    /// Optional upper bound on λ_t / λ.
    std::optional<double> lambda_cap{};

    void validate() const;
};

enum class FitStatus { converged, nonconverged };

struct IterationRecord {
    std::size_t t = 0;
    Vector theta;
    Vector gamma;
    /// ‖γ^t − γ^{t−1}‖₁
    double gamma_step = 0.0;
    double lambda_t = 0.0;
    /// ‖γ^t‖₁
    double gamma_l1 = 0.0;
};

struct FixedPointResiduals {
    /// ‖n⁻¹X̃ᵀ(Y − Xθ̂ − Zγ̂)‖_∞
    double r_a = 0.0;
    /// KKT violation of γ̂ for the residual Lasso at the last penalty used.
    double r_b = 0.0;
};

struct LassoStart {
    Vector theta0;
    Vector gamma0;
};

struct ClassoEstimate {
    Vector theta;
    Vector gamma;
    double sigma_hat = 0.0;
    double lambda = 0.0;
    double lambda_last = 0.0;
    OmegaHat omega;
    AlphaMatrix alpha;
    LassoStart start;
    std::vector<IterationRecord> trace;
    FixedPointResiduals fixed_point;
    FitStatus status = FitStatus::nonconverged;
    std::size_t iterations = 0;
};

struct DesparsifiedEstimate {
    double b1 = 0.0;
    /// n⁻¹‖X̃‖² + f·λ₁‖α₁‖₁ with f = DesparsifiedOptions::tau_penalty_factor
    double tau_hat_sq = 0.0;
    /// First CLasso iterate θ¹₁, using τ̃² = n⁻¹X̃ᵀX.
    double theta1_first_iterate = 0.0;
    double tau_tilde_sq = 0.0;
    /// n⁻¹‖X̃‖²
    double xtilde_sq = 0.0;
    std::size_t n = 0;
};

/// RMS of Y, the scale used by the θ-equation residual tolerance.
double response_scale(const BlockMoments& moments);

/// Joint Lasso on U = (X, Z) with the same penalty on θ and γ.
LassoStart lasso_init(const SemiparametricData& data, double lambda, double tol = 1e-8);

/// θ = [(X − Zα)ᵀX]⁻¹ (X − Zα)ᵀ(Y − Zγ). Throws SingularSystem.
Vector theta_update(const SemiparametricData& data, const AlphaMatrix& alpha,
                    std::span<const double> gamma);
Vector theta_update(const BlockMoments& moments, const Matrix& alpha, std::span<const double> gamma);

/// Lasso of Y − Xθ on Z at penalty lambda_t.
Vector gamma_update(const SemiparametricData& data, std::span<const double> theta, double lambda_t,
                    double tol = 1e-8);
LassoSolution gamma_update(const BlockMoments& moments, std::span<const double> theta,
                           double lambda_t, std::span<const double> warm, double tol);

/// λ_t for t ≥ 1. `gamma_hist` holds the most recent iterates, oldest first:
/// {γ⁰} for t = 1 and {γ^{t−2}, γ^{t−1}} for t ≥ 2.
double lambda_schedule(double lambda_base, double c, std::size_t t,
                       std::span<const Vector> gamma_hist);

/// ‖n⁻¹X̃ᵀ(Y − Xθ − Zγ)‖_∞ from moments.
double theta_equation_residual(const BlockMoments& moments, const Matrix& alpha,
                               std::span<const double> theta, std::span<const double> gamma);

/// Everything the iteration needs once σ̂, λ, α and the start are fixed.
struct IterationInputs {
    const BlockMoments& moments;
    const AlphaMatrix& alpha;
    double sigma_hat;
    double lambda;
    LassoStart start;
};

/// Runs the alternating updates. Never throws NonConverged: the estimate
/// carries status and fixed-point residuals instead.
ClassoEstimate classo_iterate(const IterationInputs& inputs, const ClassoConfig& cfg);

/// Full pipeline: σ̂, α, joint Lasso start, iterations, Ω̂.
ClassoEstimate classo_fit(const SemiparametricData& data, const ClassoConfig& cfg = {});

/// classo_fit with α ≡ 0 at base penalty `lambda`.
ClassoEstimate up_lasso_fit(const SemiparametricData& data, double lambda,
                            const ClassoConfig& cfg = {});

struct DesparsifiedOptions {
    std::optional<double> nodewise_lambda{};
    NodewisePenalty nodewise_penalty = NodewisePenalty::nodewise_scaled;
    bool alpha_zero = false;
    std::optional<double> sigma_hat{};
    double tol = 1e-8;
    /// Multiplier f on λ₁‖α₁‖₁ in τ̂². With the (2n)⁻¹ node-wise loss, f = 1
    /// is the usual de-sparsified normalization; f = 2 gives the variant
    /// whose τ̂² differs from n⁻¹X̃ᵀX by λ₁‖α₁‖₁.
    double tau_penalty_factor = 1.0;
};

/// De-sparsified estimate for d = 1. Throws ConfigError for d ≠ 1 and
/// SingularSystem when τ̃² is not positive.
DesparsifiedEstimate desparsified_estimate(const SemiparametricData& data, double lambda,
                                           const DesparsifiedOptions& options = {});

/// Same from precomputed pieces (d = 1).
DesparsifiedEstimate desparsified_from(const BlockMoments& moments, const AlphaMatrix& alpha,
                                       const LassoStart& start, double tau_penalty_factor = 1.0);

}  // namespace classo
