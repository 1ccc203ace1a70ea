#pragma once

// Node-wise regression of each column of interest on the nuisance block:
//
//     α_j = argmin_a (2n)⁻¹‖X_j − Z a‖² + λ_j ‖a‖₁,
//
// the residual matrix X̃ = X − Zα, and the covariance estimate
// Ω̂ = σ̂² (n⁻¹X̃ᵀX̃)⁻¹.

#include <span>

#include "classo/data.hpp"
#include "classo/lasso.hpp"
#include "classo/matrix.hpp"

namespace classo {

struct AlphaMatrix {
    Matrix alpha;             // p×d
    Vector lambdas;           // d
    Matrix xtilde;            // n×d, X − Zα
    Vector kkt_certificates;  // d, ‖n⁻¹Zᵀ(X_j − Zα_j)‖_∞
};

struct OmegaHat {
    Matrix omega;  // d×d
    double sigma_hat = 0.0;
};

/// Penalty rule σ̂ √(2 log p / n) for every column, p = Z.cols().
/// Returns zeros when p = 1; fit_alpha callers relying on the rule must
/// reject that case.
Vector default_lambdas(const Matrix& x, const Matrix& z, double sigma_hat);

/// Fits every column of α. Columns are independent and the result does not
/// depend on the order in which they are solved. Throws NonConverged (with
/// the column index) if a column's solve does not reach `tol`, and
/// ConfigError for negative or non-finite penalties.
AlphaMatrix fit_alpha(const Matrix& x, const Matrix& z, std::span<const double> lambdas,
                      double tol = 1e-8);

/// Same, reusing precomputed moments of (X, Z).
AlphaMatrix fit_alpha(const Matrix& x, const Matrix& z, const BlockMoments& moments,
                      std::span<const double> lambdas, double tol = 1e-8);

/// α ≡ 0, X̃ = X. Certificates still report ‖n⁻¹ZᵀX_j‖_∞.
AlphaMatrix zero_alpha(const Matrix& x, const BlockMoments& moments);

/// Per-column scaled-Lasso noise levels of the node-wise regressions.
Vector nodewise_sigmas(const Matrix& x, const BlockMoments& moments, double tol = 1e-8);

/// σ̂² (n⁻¹X̃ᵀX̃)⁻¹. Throws SingularSystem when X̃ᵀX̃ is numerically singular
/// and ConfigError if sigma_hat is not positive.
OmegaHat omega_hat(const Matrix& xtilde, double sigma_hat);

}  // namespace classo
