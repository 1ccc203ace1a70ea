#include "classo/nodewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "classo/error.hpp"
#include "classo/kernels.hpp"
#include "classo/linalg.hpp"

namespace classo {

namespace {

void check_blocks(const Matrix& x, const Matrix& z) {
    if (x.empty() || z.empty()) throw ConfigError("node-wise regression: X and Z must be non-empty");
    if (x.rows() != z.rows()) throw DimensionMismatch("node-wise regression: X and Z row counts differ");
}

// ‖n⁻¹Zᵀ x̃_j‖_∞ evaluated on the data rather than on the moments.
double certificate(const Matrix& z, std::span<const double> xtilde_j) {
    const double inv_n = 1.0 / static_cast<double>(z.rows());
    double worst = 0.0;
    for (std::size_t k = 0; k < z.cols(); ++k)
        worst = std::max(worst, std::abs(kernels::dot(z.col(k), xtilde_j)) * inv_n);
    return worst;
}

void fill_residuals(const Matrix& x, const Matrix& z, AlphaMatrix& out) {
    out.xtilde = x;
    out.kkt_certificates.assign(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        auto col = out.xtilde.col(j);
        for (std::size_t k = 0; k < z.cols(); ++k) {
            const double a = out.alpha(k, j);
            if (a != 0.0) kernels::axpy(-a, z.col(k), col);
        }
        out.kkt_certificates[j] = certificate(z, col);
    }
}

}  // namespace

Vector default_lambdas(const Matrix& x, const Matrix& z, double sigma_hat) {
    if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
        throw ConfigError("default_lambdas: sigma_hat must be positive and finite");
    check_blocks(x, z);
    return Vector(x.cols(), sigma_hat * universal_penalty(x.rows(), z.cols()));
}

AlphaMatrix fit_alpha(const Matrix& x, const Matrix& z, std::span<const double> lambdas, double tol) {
    check_blocks(x, z);
    SemiparametricData blocks{Vector(x.rows(), 0.0), x, z};
    return fit_alpha(x, z, compute_moments(blocks), lambdas, tol);
}

AlphaMatrix fit_alpha(const Matrix& x, const Matrix& z, const BlockMoments& moments,
                      std::span<const double> lambdas, double tol) {
    check_blocks(x, z);
    const std::size_t d = x.cols();
    const std::size_t p = z.cols();
    if (lambdas.size() != d) throw DimensionMismatch("fit_alpha: need one penalty per column of X");
    for (double lam : lambdas)
        if (!std::isfinite(lam) || lam < 0.0)
            throw ConfigError("fit_alpha: node-wise penalties must be finite and non-negative");

    AlphaMatrix out;
    out.alpha = Matrix(p, d);
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    LassoOptions opts;
    opts.tol = tol;
    for (std::size_t j = 0; j < d; ++j) {
        const double xjxj = moments.xx(j, j);
        CovarianceProblem prob{moments.zz, moments.zx.col(j), xjxj, lambdas[j]};
        LassoSolution sol = solve_lasso_covariance(prob, opts);
        if (!sol.converged) {
            std::ostringstream os;
            os << "fit_alpha: node-wise regression for column " << j << " did not converge";
            throw NonConverged(os.str(), sol.kkt_violation, j);
        }
        std::ranges::copy(sol.coef, out.alpha.col(j).begin());
    }
    fill_residuals(x, z, out);

    for (std::size_t j = 0; j < d; ++j) {
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                             std::sqrt(moments.xx(j, j) * (1.0 + max_abs(moments.zz)));
        if (out.kkt_certificates[j] > out.lambdas[j] + tol + slack) {
            std::ostringstream os;
            os << "fit_alpha: column " << j << " violates ‖n⁻¹Zᵀx̃‖∞ <= λ (certificate "
               << out.kkt_certificates[j] << ", λ = " << out.lambdas[j] << ")";
            throw NonConverged(os.str(), out.kkt_certificates[j], j);
        }
    }
    return out;
}

AlphaMatrix zero_alpha(const Matrix& x, const BlockMoments& moments) {
    AlphaMatrix out;
    out.alpha = Matrix(moments.zz.rows(), x.cols());
    out.lambdas.assign(x.cols(), 0.0);
    out.xtilde = x;
    out.kkt_certificates.resize(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) out.kkt_certificates[j] = norm_inf(moments.zx.col(j));
    return out;
}

Vector nodewise_sigmas(const Matrix& x, const BlockMoments& moments, double tol) {
    Vector sigmas(x.cols());
    ScaledLassoOptions opts;
    opts.inner.tol = tol;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const ScaledLassoFit fit = scaled_lasso_covariance(moments.zz, moments.zx.col(j),
                                                           moments.xx(j, j), moments.n,
                                                           sigma_floor(x.col(j)), opts);
        sigmas[j] = fit.sigma_hat;
    }
    return sigmas;
}

OmegaHat omega_hat(const Matrix& xtilde, double sigma_hat) {
    if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
        throw ConfigError("omega_hat: sigma_hat must be positive and finite");
    if (xtilde.empty()) throw DimensionMismatch("omega_hat: empty residual matrix");
    const Matrix g = scaled_gram(xtilde);
    Matrix inv = inverse_spd(g);
    kernels::scale(sigma_hat * sigma_hat, inv.data());
    return {std::move(inv), sigma_hat};
}

}  // namespace classo
