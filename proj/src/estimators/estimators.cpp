#include "classo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "classo/error.hpp"
#include "classo/kernels.hpp"
#include "classo/linalg.hpp"

namespace classo {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

// Pieces of the θ equation n⁻¹X̃ᵀ(Y − Xθ − Zγ) = b0 − Aθ − Bγ.
struct ThetaSystem {
    Matrix a;   // d×d, n⁻¹X̃ᵀX
    Vector b0;  // d,   n⁻¹X̃ᵀY
    Matrix b;   // p×d, columns n⁻¹ZᵀX̃_j (so Bγ = bᵀγ)
};

ThetaSystem theta_system(const BlockMoments& m, const Matrix& alpha) {
    const std::size_t d = m.xx.rows();
    const std::size_t p = m.zz.rows();
    if (alpha.rows() != p || alpha.cols() != d)
        throw DimensionMismatch("theta update: alpha must be p×d");
    ThetaSystem s{m.xx, m.xy, m.zx};
    for (std::size_t j = 0; j < d; ++j) {
        const auto aj = alpha.col(j);
        for (std::size_t k = 0; k < p; ++k) {
            if (aj[k] == 0.0) continue;
            for (std::size_t i = 0; i < d; ++i) s.a(j, i) -= aj[k] * m.zx(k, i);
            s.b0[j] -= aj[k] * m.zy[k];
            kernels::axpy(-aj[k], m.zz.col(k), s.b.col(j));
        }
    }
    return s;
}

Vector theta_rhs(const ThetaSystem& s, std::span<const double> gamma) {
    Vector rhs = s.b0;
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] -= kernels::dot(s.b.col(j), gamma);
    return rhs;
}

Vector solve_theta(const ThetaSystem& s, std::span<const double> gamma) {
    const Vector rhs = theta_rhs(s, gamma);
    const Matrix sol = solve(s.a, Matrix::column_vector(rhs));
    return Vector(sol.col(0).begin(), sol.col(0).end());
}

double theta_residual(const ThetaSystem& s, std::span<const double> theta,
                      std::span<const double> gamma) {
    Vector v = theta_rhs(s, gamma);
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < theta.size(); ++i) v[j] -= s.a(j, i) * theta[i];
    return norm_inf(v);
}

Vector resolve_nodewise_lambdas(const SemiparametricData& data, const BlockMoments& m,
                                double sigma_hat, const std::optional<Vector>& explicit_lambdas,
                                NodewisePenalty rule, double tol) {
    if (explicit_lambdas) {
        if (explicit_lambdas->size() != data.d())
            throw ConfigError("node-wise penalties: need one value per column of X");
        return *explicit_lambdas;
    }
    if (data.p() < 2)
        throw ConfigError(
            "node-wise penalty rule needs p >= 2 (log p = 0); set node-wise lambdas explicitly");
    Vector lambdas(data.d());
    if (rule == NodewisePenalty::response_sigma) {
        lambdas = default_lambdas(data.x, data.z, sigma_hat);
    } else {
        const Vector sig = nodewise_sigmas(data.x, m, tol);
        for (std::size_t j = 0; j < data.d(); ++j)
            lambdas[j] = sig[j] * universal_penalty(data.n(), data.p());
    }
    for (double lam : lambdas)
        if (!(lam > 0.0))
            throw ConfigError("node-wise penalty rule produced a non-positive value; set it explicitly");
    return lambdas;
}

}  // namespace

void ClassoConfig::validate() const {
    if (lambda_base) require_positive(*lambda_base, "lambda_base");
    if (!(schedule_c >= 0.0) || !std::isfinite(schedule_c))
        throw ConfigError("schedule_c must be finite and non-negative");
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    require_positive(inner_tol, "inner_tol");
    if (sigma_hat) require_positive(*sigma_hat, "sigma_hat");
    if (lambda_cap && !(*lambda_cap >= 1.0)) throw ConfigError("lambda_cap must be at least 1");
}

double response_scale(const BlockMoments& moments) { return std::sqrt(std::max(moments.yy, 0.0)); }

LassoStart lasso_init(const SemiparametricData& data, double lambda, double tol) {
    data.validate();
    require_positive(lambda, "lasso_init: lambda");
    const Matrix u = joint_design(data);
    LassoOptions opts;
    opts.tol = tol;
    LassoSolution sol = solve_lasso(LassoProblem{u, data.y, lambda}, opts);
    if (!sol.converged)
        throw NonConverged("lasso_init: joint Lasso did not converge", sol.kkt_violation);
    LassoStart start;
    start.theta0.assign(sol.coef.begin(), sol.coef.begin() + static_cast<std::ptrdiff_t>(data.d()));
    start.gamma0.assign(sol.coef.begin() + static_cast<std::ptrdiff_t>(data.d()), sol.coef.end());
    return start;
}

Vector theta_update(const SemiparametricData& data, const AlphaMatrix& alpha,
                    std::span<const double> gamma) {
    data.validate();
    if (gamma.size() != data.p()) throw DimensionMismatch("theta_update: gamma must have length p");
    if (alpha.xtilde.rows() != data.n() || alpha.xtilde.cols() != data.d())
        throw DimensionMismatch("theta_update: residual matrix must be n×d");
    const Matrix a = crossprod(alpha.xtilde, data.x);
    Vector resid = data.y;
    for (std::size_t k = 0; k < data.p(); ++k)
        if (gamma[k] != 0.0) kernels::axpy(-gamma[k], data.z.col(k), resid);
    const Vector rhs = tmatvec(alpha.xtilde, resid);
    const Matrix sol = solve(a, Matrix::column_vector(rhs));
    return Vector(sol.col(0).begin(), sol.col(0).end());
}

Vector theta_update(const BlockMoments& moments, const Matrix& alpha, std::span<const double> gamma) {
    if (gamma.size() != moments.zz.rows())
        throw DimensionMismatch("theta_update: gamma must have length p");
    return solve_theta(theta_system(moments, alpha), gamma);
}

Vector gamma_update(const SemiparametricData& data, std::span<const double> theta, double lambda_t,
                    double tol) {
    data.validate();
    require_positive(lambda_t, "gamma_update: lambda_t");
    if (theta.size() != data.d()) throw DimensionMismatch("gamma_update: theta must have length d");
    Vector resid = data.y;
    for (std::size_t j = 0; j < data.d(); ++j)
        if (theta[j] != 0.0) kernels::axpy(-theta[j], data.x.col(j), resid);
    LassoOptions opts;
    opts.tol = tol;
    LassoSolution sol = solve_lasso(LassoProblem{data.z, resid, lambda_t}, opts);
    if (!sol.converged)
        throw NonConverged("gamma_update: Lasso did not converge", sol.kkt_violation);
    return std::move(sol.coef);
}

LassoSolution gamma_update(const BlockMoments& m, std::span<const double> theta, double lambda_t,
                           std::span<const double> warm, double tol) {
    require_positive(lambda_t, "gamma_update: lambda_t");
    const std::size_t d = m.xx.rows();
    if (theta.size() != d) throw DimensionMismatch("gamma_update: theta must have length d");
    // Sufficient statistics of the residual response Y − Xθ.
    Vector c = m.zy;
    double rr = m.yy;
    for (std::size_t j = 0; j < d; ++j) {
        if (theta[j] == 0.0) continue;
        kernels::axpy(-theta[j], m.zx.col(j), c);
        rr -= 2.0 * theta[j] * m.xy[j];
        for (std::size_t i = 0; i < d; ++i) rr += theta[j] * m.xx(j, i) * theta[i];
    }
    LassoOptions opts;
    opts.tol = tol;
    return solve_lasso_covariance(CovarianceProblem{m.zz, c, rr, lambda_t, warm}, opts);
}

double lambda_schedule(double lambda_base, double c, std::size_t t,
                       std::span<const Vector> gamma_hist) {
    if (t < 1) throw ConfigError("lambda_schedule: t must be at least 1");
    if (t == 1) {
        if (gamma_hist.empty()) throw ConfigError("lambda_schedule: t = 1 needs the initial gamma");
        return lambda_base * (1.0 + c * norm1(gamma_hist.back()));
    }
    if (gamma_hist.size() < 2) throw ConfigError("lambda_schedule: t >= 2 needs two previous iterates");
    const Vector& last = gamma_hist[gamma_hist.size() - 1];
    const Vector& before = gamma_hist[gamma_hist.size() - 2];
    if (last.size() != before.size()) throw DimensionMismatch("lambda_schedule: iterate lengths differ");
    return lambda_base * (1.0 + c * l1_distance(last, before));
}

double theta_equation_residual(const BlockMoments& moments, const Matrix& alpha,
                               std::span<const double> theta, std::span<const double> gamma) {
    return theta_residual(theta_system(moments, alpha), theta, gamma);
}

ClassoEstimate classo_iterate(const IterationInputs& in, const ClassoConfig& cfg) {
    cfg.validate();
    const BlockMoments& m = in.moments;
    const std::size_t p = m.zz.rows();
    if (in.start.gamma0.size() != p || in.start.theta0.size() != m.xx.rows())
        throw DimensionMismatch("classo_iterate: start has wrong dimensions");
    require_positive(in.lambda, "classo_iterate: lambda");

    const ThetaSystem sys = theta_system(m, in.alpha.alpha);
    const double scale = response_scale(m);

    ClassoEstimate est;
    est.sigma_hat = in.sigma_hat;
    est.lambda = in.lambda;
    est.alpha = in.alpha;
    est.start = in.start;

    // hist = {γ^{t−2}, γ^{t−1}} (just {γ⁰} before the first update).
    std::vector<Vector> hist{in.start.gamma0};
    Vector theta = in.start.theta0;
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const Vector& gamma = hist.back();
        double lambda_t = lambda_schedule(in.lambda, cfg.schedule_c, t, hist);
        if (cfg.lambda_cap) lambda_t = std::min(lambda_t, *cfg.lambda_cap * in.lambda);

        theta = solve_theta(sys, gamma);
        LassoSolution sol = gamma_update(m, theta, lambda_t, gamma, cfg.inner_tol);
        if (!sol.converged) {
            std::ostringstream os;
            os << "classo: gamma update at iteration " << t << " did not converge";
            throw NonConverged(os.str(), sol.kkt_violation);
        }
        const double step = l1_distance(sol.coef, gamma);
        if (hist.size() == 2) hist.erase(hist.begin());
        hist.push_back(std::move(sol.coef));
        const Vector& next = hist.back();

        est.iterations = t;
        est.lambda_last = lambda_t;
        est.fixed_point.r_a = theta_residual(sys, theta, next);
        est.fixed_point.r_b = sol.kkt_violation;
        const double gamma_l1 = norm1(next);
        if (cfg.record_trace) est.trace.push_back({t, theta, next, step, lambda_t, gamma_l1});

        if (est.fixed_point.r_a <= 1e-8 * scale && est.fixed_point.r_b <= cfg.inner_tol &&
            step <= 1e-6 * (1.0 + gamma_l1)) {
            est.status = FitStatus::converged;
            break;
        }
    }
    est.theta = std::move(theta);
    est.gamma = std::move(hist.back());
    est.omega = omega_hat(in.alpha.xtilde, in.sigma_hat);
    return est;
}

ClassoEstimate classo_fit(const SemiparametricData& data, const ClassoConfig& cfg) {
    data.validate();
    cfg.validate();
    const BlockMoments m = compute_moments(data);
    const Matrix u = joint_design(data);

    ScaledLassoOptions sopts;
    sopts.inner.tol = cfg.inner_tol;
    const double sigma_hat = cfg.sigma_hat ? *cfg.sigma_hat : scaled_lasso(u, data.y, sopts).sigma_hat;
    const double lambda =
        cfg.lambda_base ? *cfg.lambda_base : sigma_hat * universal_penalty(data.n(), u.cols());

    AlphaMatrix alpha;
    if (cfg.alpha_zero) {
        alpha = zero_alpha(data.x, m);
    } else {
        const Vector lambdas = resolve_nodewise_lambdas(data, m, sigma_hat, cfg.nodewise_lambdas,
                                                        cfg.nodewise_penalty, cfg.inner_tol);
        alpha = fit_alpha(data.x, data.z, m, lambdas, cfg.inner_tol);
    }
    const LassoStart start = lasso_init(data, lambda, cfg.inner_tol);
    return classo_iterate(IterationInputs{m, alpha, sigma_hat, lambda, start}, cfg);
}

ClassoEstimate up_lasso_fit(const SemiparametricData& data, double lambda, const ClassoConfig& cfg) {
    ClassoConfig up = cfg;
    up.alpha_zero = true;
    up.lambda_base = lambda;
    return classo_fit(data, up);
}

DesparsifiedEstimate desparsified_from(const BlockMoments& m, const AlphaMatrix& alpha,
                                       const LassoStart& start, double tau_penalty_factor) {
    if (m.xx.rows() != 1) throw ConfigError("de-sparsified estimate is defined for d = 1 only");
    if (!(tau_penalty_factor >= 0.0) || !std::isfinite(tau_penalty_factor))
        throw ConfigError("tau_penalty_factor must be finite and non-negative");
    const ThetaSystem sys = theta_system(m, alpha.alpha);
    const double theta0 = start.theta0.at(0);
    const double correction = theta_rhs(sys, start.gamma0)[0] - sys.a(0, 0) * theta0;

    DesparsifiedEstimate est;
    est.n = m.n;
    est.xtilde_sq = kernels::sum_squares(alpha.xtilde.col(0)) / static_cast<double>(m.n);
    est.tau_hat_sq = est.xtilde_sq + tau_penalty_factor * alpha.lambdas.at(0) * norm1(alpha.alpha.col(0));
    est.tau_tilde_sq = sys.a(0, 0);
    if (!(est.tau_tilde_sq > 0.0) || !(est.tau_hat_sq > 0.0))
        throw SingularSystem("de-sparsified estimate: n⁻¹X̃ᵀX is not positive", 0.0);
    est.b1 = theta0 + correction / est.tau_hat_sq;
    est.theta1_first_iterate = theta0 + correction / est.tau_tilde_sq;
    return est;
}

DesparsifiedEstimate desparsified_estimate(const SemiparametricData& data, double lambda,
                                           const DesparsifiedOptions& options) {
    data.validate();
    if (data.d() != 1) throw ConfigError("de-sparsified estimate is defined for d = 1 only");
    const BlockMoments m = compute_moments(data);
    AlphaMatrix alpha;
    if (options.alpha_zero) {
        alpha = zero_alpha(data.x, m);
    } else {
        std::optional<Vector> explicit_lambdas;
        if (options.nodewise_lambda) explicit_lambdas = Vector{*options.nodewise_lambda};
        double sigma_hat = 0.0;
        if (!explicit_lambdas && options.nodewise_penalty == NodewisePenalty::response_sigma) {
            ScaledLassoOptions sopts;
            sopts.inner.tol = options.tol;
            sigma_hat = options.sigma_hat ? *options.sigma_hat
                                          : scaled_lasso(joint_design(data), data.y, sopts).sigma_hat;
        }
        const Vector lambdas = resolve_nodewise_lambdas(data, m, sigma_hat, explicit_lambdas,
                                                        options.nodewise_penalty, options.tol);
        alpha = fit_alpha(data.x, data.z, m, lambdas, options.tol);
    }
    return desparsified_from(m, alpha, lasso_init(data, lambda, options.tol), options.tau_penalty_factor);
}

}  // namespace classo
