#include "classo/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "classo/error.hpp"
#include "classo/kernels.hpp"

namespace classo {

namespace {

// Covariance form: keeps gb = Gβ so that g_j = c_j − (Gβ)_j.
class GramState {
public:
    GramState(const Matrix& gram, std::span<const double> xty, double yty, std::span<const double> beta)
        : gram_(gram), xty_(xty), yty_(yty), gb_(gram.rows(), 0.0) {
        for (std::size_t j = 0; j < beta.size(); ++j)
            if (beta[j] != 0.0) kernels::axpy(beta[j], gram.col(j), gb_);
    }

    double diag(std::size_t j) const { return gram_(j, j); }
    double cross(std::size_t j, std::size_t k) const { return gram_(j, k); }
    double gradient(std::size_t j) const { return xty_[j] - gb_[j]; }
    void update(std::size_t j, double delta) { kernels::axpy(delta, gram_.col(j), gb_); }

    void gradients(Vector& g) const {
        g.resize(gb_.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = xty_[j] - gb_[j];
    }

    double objective(std::span<const double> beta, double lambda) const {
        double lin = 0.0;
        double quad = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j)
            if (beta[j] != 0.0) {
                lin += beta[j] * xty_[j];
                quad += beta[j] * gb_[j];
            }
        return 0.5 * std::max(yty_ - 2.0 * lin + quad, 0.0) + lambda * norm1(beta);
    }

private:
    const Matrix& gram_;
    std::span<const double> xty_;
    double yty_;
    Vector gb_;
};

// Residual form: keeps r = y − Xβ so that g_j = n⁻¹X_jᵀr.
class ResidualState {
public:
    ResidualState(const Matrix& x, std::span<const double> y, std::span<const double> beta)
        : x_(x), r_(y.begin(), y.end()), diag_(x.cols()), inv_n_(1.0 / static_cast<double>(x.rows())) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            diag_[j] = kernels::sum_squares(x.col(j)) * inv_n_;
            if (beta[j] != 0.0) kernels::axpy(-beta[j], x.col(j), r_);
        }
    }

    double diag(std::size_t j) const { return diag_[j]; }
    double cross(std::size_t j, std::size_t k) const {
        return j == k ? diag_[j] : kernels::dot(x_.col(j), x_.col(k)) * inv_n_;
    }
    double gradient(std::size_t j) const { return kernels::dot(x_.col(j), r_) * inv_n_; }
    void update(std::size_t j, double delta) { kernels::axpy(-delta, x_.col(j), r_); }

    void gradients(Vector& g) const {
        g.resize(x_.cols());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = gradient(j);
    }

    double objective(std::span<const double> beta, double lambda) const {
        return 0.5 * kernels::sum_squares(r_) * inv_n_ + lambda * norm1(beta);
    }

private:
    const Matrix& x_;
    Vector r_;
    Vector diag_;
    double inv_n_;
};

std::vector<std::size_t> resolve_order(const LassoOptions& options, std::size_t m) {
    if (options.order.empty()) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        return order;
    }
    if (options.order.size() != m) throw DimensionMismatch("lasso: order has wrong length");
    std::vector<bool> seen(m, false);
    for (std::size_t j : options.order) {
        if (j >= m || seen[j]) throw ConfigError("lasso: order is not a permutation");
        seen[j] = true;
    }
    return options.order;
}

Vector initial_coef(std::span<const double> warm, std::size_t m) {
    if (warm.empty()) return Vector(m, 0.0);
    if (warm.size() != m) throw DimensionMismatch("lasso: warm start has wrong length");
    return Vector(warm.begin(), warm.end());
}

template <class State>
double kkt_at(const State& state, std::span<const double> beta, double lambda, Vector& g) {
    state.gradients(g);
    return kkt_residual_from_gradient(g, beta, lambda);
}

template <class State>
bool coordinate_step(State& state, Vector& beta, std::size_t j, double lambda) {
    const double d = state.diag(j);
    if (!(d > 0.0)) {
        // Zero column: the coefficient does not enter the fit.
        if (beta[j] == 0.0) return false;
        state.update(j, -beta[j]);
        beta[j] = 0.0;
        return true;
    }
    const double z = state.gradient(j) + d * beta[j];
    const double next = soft_threshold(z, lambda) / d;
    if (next == beta[j]) return false;
    state.update(j, next - beta[j]);
    beta[j] = next;
    return true;
}

// Solves the stationarity system on the current support with its signs held
// fixed: G_AA δ = g_A − λ s_A. The step is taken only if no coefficient
// changes sign or reaches zero, in which case it lands on the exact minimizer
// of the objective over that orthant face.
template <class State>
bool newton_step(State& state, Vector& beta, std::span<const std::size_t> support, double lambda) {
    const std::size_t k = support.size();
    if (k == 0) return false;
    Vector l(k * k, 0.0);  // row-major lower Cholesky factor of G_AA
    Vector rhs(k);
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t j = support[a];
        rhs[a] = state.gradient(j) - std::copysign(lambda, beta[j]);
        for (std::size_t b = 0; b <= a; ++b) {
            double v = state.cross(j, support[b]);
            for (std::size_t c = 0; c < b; ++c) v -= l[a * k + c] * l[b * k + c];
            if (a == b) {
                if (!(v > 1e-12 * std::max(1.0, state.diag(j)))) return false;
                l[a * k + a] = std::sqrt(v);
            } else {
                l[a * k + b] = v / l[b * k + b];
            }
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = 0; c < a; ++c) rhs[a] -= l[a * k + c] * rhs[c];
        rhs[a] /= l[a * k + a];
    }
    for (std::size_t a = k; a-- > 0;) {
        for (std::size_t c = a + 1; c < k; ++c) rhs[a] -= l[c * k + a] * rhs[c];
        rhs[a] /= l[a * k + a];
    }
    for (std::size_t a = 0; a < k; ++a) {
        const double next = beta[support[a]] + rhs[a];
        if (!(next * beta[support[a]] > 0.0)) return false;
    }
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t j = support[a];
        const double next = beta[j] + rhs[a];
        if (next == beta[j]) continue;
        state.update(j, next - beta[j]);
        beta[j] = next;
    }
    return true;
}

template <class State>
LassoSolution run_descent(State& state, Vector beta, double lambda, const LassoOptions& options) {
    if (!(options.tol > 0.0)) throw ConfigError("lasso: tol must be positive");
    if (options.max_sweeps < 1) throw ConfigError("lasso: max_sweeps must be at least 1");
    const std::vector<std::size_t> order = resolve_order(options, beta.size());

    LassoSolution sol;
    Vector g;
    std::vector<std::size_t> active;
    std::vector<std::size_t> support;
    auto record = [&] {
        if (options.record_objective) sol.objective_trace.push_back(state.objective(beta, lambda));
    };

    for (;;) {
        sol.kkt_violation = kkt_at(state, beta, lambda, g);
        if (sol.kkt_violation <= options.tol) {
            sol.converged = true;
            break;
        }
        if (sol.sweeps >= options.max_sweeps) break;

        for (std::size_t j : order) coordinate_step(state, beta, j, lambda);
        ++sol.sweeps;
        record();

        // Cycle over the active set until it is internally stationary.
        active.clear();
        for (std::size_t j : order)
            if (beta[j] != 0.0) active.push_back(j);
        for (std::size_t pass = 0; !active.empty() && sol.sweeps < options.max_sweeps; ++pass) {
            // Once the support has settled, try to finish it off exactly.
            if (pass % 8 == 4) {
                support.clear();
                for (std::size_t j : active)
                    if (beta[j] != 0.0) support.push_back(j);
                if (newton_step(state, beta, support, lambda)) {
                    ++sol.sweeps;
                    record();
                }
            }
            double worst = 0.0;
            for (std::size_t j : active) {
                const double gj = state.gradient(j);
                worst = std::max(worst, beta[j] != 0.0
                                            ? std::abs(gj - std::copysign(lambda, beta[j]))
                                            : std::max(std::abs(gj) - lambda, 0.0));
            }
            if (worst <= 0.5 * options.tol) break;
            bool changed = false;
            for (std::size_t j : active) changed |= coordinate_step(state, beta, j, lambda);
            ++sol.sweeps;
            record();
            if (!changed) break;
        }
    }

    sol.objective = state.objective(beta, lambda);
    sol.coef = std::move(beta);
    return sol;
}

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ConfigError("lasso: lambda must be finite and non-negative");
}

}  // namespace

double kkt_residual_from_gradient(std::span<const double> gradient, std::span<const double> coef,
                                  double lambda) {
    if (gradient.size() != coef.size()) throw DimensionMismatch("kkt: gradient/coef lengths differ");
    double worst = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
        const double gj = gradient[j];
        const double v = coef[j] != 0.0 ? std::abs(gj - std::copysign(lambda, coef[j]))
                                        : std::max(std::abs(gj) - lambda, 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

double kkt_residual(const LassoProblem& problem, std::span<const double> coef) {
    const Matrix& x = problem.design;
    if (x.rows() != problem.response.size() || x.cols() != coef.size())
        throw DimensionMismatch("kkt_residual: dimensions do not match");
    Vector r(problem.response.begin(), problem.response.end());
    for (std::size_t j = 0; j < coef.size(); ++j)
        if (coef[j] != 0.0) kernels::axpy(-coef[j], x.col(j), r);
    Vector g = tmatvec(x, r);
    kernels::scale(1.0 / static_cast<double>(x.rows()), g);
    return kkt_residual_from_gradient(g, coef, problem.lambda);
}

double lasso_objective(const LassoProblem& problem, std::span<const double> coef) {
    const Matrix& x = problem.design;
    if (x.rows() != problem.response.size() || x.cols() != coef.size())
        throw DimensionMismatch("lasso_objective: dimensions do not match");
    Vector r(problem.response.begin(), problem.response.end());
    for (std::size_t j = 0; j < coef.size(); ++j)
        if (coef[j] != 0.0) kernels::axpy(-coef[j], x.col(j), r);
    return 0.5 * kernels::sum_squares(r) / static_cast<double>(x.rows()) +
           problem.lambda * norm1(coef);
}

LassoSolution solve_lasso(const LassoProblem& problem, const LassoOptions& options) {
    const Matrix& x = problem.design;
    if (x.empty()) throw DimensionMismatch("solve_lasso: empty design");
    if (x.rows() != problem.response.size())
        throw DimensionMismatch("solve_lasso: design rows differ from response length");
    check_lambda(problem.lambda);
    const std::size_t m = x.cols();
    Vector beta = initial_coef(problem.warm_start ? std::span<const double>(*problem.warm_start)
                                                  : std::span<const double>{},
                               m);

    LassoSolution sol;
    if (m <= x.rows()) {
        const Matrix gram = scaled_gram(x);
        Vector xty = tmatvec(x, problem.response);
        kernels::scale(1.0 / static_cast<double>(x.rows()), xty);
        const double yty = kernels::sum_squares(problem.response) / static_cast<double>(x.rows());
        GramState state(gram, xty, yty, beta);
        sol = run_descent(state, std::move(beta), problem.lambda, options);
    } else {
        ResidualState state(x, problem.response, beta);
        sol = run_descent(state, std::move(beta), problem.lambda, options);
    }
    sol.objective = lasso_objective(problem, sol.coef);
    sol.kkt_violation = kkt_residual(problem, sol.coef);
    return sol;
}

LassoSolution solve_lasso_covariance(const CovarianceProblem& problem, const LassoOptions& options) {
    const Matrix& g = problem.gram;
    if (g.rows() != g.cols() || g.rows() != problem.xty.size())
        throw DimensionMismatch("solve_lasso_covariance: gram/xty dimensions differ");
    check_lambda(problem.lambda);
    GramState state(g, problem.xty, problem.yty, initial_coef(problem.warm_start, g.cols()));
    return run_descent(state, initial_coef(problem.warm_start, g.cols()), problem.lambda, options);
}

double mean_squared_residual(const CovarianceProblem& problem, std::span<const double> coef) {
    const Matrix& g = problem.gram;
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
        if (coef[j] == 0.0) continue;
        lin += coef[j] * problem.xty[j];
        for (std::size_t k = 0; k < coef.size(); ++k)
            if (coef[k] != 0.0) quad += coef[j] * g(j, k) * coef[k];
    }
    return std::max(problem.yty - 2.0 * lin + quad, 0.0);
}

double universal_penalty(std::size_t n, std::size_t m) {
    return std::sqrt(2.0 * std::log(static_cast<double>(m)) / static_cast<double>(n));
}

double sigma_floor(std::span<const double> y) {
    if (y.size() < 2) return 1e-4;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(y.size() - 1));
    return 1e-4 * (sd > 0.0 ? sd : 1.0);
}

namespace {

// Alternates β ← argmin at λ = σλ̃ and σ ← max(√(n⁻¹‖y − Uβ‖²), floor).
// `solve(lambda, warm)` returns the Lasso solution; `msr(coef)` returns n⁻¹‖y − Uβ‖².
template <class Solve, class Msr>
ScaledLassoFit alternate(std::size_t m, std::size_t n, double initial_sigma, double floor,
                         const ScaledLassoOptions& options, Solve&& solve, Msr&& msr) {
    if (m < 2) throw ConfigError("scaled_lasso: needs at least two columns so that log m > 0");
    if (n < 2) throw ConfigError("scaled_lasso: needs at least two observations");
    if (!(floor > 0.0)) throw ConfigError("scaled_lasso: sigma floor must be positive");
    const double lam0 = universal_penalty(n, m);

    ScaledLassoFit fit;
    fit.coef.assign(m, 0.0);
    double sigma = std::max(initial_sigma, floor);
    for (std::size_t k = 1; k <= options.max_alternations; ++k) {
        const double lambda = sigma * lam0;
        LassoSolution sol = solve(lambda, fit.coef);
        if (!sol.converged)
            throw NonConverged("scaled_lasso: inner Lasso did not converge", sol.kkt_violation);
        fit.coef = std::move(sol.coef);
        const double next = std::max(std::sqrt(msr(fit.coef)), floor);
        fit.alternations = k;
        fit.lambda = lambda;
        fit.fixed_point_residual = std::abs(next - sigma) / sigma;
        sigma = next;
        if (fit.fixed_point_residual <= options.rel_tol) {
            fit.sigma_hat = sigma;
            return fit;
        }
    }
    std::ostringstream os;
    os << "scaled_lasso: no fixed point after " << options.max_alternations
       << " alternations (relative change " << fit.fixed_point_residual << ")";
    throw NonConverged(os.str(), fit.fixed_point_residual);
}

}  // namespace

ScaledLassoFit scaled_lasso_covariance(const Matrix& gram, std::span<const double> xty, double yty,
                                       std::size_t n, double floor,
                                       const ScaledLassoOptions& options) {
    auto solve = [&](double lambda, const Vector& warm) {
        return solve_lasso_covariance(CovarianceProblem{gram, xty, yty, lambda, warm}, options.inner);
    };
    auto msr = [&](const Vector& coef) {
        return mean_squared_residual(CovarianceProblem{gram, xty, yty, 0.0}, coef);
    };
    return alternate(gram.cols(), n, std::sqrt(std::max(yty, 0.0)), floor, options, solve, msr);
}

ScaledLassoFit scaled_lasso(const Matrix& design, std::span<const double> response,
                            const ScaledLassoOptions& options) {
    if (design.rows() != response.size())
        throw DimensionMismatch("scaled_lasso: design rows differ from response length");
    const double n = static_cast<double>(design.rows());
    if (design.cols() <= design.rows()) {
        const Matrix gram = scaled_gram(design);
        Vector xty = tmatvec(design, response);
        kernels::scale(1.0 / n, xty);
        const double yty = kernels::sum_squares(response) / n;
        return scaled_lasso_covariance(gram, xty, yty, design.rows(), sigma_floor(response),
                                       options);
    }
    auto solve = [&](double lambda, const Vector& warm) {
        return solve_lasso(LassoProblem{design, response, lambda, warm}, options.inner);
    };
    auto msr = [&](const Vector& coef) {
        Vector r(response.begin(), response.end());
        for (std::size_t j = 0; j < coef.size(); ++j)
            if (coef[j] != 0.0) kernels::axpy(-coef[j], design.col(j), r);
        return kernels::sum_squares(r) / n;
    };
    return alternate(design.cols(), design.rows(), norm2(response) / std::sqrt(n),
                     sigma_floor(response), options, solve, msr);
}

}  // namespace classo
