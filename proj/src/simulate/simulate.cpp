#include "classo/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <string>
#include <thread>

#include "classo/error.hpp"
#include "classo/inference.hpp"
#include "classo/kernels.hpp"
#include "classo/lasso.hpp"
#include "classo/linalg.hpp"
#include "classo/nodewise.hpp"

namespace classo {

std::string_view design_name(DesignKind kind) noexcept {
    switch (kind) {
        case DesignKind::toeplitz: return "toeplitz";
        case DesignKind::equicorr: return "equicorr";
        case DesignKind::identity: return "identity";
    }
    return "toeplitz";
}

DesignKind parse_design(std::string_view name) {
    if (name == "toeplitz") return DesignKind::toeplitz;
    if (name == "equicorr") return DesignKind::equicorr;
    if (name == "identity") return DesignKind::identity;
    throw ConfigError("unknown design '" + std::string(name) + "' (toeplitz, equicorr, identity)");
}

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::classo: return "classo";
        case Method::up_lasso: return "up_lasso";
        case Method::ds_lasso: return "ds_lasso";
    }
    return "classo";
}

Method parse_method(std::string_view name) {
    if (name == "classo") return Method::classo;
    if (name == "up_lasso") return Method::up_lasso;
    if (name == "ds_lasso") return Method::ds_lasso;
    throw ConfigError("unknown method '" + std::string(name) + "' (classo, up_lasso, ds_lasso)");
}

Matrix make_sigma(const DesignSpec& spec) {
    const std::size_t p = spec.p;
    if (p == 0) throw ConfigError("design: p must be at least 1");
    Matrix s = Matrix::identity(p);
    switch (spec.kind) {
        case DesignKind::identity: break;
        case DesignKind::toeplitz:
            if (!(std::abs(spec.rho) < 1.0)) throw ConfigError("toeplitz design needs |rho| < 1");
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t k = 0; k < p; ++k)
                    s(j, k) = std::pow(spec.rho, static_cast<double>(j > k ? j - k : k - j));
            break;
        case DesignKind::equicorr:
            if (!(spec.rho >= 0.0 && spec.rho < 1.0))
                throw ConfigError("equicorrelated design needs 0 <= rho < 1");
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t k = 0; k < p; ++k)
                    if (j != k) s(j, k) = spec.rho;
            break;
    }
    return s;
}

Vector default_beta_star(std::size_t p) {
    if (p < 5) throw ConfigError("default truth needs p >= 5");
    Vector b(p, 0.0);
    const double head[] = {2.0, -1.0, -2.0, 3.0, 1.0};
    std::copy(std::begin(head), std::end(head), b.begin());
    return b;
}

RandomStream::RandomStream(std::uint64_t base_seed, std::uint64_t rep_index, std::uint64_t purpose) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(base_seed), hi(base_seed), lo(rep_index), hi(rep_index), lo(purpose), hi(purpose)};
    engine_.seed(seq);
}

double RandomStream::uniform() {
    // 53 random bits mapped to the open interval (0, 1).
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

Vector SimSpec::truth() const { return beta_star.empty() ? default_beta_star(p()) : beta_star; }

void SimSpec::validate() const {
    if (n < 2) throw ConfigError("simulate: n must be at least 2");
    if (p() < 2) throw ConfigError("simulate: p must be at least 2");
    if (!beta_star.empty() && beta_star.size() != p())
        throw ConfigError("simulate: beta_star must have length p");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("simulate: sigma must be >= 0");
    if (reps < 1) throw ConfigError("simulate: reps must be at least 1");
    if (targets.empty()) throw ConfigError("simulate: need at least one target");
    for (std::size_t t : targets)
        if (t < 1 || t > p()) throw ConfigError("simulate: targets must lie in 1..p");
    if (methods.empty()) throw ConfigError("simulate: need at least one method");
    if (!(ci_alpha > 0.0 && ci_alpha < 1.0)) throw ConfigError("simulate: ci_alpha must lie in (0, 1)");
    if (!(fwer_alpha > 0.0 && fwer_alpha < 1.0))
        throw ConfigError("simulate: fwer_alpha must lie in (0, 1)");
    if (iterations < 1) throw ConfigError("simulate: iterations must be at least 1");
    make_sigma(design);
    truth();
}

SampledInstance sample_instance(const SimSpec& spec, std::size_t rep_index) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t p = spec.p();
    const CholeskyFactor chol = cholesky(make_sigma(spec.design));

    // Rows x_i = L g_i with g_i ~ N(0, I): column j of X is Σ_{k≤j} L_jk G_k.
    RandomStream design_rng(spec.base_seed, rep_index, static_cast<std::uint64_t>(StreamPurpose::design));
    Matrix g(n, p);
    for (std::size_t k = 0; k < p; ++k)
        for (double& v : g.col(k)) v = design_rng.normal();
    SampledInstance out;
    out.u = Matrix(n, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k <= j; ++k) {
            const double l = chol.lower(j, k);
            if (l != 0.0) kernels::axpy(l, g.col(k), out.u.col(j));
        }

    out.beta_star = spec.truth();
    out.y = matvec(out.u, out.beta_star);
    RandomStream noise_rng(spec.base_seed, rep_index, static_cast<std::uint64_t>(StreamPurpose::noise));
    if (spec.sigma > 0.0)
        for (double& v : out.y) v += spec.sigma * noise_rng.normal();

    for (std::size_t t : spec.targets) out.per_target.push_back(split_target(out.u, out.y, t - 1));
    return out;
}

namespace {

// Shared per-replicate quantities computed once on the full design.
struct ReplicateContext {
    const SimSpec& spec;
    const SampledInstance& inst;
    Matrix gram;  // n⁻¹UᵀU
    Vector uy;    // n⁻¹UᵀY
    double yy = 0.0;
    double sigma_hat = 0.0;
    double lambda = 0.0;
    Vector start;  // joint Lasso at lambda
};

struct CoordinateFit {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Fits every requested method for coordinate j (0-based).
std::vector<std::optional<CoordinateFit>> fit_coordinate(const ReplicateContext& ctx, std::size_t j,
                                                         std::vector<std::string>& errors) {
    const SimSpec& spec = ctx.spec;
    const std::size_t n = spec.n;
    const BlockMoments m = split_moments(ctx.gram, ctx.uy, ctx.yy, n, j);
    const SemiparametricData data = split_target(ctx.inst.u, ctx.inst.y, j);

    LassoStart start;
    start.theta0 = {ctx.start[j]};
    start.gamma0.reserve(ctx.start.size() - 1);
    for (std::size_t k = 0; k < ctx.start.size(); ++k)
        if (k != j) start.gamma0.push_back(ctx.start[k]);

    ClassoConfig cfg;
    cfg.iterations = spec.iterations;
    cfg.schedule_c = spec.schedule_c;

    const bool needs_alpha = std::ranges::any_of(spec.methods, [](Method mm) { return mm != Method::up_lasso; });
    std::optional<AlphaMatrix> alpha;
    std::string alpha_error;
    if (needs_alpha) {
        try {
            Vector lambdas;
            if (spec.nodewise_penalty == NodewisePenalty::response_sigma) {
                lambdas = default_lambdas(data.x, data.z, ctx.sigma_hat);
            } else {
                const Vector sig = nodewise_sigmas(data.x, m);
                lambdas = {sig[0] * universal_penalty(n, data.p())};
            }
            alpha = fit_alpha(data.x, data.z, m, lambdas);
        } catch (const Error& e) {
            alpha_error = e.what();
        }
    }

    std::vector<std::optional<CoordinateFit>> out(spec.methods.size());
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        const Method method = spec.methods[mi];
        try {
            if (method == Method::up_lasso) {
                const AlphaMatrix zero = zero_alpha(data.x, m);
                const ClassoEstimate est =
                    classo_iterate(IterationInputs{m, zero, ctx.sigma_hat, ctx.lambda, start}, cfg);
                const double norm = norm2(data.x.col(0));
                out[mi] = CoordinateFit{est.theta[0], ctx.sigma_hat / norm};
                continue;
            }
            if (!alpha) throw ConfigError(alpha_error);
            if (method == Method::classo) {
                const ClassoEstimate est =
                    classo_iterate(IterationInputs{m, *alpha, ctx.sigma_hat, ctx.lambda, start}, cfg);
                const double norm = norm2(alpha->xtilde.col(0));
                if (!(norm > 1e-12)) throw DegenerateResidual("node-wise residual vanished");
                out[mi] = CoordinateFit{est.theta[0], ctx.sigma_hat / norm};
            } else {
                const DesparsifiedEstimate ds = desparsified_from(m, *alpha, start, spec.ds_tau_penalty_factor);
                const double se = ctx.sigma_hat * std::sqrt(ds.xtilde_sq) /
                                  (std::sqrt(static_cast<double>(n)) * ds.tau_hat_sq);
                out[mi] = CoordinateFit{ds.b1, se};
            }
        } catch (const Error& e) {
            errors[mi] = std::string(method_name(method)) + ": " + e.what();
        }
    }
    return out;
}

}  // namespace

ReplicateResult run_replicate(const SimSpec& spec, std::size_t rep_index) {
    const SampledInstance inst = sample_instance(spec, rep_index);
    const std::size_t n = spec.n;
    const std::size_t p = spec.p();
    const double inv_n = 1.0 / static_cast<double>(n);

    ReplicateResult result;
    result.rep = rep_index;
    result.methods.resize(spec.methods.size());
    for (auto& mr : result.methods) {
        mr.targets.resize(spec.targets.size());
        if (spec.multiple_testing) mr.all_p_values.assign(p, 1.0);
    }
    auto fail_all = [&](const std::string& why) {
        for (auto& mr : result.methods) {
            mr.failed = true;
            mr.failure = why;
        }
        return result;
    };

    ReplicateContext ctx{spec, inst, scaled_gram(inst.u), tmatvec(inst.u, inst.y), 0.0, 0.0, 0.0, {}};
    kernels::scale(inv_n, ctx.uy);
    ctx.yy = kernels::sum_squares(inst.y) * inv_n;
    try {
        ctx.sigma_hat = scaled_lasso_covariance(ctx.gram, ctx.uy, ctx.yy, n, sigma_floor(inst.y)).sigma_hat;
        ctx.lambda = ctx.sigma_hat * universal_penalty(n, p);
        const LassoSolution init = solve_lasso_covariance(CovarianceProblem{ctx.gram, ctx.uy, ctx.yy, ctx.lambda});
        if (!init.converged) throw NonConverged("joint Lasso did not converge", init.kkt_violation);
        ctx.start = init.coef;
    } catch (const Error& e) {
        return fail_all(e.what());
    }
    result.sigma_hat = ctx.sigma_hat;

    std::set<std::size_t> coords;
    for (std::size_t t : spec.targets) coords.insert(t - 1);
    if (spec.multiple_testing)
        for (std::size_t j = 0; j < p; ++j) coords.insert(j);

    std::vector<std::string> errors(spec.methods.size());
    for (std::size_t j : coords) {
        const auto fits = fit_coordinate(ctx, j, errors);
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            MethodReplicate& mr = result.methods[mi];
            if (!fits[mi]) {
                mr.failed = true;
                mr.failure = errors[mi];
                continue;
            }
            const CoordinateFit& f = *fits[mi];
            const double pv = f.std_error > 0.0 ? normal_p_value(f.estimate, f.std_error)
                                                : (f.estimate == 0.0 ? 1.0 : 0.0);
            if (spec.multiple_testing) mr.all_p_values[j] = pv;
            for (std::size_t ti = 0; ti < spec.targets.size(); ++ti) {
                if (spec.targets[ti] - 1 != j) continue;
                const Interval ci = normal_interval(f.estimate, f.std_error, spec.ci_alpha);
                const double truth = inst.beta_star[j];
                TargetResult& tr = mr.targets[ti];
                tr.estimate = f.estimate;
                tr.ci_lower = ci.lower;
                tr.ci_upper = ci.upper;
                tr.p_value = pv;
                tr.covered = ci.contains(truth);
                tr.sq_error = (f.estimate - truth) * (f.estimate - truth);
            }
        }
    }

    if (spec.multiple_testing) {
        std::size_t nonnull = 0;
        for (double b : inst.beta_star) nonnull += b != 0.0;
        for (MethodReplicate& mr : result.methods) {
            if (mr.failed) continue;
            const HolmOutcome h = holm(mr.all_p_values, spec.fwer_alpha);
            std::size_t hits = 0;
            for (std::size_t idx : h.rejected_indices) {
                if (inst.beta_star[idx] != 0.0) ++hits;
                else mr.family_error = true;
            }
            mr.power = nonnull ? static_cast<double>(hits) / static_cast<double>(nonnull) : 0.0;
        }
    }
    return result;
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("CLASSO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const MethodSummary& SimReport::summary(Method m) const {
    for (const auto& s : methods)
        if (s.method == m) return s;
    throw ConfigError("report has no results for method " + std::string(method_name(m)));
}

SimReport run_replicates(const SimSpec& spec) {
    spec.validate();
    SimReport report;
    report.spec = spec;
    report.degenerate = spec.sigma == 0.0;
    report.replicates.resize(spec.reps);

    const std::size_t workers = std::min(spec.reps, spec.threads ? spec.threads : default_thread_count());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next++; r < spec.reps; r = next++) report.replicates[r] = run_replicate(spec, r);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    const Vector truth = spec.truth();
    double sigma_sum = 0.0;
    std::size_t sigma_count = 0;
    for (const auto& rr : report.replicates)
        if (rr.sigma_hat > 0.0) {
            sigma_sum += rr.sigma_hat;
            ++sigma_count;
        }
    report.mean_sigma_hat = sigma_count ? sigma_sum / static_cast<double>(sigma_count) : 0.0;

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        MethodSummary ms;
        ms.method = spec.methods[mi];
        double power_sum = 0.0;
        std::size_t fwer_events = 0;
        std::size_t ok = 0;
        for (const auto& rr : report.replicates) {
            const MethodReplicate& mr = rr.methods[mi];
            if (mr.failed) {
                ++ms.failures;
                continue;
            }
            ++ok;
            power_sum += mr.power;
            fwer_events += mr.family_error;
        }
        if (spec.multiple_testing && ok > 0) {
            ms.power = power_sum / static_cast<double>(ok);
            ms.fwer = static_cast<double>(fwer_events) / static_cast<double>(ok);
        }
        for (std::size_t ti = 0; ti < spec.targets.size(); ++ti) {
            TargetSummary ts;
            ts.target = spec.targets[ti];
            ts.truth = truth[ts.target - 1];
            std::size_t covered = 0;
            double sq = 0.0;
            double len = 0.0;
            for (const auto& rr : report.replicates) {
                const MethodReplicate& mr = rr.methods[mi];
                if (mr.failed) continue;
                const TargetResult& tr = mr.targets[ti];
                covered += tr.covered;
                sq += tr.sq_error;
                len += tr.ci_upper - tr.ci_lower;
                ++ts.count;
            }
            if (ts.count > 0) {
                const double c = static_cast<double>(ts.count);
                if (!report.degenerate) ts.coverage = static_cast<double>(covered) / c;
                ts.rmse = std::sqrt(sq / c);
                ts.mean_ci_length = len / c;
            }
            ms.targets.push_back(ts);
        }
        if (static_cast<double>(ms.failures) > report.max_failure_rate * static_cast<double>(spec.reps))
            report.valid = false;
        report.methods.push_back(std::move(ms));
    }
    return report;
}

}  // namespace classo
