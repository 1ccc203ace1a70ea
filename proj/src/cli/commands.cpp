#include "classo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "classo/error.hpp"
#include "classo/inference.hpp"
#include "classo/lasso.hpp"

namespace classo::cli {

using nlohmann::json;

namespace {

std::string status_name(FitStatus s) { return s == FitStatus::converged ? "converged" : "nonconverged"; }

// Shared across targets: σ̂ from the scaled Lasso on all predictors and the
// base penalty λ (explicit, or σ̂ √(2 log m / n)).
struct Tuning {
    double sigma_hat = 0.0;
    double lambda = 0.0;
};

Tuning shared_tuning(const RegressionTable& table, const std::optional<double>& lambda) {
    if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda)))
        throw ConfigError("--lambda must be a finite non-negative number or 'auto'");
    Tuning t;
    t.sigma_hat = scaled_lasso(table.predictors, table.y).sigma_hat;
    t.lambda = lambda ? *lambda : t.sigma_hat * universal_penalty(table.y.size(), table.predictors.cols());
    return t;
}

ClassoConfig base_config(const Tuning& t, std::size_t iterations, double schedule_c, bool alpha_zero) {
    ClassoConfig cfg;
    cfg.sigma_hat = t.sigma_hat;
    cfg.lambda_base = t.lambda;
    cfg.iterations = iterations;
    cfg.schedule_c = schedule_c;
    cfg.alpha_zero = alpha_zero;
    cfg.validate();
    return cfg;
}

void check_targets(const std::vector<std::size_t>& targets, std::size_t p) {
    if (targets.empty()) throw ConfigError("--targets must name at least one predictor column");
    for (std::size_t t : targets)
        if (t < 1 || t > p)
            throw ConfigError("target " + std::to_string(t) + " is outside 1.." + std::to_string(p));
}

double checked_level(double level, const char* what) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError(std::string(what) + " must lie strictly between 0 and 1");
    return level;
}

json fit_one(const RegressionTable& table, std::size_t target, Method method, const Tuning& tuning,
             const FitOptions& options) {
    const SemiparametricData data = split_target(table.predictors, table.y, target - 1);
    const double alpha_level = 1.0 - options.level;
    json out;
    out["target"] = target;
    out["name"] = table.predictor_names[target - 1];
    out["method"] = std::string(method_name(method));
    out["sigma_hat"] = tuning.sigma_hat;
    out["lambda_used"] = tuning.lambda;

    if (method == Method::ds_lasso) {
        DesparsifiedOptions dopts;
        dopts.sigma_hat = tuning.sigma_hat;
        const DesparsifiedEstimate ds = desparsified_estimate(data, tuning.lambda, dopts);
        const double se = tuning.sigma_hat * std::sqrt(ds.xtilde_sq / static_cast<double>(ds.n)) / ds.tau_hat_sq;
        const Interval ci = normal_interval(ds.b1, se, alpha_level);
        out["estimate"] = ds.b1;
        out["std_error"] = se;
        out["ci"] = {ci.lower, ci.upper};
        out["p_value"] = normal_p_value(ds.b1, se);
        out["iterations"] = 1;
        out["status"] = "converged";
        out["fixed_point"] = nullptr;
        return out;
    }

    const bool alpha_zero = options.alpha_zero || method == Method::up_lasso;
    const ClassoConfig cfg = base_config(tuning, options.iterations, options.schedule_c, alpha_zero);
    const ClassoEstimate est = classo_fit(data, cfg);
    const auto xt = est.alpha.xtilde.col(0);
    const Interval ci = component_ci(est.theta[0], xt, est.sigma_hat, alpha_level);
    out["estimate"] = est.theta[0];
    out["std_error"] = est.sigma_hat / norm2(xt);
    out["ci"] = {ci.lower, ci.upper};
    out["p_value"] = p_value_component(est.theta[0], xt, est.sigma_hat);
    out["iterations"] = est.iterations;
    out["status"] = status_name(est.status);
    out["fixed_point"] = {{"r_a", est.fixed_point.r_a}, {"r_b", est.fixed_point.r_b}};
    out["lambda_last"] = est.lambda_last;
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void prepare(RegressionTable& table, const PrepOptions& prep) {
    if (prep.center) {
        center_vector(table.y);
        center_columns(table.predictors);
    }
    if (prep.scale) scale_columns(table.predictors);
}

json run_fit(const RegressionTable& table, const FitOptions& options) {
    checked_level(options.level, "--level");
    if (options.methods.empty()) throw ConfigError("--methods must name at least one method");
    const std::size_t p = table.predictors.cols();
    if (p < 2) throw ConfigError("fit needs at least two predictor columns");
    check_targets(options.targets, p);
    const Tuning tuning = shared_tuning(table, options.lambda);

    const std::size_t per = options.methods.size();
    std::vector<json> results(options.targets.size() * per);
    parallel_for(results.size(), options.threads, [&](std::size_t i) {
        results[i] = fit_one(table, options.targets[i / per], options.methods[i % per], tuning, options);
    });

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "fit";
    doc["n"] = table.y.size();
    doc["p"] = p;
    doc["level"] = options.level;
    doc["iterations"] = options.iterations;
    doc["schedule_c"] = options.schedule_c;
    doc["lambda_rule"] = options.lambda ? "explicit" : "auto";
    doc["sigma_hat"] = tuning.sigma_hat;
    doc["lambda_used"] = tuning.lambda;
    doc["results"] = results;
    return doc;
}

json run_infer(const RegressionTable& table, const InferOptions& options) {
    checked_level(options.level, "--level");
    const std::size_t p = table.predictors.cols();
    if (p < 2) throw ConfigError("infer needs at least two predictor columns");
    const Tuning tuning = shared_tuning(table, options.lambda);
    const ClassoConfig cfg = base_config(tuning, options.iterations, options.schedule_c, options.alpha_zero);

    Vector estimates(p);
    Vector p_values(p);
    std::vector<std::string> status(p);
    parallel_for(p, options.threads, [&](std::size_t j) {
        const ClassoEstimate est = classo_fit(split_target(table.predictors, table.y, j), cfg);
        estimates[j] = est.theta[0];
        p_values[j] = p_value_component(est.theta[0], est.alpha.xtilde.col(0), est.sigma_hat);
        status[j] = status_name(est.status);
    });

    const HolmOutcome h = holm(p_values, options.level);
    std::vector<bool> rejected(p, false);
    for (std::size_t j : h.rejected_indices) rejected[j] = true;

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    json tests = json::array();
    for (std::size_t r = 0; r < p; ++r) {
        const std::size_t j = order[r];
        tests.push_back({{"rank", r + 1},
                         {"index", j + 1},
                         {"name", table.predictor_names[j]},
                         {"estimate", estimates[j]},
                         {"p_value", p_values[j]},
                         {"holm_threshold", options.level / static_cast<double>(p - r)},
                         {"rejected", static_cast<bool>(rejected[j])},
                         {"status", status[j]}});
    }
    json rejected_idx = json::array();
    for (std::size_t j : h.rejected_indices) rejected_idx.push_back(j + 1);

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "infer";
    doc["n"] = table.y.size();
    doc["p"] = p;
    doc["level"] = options.level;
    doc["iterations"] = options.iterations;
    doc["schedule_c"] = options.schedule_c;
    doc["lambda_rule"] = options.lambda ? "explicit" : "auto";
    doc["sigma_hat"] = tuning.sigma_hat;
    doc["lambda_used"] = tuning.lambda;
    doc["tests"] = tests;
    doc["rejected"] = rejected_idx;
    doc["cutoff_index"] = h.cutoff_index;
    return doc;
}

json report_json(const SimReport& report) {
    const SimSpec& s = report.spec;
    json methods = json::array();
    for (const MethodSummary& ms : report.methods) {
        json targets = json::array();
        for (const TargetSummary& ts : ms.targets)
            targets.push_back({{"target", ts.target},
                               {"truth", ts.truth},
                               {"coverage", optional_number(ts.coverage)},
                               {"rmse", ts.rmse},
                               {"mean_ci_length", ts.mean_ci_length},
                               {"count", ts.count}});
        methods.push_back({{"method", std::string(method_name(ms.method))},
                           {"failures", ms.failures},
                           {"power", optional_number(ms.power)},
                           {"fwer", optional_number(ms.fwer)},
                           {"targets", targets}});
    }
    json method_names = json::array();
    for (Method m : s.methods) method_names.push_back(std::string(method_name(m)));

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "simulate";
    doc["config"] = {{"n", s.n},
                     {"p", s.p()},
                     {"design", std::string(design_name(s.design.kind))},
                     {"rho", s.design.rho},
                     {"sigma", s.sigma},
                     {"beta_star", s.truth()},
                     {"targets", s.targets},
                     {"reps", s.reps},
                     {"seed", s.base_seed},
                     {"methods", method_names},
                     {"ci_level", 1.0 - s.ci_alpha},
                     {"fwer_level", s.fwer_alpha},
                     {"multiple_testing", s.multiple_testing},
                     {"iterations", s.iterations},
                     {"schedule_c", s.schedule_c}};
    doc["replicates"] = report.replicates.size();
    doc["degenerate"] = report.degenerate;
    doc["valid"] = report.valid;
    doc["max_failure_rate"] = report.max_failure_rate;
    doc["mean_sigma_hat"] = report.mean_sigma_hat;
    doc["methods"] = methods;
    return doc;
}

std::string replicates_csv(const SimReport& report) {
    std::string out = "rep,method,target,estimate,ci_lower,ci_upper,covered,sq_error\n";
    const SimSpec& s = report.spec;
    for (const ReplicateResult& rr : report.replicates)
        for (std::size_t mi = 0; mi < rr.methods.size(); ++mi) {
            const MethodReplicate& mr = rr.methods[mi];
            if (mr.failed) continue;
            for (std::size_t ti = 0; ti < mr.targets.size(); ++ti) {
                const TargetResult& tr = mr.targets[ti];
                out += std::to_string(rr.rep) + ',' + std::string(method_name(s.methods[mi])) + ',' +
                       std::to_string(s.targets[ti]) + ',' + format_double(tr.estimate) + ',' +
                       format_double(tr.ci_lower) + ',' + format_double(tr.ci_upper) + ',' +
                       (tr.covered ? "1" : "0") + ',' + format_double(tr.sq_error) + '\n';
            }
        }
    return out;
}

std::string report_summary(const SimReport& report) {
    const SimSpec& s = report.spec;
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%s design (rho=%g), n=%zu, p=%zu, %zu replicates, mean sigma_hat %.3f\n",
                  std::string(design_name(s.design.kind)).c_str(), s.design.rho, s.n, s.p(), s.reps,
                  report.mean_sigma_hat);
    os << line;
    std::snprintf(line, sizeof line, "%-10s %7s %9s %8s %8s %8s %7s %7s\n", "method", "target", "coverage",
                  "rmse", "ci_len", "failures", "power", "fwer");
    os << line;
    for (const MethodSummary& ms : report.methods)
        for (const TargetSummary& ts : ms.targets) {
            char cov[16] = "n/a";
            char pow[16] = "n/a";
            char fw[16] = "n/a";
            if (ts.coverage) std::snprintf(cov, sizeof cov, "%.3f", *ts.coverage);
            if (ms.power) std::snprintf(pow, sizeof pow, "%.3f", *ms.power);
            if (ms.fwer) std::snprintf(fw, sizeof fw, "%.3f", *ms.fwer);
            std::snprintf(line, sizeof line, "%-10s %7zu %9s %8.4f %8.4f %8zu %7s %7s\n",
                          std::string(method_name(ms.method)).c_str(), ts.target, cov, ts.rmse,
                          ts.mean_ci_length, ms.failures, pow, fw);
            os << line;
        }
    if (report.degenerate) os << "noiseless study: coverage is undefined\n";
    if (!report.valid) os << "INVALID: failure rate above " << report.max_failure_rate << " for some method\n";
    return os.str();
}

json error_json(const std::exception& e) {
    json err;
    err["message"] = e.what();
    err["kind"] = "Error";
    if (const auto* ce = dynamic_cast<const Error*>(&e)) err["kind"] = ce->kind();
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        err["row"] = pe->row();
        err["col"] = pe->col();
    }
    if (const auto* nc = dynamic_cast<const NonConverged*>(&e)) {
        err["kkt_violation"] = nc->kkt_violation();
        if (nc->column()) err["column"] = *nc->column();
    }
    if (const auto* ss = dynamic_cast<const SingularSystem*>(&e)) err["rcond"] = ss->rcond();
    return {{"schema_version", kSchemaVersion}, {"error", err}};
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size() || v < 1) throw ConfigError("'" + item + "' is not a positive index");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ConfigError("empty index list");
    return out;
}

std::vector<Method> parse_method_list(const std::string& text) {
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const Method m = parse_method(item);
        if (std::ranges::find(out, m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw ConfigError("empty method list");
    return out;
}

}  // namespace classo::cli
