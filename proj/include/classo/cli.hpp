#pragma once

// The work behind the `classo` subcommands, kept out of main() so it can be
// tested directly. Every function returns the JSON document it would write.

#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "classo/estimators.hpp"
#include "classo/io.hpp"
#include "classo/simulate.hpp"

namespace classo::cli {

inline constexpr const char* kSchemaVersion = "1.0";

struct PrepOptions {
    bool center = false;
    bool scale = false;
};

/// Applies --center / --scale to the response and predictors.
void prepare(RegressionTable& table, const PrepOptions& prep);

struct FitOptions {
    std::vector<std::size_t> targets;  // 1-based predictor positions
    double level = 0.95;               // confidence level of the intervals
    std::size_t iterations = 10;
    std::optional<double> lambda;      // unset means the scaled-Lasso rule
    double schedule_c = 0.5;
    bool alpha_zero = false;
    std::vector<Method> methods{Method::classo};
    std::size_t threads = 0;
};

nlohmann::json run_fit(const RegressionTable& table, const FitOptions& options);

struct InferOptions {
    double level = 0.05;  // family-wise error level for Holm
    std::size_t iterations = 10;
    std::optional<double> lambda;
    double schedule_c = 0.5;
    bool alpha_zero = false;
    std::size_t threads = 0;
};

nlohmann::json run_infer(const RegressionTable& table, const InferOptions& options);

nlohmann::json report_json(const SimReport& report);
/// Columns rep, method, target, estimate, ci_lower, ci_upper, covered, sq_error.
std::string replicates_csv(const SimReport& report);
/// Human-readable coverage / RMSE / power table.
std::string report_summary(const SimReport& report);

/// {"schema_version", "error": {"kind", "message", ...}} for any exception.
nlohmann::json error_json(const std::exception& e);

/// Parses "3,7" into {3, 7}. Throws ConfigError on malformed input.
std::vector<std::size_t> parse_index_list(const std::string& text);
std::vector<Method> parse_method_list(const std::string& text);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = default).
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn);

}  // namespace classo::cli

#include <atomic>
#include <thread>

namespace classo::cli {

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    const std::size_t workers = std::min(count, threads ? threads : default_thread_count());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace classo::cli
