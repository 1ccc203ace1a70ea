#pragma once

// Synthetic Gaussian designs and the Monte-Carlo replicate harness comparing
// CLasso, UP Lasso and the de-sparsified Lasso on coverage, RMSE, power and
// family-wise error.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "classo/data.hpp"
#include "classo/estimators.hpp"
#include "classo/matrix.hpp"

namespace classo {

enum class DesignKind { toeplitz, equicorr, identity };

std::string_view design_name(DesignKind kind) noexcept;
/// Throws ConfigError for unknown names.
DesignKind parse_design(std::string_view name);

struct DesignSpec {
    DesignKind kind = DesignKind::toeplitz;
    std::size_t p = 100;
    double rho = 0.9;
};

/// Σ_jk = ρ^|j−k| (toeplitz), ρ off the diagonal (equicorr) or I_p.
/// Throws ConfigError when the result would not be positive definite.
Matrix make_sigma(const DesignSpec& spec);

/// (2, −1, −2, 3, 1, 0, ..., 0). Throws ConfigError for p < 5.
Vector default_beta_star(std::size_t p);

enum class Method { classo, up_lasso, ds_lasso };
std::string_view method_name(Method m) noexcept;
Method parse_method(std::string_view name);

/// Independent random stream for one (seed, replicate, purpose) key.
/// Uniform bits come from std::mt19937_64 seeded through std::seed_seq, and
/// normals from the Box–Muller transform, so a key yields the same numbers
/// on every platform.
class RandomStream {
public:
    RandomStream(std::uint64_t base_seed, std::uint64_t rep_index, std::uint64_t purpose);
    double uniform();  // (0, 1)
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

enum class StreamPurpose : std::uint64_t { design = 1, noise = 2 };

struct SimSpec {
    std::size_t n = 500;
    DesignSpec design{};
    Vector beta_star{};           // empty means default_beta_star(p)
    double sigma = 1.0;           // noise sd; 0 gives a degenerate noiseless study
    std::vector<std::size_t> targets{3, 7};  // 1-based coordinates
    std::size_t reps = 200;
    std::uint64_t base_seed = 0;
    std::vector<Method> methods{Method::classo, Method::up_lasso, Method::ds_lasso};
    /// Significance level of the per-target intervals (0.05 → 95% intervals).
    double ci_alpha = 0.05;
    /// Compute p-values for all p coordinates and run Holm at fwer_alpha.
    bool multiple_testing = true;
    double fwer_alpha = 0.05;
    std::size_t iterations = 10;
    double schedule_c = 0.5;
    NodewisePenalty nodewise_penalty = NodewisePenalty::nodewise_scaled;
    /// Multiplier on λ₁‖α₁‖₁ in the de-sparsified τ̂².
    double ds_tau_penalty_factor = 1.0;
    /// Worker threads; 0 means CLASSO_THREADS or the hardware concurrency.
    std::size_t threads = 0;

    std::size_t p() const noexcept { return design.p; }
    /// beta_star, filled in with the default when empty.
    Vector truth() const;
    void validate() const;
};

struct SampledInstance {
    Matrix u;  // n×p full design
    Vector y;
    Vector beta_star;
    /// One reparameterization per entry of SimSpec::targets.
    std::vector<SemiparametricData> per_target;
};

/// Draws replicate `rep_index`. Bitwise reproducible for a given spec.
SampledInstance sample_instance(const SimSpec& spec, std::size_t rep_index);

/// Per-target result of one method on one replicate.
struct TargetResult {
    double estimate = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double p_value = 1.0;
    bool covered = false;
    double sq_error = 0.0;
};

/// One replicate worth of results for one method.
struct MethodReplicate {
    bool failed = false;
    std::string failure;
    std::vector<TargetResult> targets;  // aligned with SimSpec::targets
    Vector all_p_values;                // length p when multiple testing is on
    double power = 0.0;
    bool family_error = false;
};

struct ReplicateResult {
    std::size_t rep = 0;
    double sigma_hat = 0.0;
    std::vector<MethodReplicate> methods;  // aligned with SimSpec::methods
};

/// Fits every requested method on one sampled replicate.
ReplicateResult run_replicate(const SimSpec& spec, std::size_t rep_index);

struct TargetSummary {
    std::size_t target = 0;  // 1-based
    double truth = 0.0;
    std::optional<double> coverage;  // unset for degenerate studies
    double rmse = 0.0;
    double mean_ci_length = 0.0;
    std::size_t count = 0;
};

struct MethodSummary {
    Method method = Method::classo;
    std::vector<TargetSummary> targets;
    std::optional<double> power;
    std::optional<double> fwer;
    std::size_t failures = 0;
};

struct SimReport {
    SimSpec spec;
    std::vector<MethodSummary> methods;
    std::vector<ReplicateResult> replicates;
    bool degenerate = false;
    /// False when more than max_failure_rate of some method's replicates failed.
    bool valid = true;
    double max_failure_rate = 0.05;
    double mean_sigma_hat = 0.0;

    const MethodSummary& summary(Method m) const;
};

SimReport run_replicates(const SimSpec& spec);

/// Worker count from CLASSO_THREADS, else the hardware concurrency (≥ 1).
std::size_t default_thread_count();

}  // namespace classo
