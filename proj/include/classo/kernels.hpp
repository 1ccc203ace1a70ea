#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel has a scalar
// reference implementation; vectorized variants are selected once at startup
// from the host CPU (or the CLASSO_SIMD environment variable) and can be
// switched explicitly for testing.
//
// axpy and scale are elementwise and bitwise identical across variants. The
// reductions (dot, sum_squares) reassociate the sum and agree with the scalar
// reference to within the usual n * eps * sum|x_i y_i| bound.

#include <cstddef>
#include <span>
#include <string_view>

namespace classo::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

/// Currently dispatched instruction set.
Isa active_isa() noexcept;

/// Switch the dispatch table. Throws ConfigError if the host cannot run `isa`.
void set_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// x *= a
void scale(double a, std::span<double> x);

// Direct access to each variant, used by the equivalence tests.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace avx2

namespace neon {
double dot(const double* x, const double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace neon

}  // namespace classo::kernels
