#include <atomic>
#include <cstdlib>
#include <string>

#include "classo/error.hpp"
#include "classo/kernels.hpp"

namespace classo::kernels {

namespace {

struct Table {
    Isa isa;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*sum_squares)(const double*, std::size_t) noexcept;
    void (*axpy)(double, const double*, double*, std::size_t) noexcept;
    void (*scale)(double, double*, std::size_t) noexcept;
};

constexpr Table kScalar{Isa::scalar, &scalar::dot, &scalar::sum_squares, &scalar::axpy,
                        &scalar::scale};
constexpr Table kAvx2{Isa::avx2, &avx2::dot, &avx2::sum_squares, &avx2::axpy, &avx2::scale};
constexpr Table kNeon{Isa::neon, &neon::dot, &neon::sum_squares, &neon::axpy, &neon::scale};

const Table* table_for(Isa isa) {
    switch (isa) {
        case Isa::avx2: return &kAvx2;
        case Isa::neon: return &kNeon;
        case Isa::scalar: break;
    }
    return &kScalar;
}

const Table* detect() {
    if (const char* env = std::getenv("CLASSO_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return &kScalar;
        if (want == "avx2" && isa_supported(Isa::avx2)) return &kAvx2;
        if (want == "neon" && isa_supported(Isa::neon)) return &kNeon;
    }
    if (isa_supported(Isa::avx2)) return &kAvx2;
    if (isa_supported(Isa::neon)) return &kNeon;
    return &kScalar;
}

std::atomic<const Table*>& current() {
    static std::atomic<const Table*> table{detect()};
    return table;
}

void check(std::size_t a, std::size_t b) {
    if (a != b) throw DimensionMismatch("kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
        case Isa::scalar: break;
    }
    return "scalar";
}

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(__aarch64__) || defined(_M_ARM64)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed)->isa; }

void set_isa(Isa isa) {
    if (!isa_supported(isa))
        throw ConfigError("instruction set '" + std::string(isa_name(isa)) +
                          "' is not supported on this host");
    current().store(table_for(isa), std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
    check(x.size(), y.size());
    return current().load(std::memory_order_relaxed)->dot(x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
    return current().load(std::memory_order_relaxed)->sum_squares(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    check(x.size(), y.size());
    current().load(std::memory_order_relaxed)->axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) {
    current().load(std::memory_order_relaxed)->scale(a, x.data(), x.size());
}

}  // namespace classo::kernels
