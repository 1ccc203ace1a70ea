#include "classo/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>
#define CLASSO_HAVE_NEON 1
#endif

namespace classo::kernels::neon {

#ifdef CLASSO_HAVE_NEON

double dot(const double* x, const double* y, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

double sum_squares(const double* x, std::size_t n) noexcept { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) noexcept {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

#else

double dot(const double* x, const double* y, std::size_t n) noexcept { return scalar::dot(x, y, n); }
double sum_squares(const double* x, std::size_t n) noexcept { return scalar::sum_squares(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) noexcept { scalar::axpy(a, x, y, n); }
void scale(double a, double* x, std::size_t n) noexcept { scalar::scale(a, x, n); }

#endif

}  // namespace classo::kernels::neon
