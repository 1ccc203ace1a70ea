#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "classo/error.hpp"
#include "classo/kernels.hpp"
#include "oracle.hpp"

using namespace classo;
namespace k = classo::kernels;

namespace {

struct Variant {
    k::Isa isa;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*sum_squares)(const double*, std::size_t) noexcept;
    void (*axpy)(double, const double*, double*, std::size_t) noexcept;
    void (*scale)(double, double*, std::size_t) noexcept;
};

std::vector<Variant> supported_variants() {
    std::vector<Variant> out;
    if (k::isa_supported(k::Isa::avx2))
        out.push_back({k::Isa::avx2, k::avx2::dot, k::avx2::sum_squares, k::avx2::axpy, k::avx2::scale});
    if (k::isa_supported(k::Isa::neon))
        out.push_back({k::Isa::neon, k::neon::dot, k::neon::sum_squares, k::neon::axpy, k::neon::scale});
    return out;
}

// Lengths around every unroll boundary.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 1001};

}  // namespace

TEST(Kernels, ScalarAlwaysSupported) {
    EXPECT_TRUE(k::isa_supported(k::Isa::scalar));
    EXPECT_EQ(k::isa_name(k::Isa::scalar), "scalar");
}

TEST(Kernels, ScalarReferenceValues) {
    const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
    EXPECT_EQ(k::scalar::dot(x.data(), y.data(), 3), 32.0);
    EXPECT_EQ(k::scalar::sum_squares(x.data(), 3), 14.0);
    std::vector<double> z = y;
    k::scalar::axpy(2.0, x.data(), z.data(), 3);
    EXPECT_EQ(z, (std::vector<double>{6, 9, 12}));
    k::scalar::scale(0.5, z.data(), 3);
    EXPECT_EQ(z, (std::vector<double>{3, 4.5, 6}));
}

TEST(Kernels, VectorVariantsMatchScalar) {
    for (const auto& v : supported_variants()) {
        for (std::size_t n : kLengths) {
            const Vector x = ref::gaussian_vector(n, n + 1, 1);
            const Vector y = ref::gaussian_vector(n, n + 1, 2);
            double bound = 0.0;
            for (std::size_t i = 0; i < n; ++i) bound += std::fabs(x[i] * y[i]);
            bound *= static_cast<double>(n + 1) * 1.2e-16;
            EXPECT_NEAR(v.dot(x.data(), y.data(), n), k::scalar::dot(x.data(), y.data(), n), bound)
                << k::isa_name(v.isa) << " n=" << n;
            double ss = 0.0;
            for (double a : x) ss += a * a;
            EXPECT_NEAR(v.sum_squares(x.data(), n), k::scalar::sum_squares(x.data(), n),
                        ss * static_cast<double>(n + 1) * 1.2e-16);

            Vector a = y, b = y;
            v.axpy(-0.75, x.data(), a.data(), n);
            k::scalar::axpy(-0.75, x.data(), b.data(), n);
            EXPECT_EQ(a, b) << "axpy must be bitwise identical";
            v.scale(1.3, a.data(), n);
            k::scalar::scale(1.3, b.data(), n);
            EXPECT_EQ(a, b) << "scale must be bitwise identical";
        }
    }
}

TEST(Kernels, DispatchSwitchesAndRestores) {
    const k::Isa original = k::active_isa();
    const Vector x = ref::gaussian_vector(37, 4), y = ref::gaussian_vector(37, 5);
    k::set_isa(k::Isa::scalar);
    EXPECT_EQ(k::active_isa(), k::Isa::scalar);
    EXPECT_EQ(k::dot(x, y), k::scalar::dot(x.data(), y.data(), x.size()));
    for (const auto& v : supported_variants()) {
        k::set_isa(v.isa);
        EXPECT_EQ(k::active_isa(), v.isa);
        EXPECT_EQ(k::dot(x, y), v.dot(x.data(), y.data(), x.size()));
    }
    for (k::Isa isa : {k::Isa::avx2, k::Isa::neon})
        if (!k::isa_supported(isa)) EXPECT_THROW(k::set_isa(isa), ConfigError);
    k::set_isa(original);
}
