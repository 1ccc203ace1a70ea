#include <cmath>

#include <gtest/gtest.h>

#include "classo/data.hpp"
#include "classo/error.hpp"
#include "classo/linalg.hpp"
#include "classo/matrix.hpp"
#include "oracle.hpp"

using namespace classo;

namespace {

Matrix random_spd(std::size_t k, std::uint64_t seed) {
    const Matrix a = ref::gaussian_matrix(k + 3, k, seed);
    Matrix s = crossprod(a, a);
    for (std::size_t i = 0; i < k; ++i) s(i, i) += 0.1;
    return s;
}

double rel_frobenius(const Matrix& a, const Matrix& b) {
    Matrix d = a;
    for (std::size_t i = 0; i < d.data().size(); ++i) d.data()[i] -= b.data()[i];
    return frobenius_norm(d) / frobenius_norm(b);
}

}  // namespace

TEST(Cholesky, IdentityIsItsOwnFactor) {
    EXPECT_EQ(cholesky(Matrix::identity(3)).lower, Matrix::identity(3));
}

TEST(Cholesky, TwoByTwoExample) {
    const auto f = cholesky(Matrix::from_rows({{4, 2}, {2, 3}}));
    EXPECT_DOUBLE_EQ(f.lower(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(f.lower(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(f.lower(1, 0), 1.0);
    EXPECT_NEAR(f.lower(1, 1), std::sqrt(2.0), 1e-15);
}

TEST(Cholesky, IndefiniteThrows) {
    EXPECT_THROW(cholesky(Matrix::from_rows({{1, 2}, {2, 1}})), NotPositiveDefinite);
}

TEST(Cholesky, AsymmetricOrNonSquareRejected) {
    EXPECT_THROW(cholesky(Matrix::from_rows({{1, 0.5}, {0.4, 1}})), DimensionMismatch);
    EXPECT_THROW(cholesky(Matrix(2, 3, 1.0)), DimensionMismatch);
}

TEST(Cholesky, ReconstructsRandomSpd) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::size_t k = 1 + seed % 12;
        const Matrix s = random_spd(k, seed);
        const auto f = cholesky(s);
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_GT(f.lower(i, i), 0.0);
            for (std::size_t j = i + 1; j < k; ++j) EXPECT_EQ(f.lower(i, j), 0.0);
        }
        EXPECT_LE(rel_frobenius(matmul(f.lower, transpose(f.lower)), s), 1e-10) << "seed " << seed;
    }
}

TEST(Solve, IdentityExample) {
    const Matrix x = solve(Matrix::identity(2), Matrix::from_rows({{3}, {7}}));
    EXPECT_EQ(x, Matrix::from_rows({{3}, {7}}));
}

TEST(Solve, DiagonalExample) {
    const Matrix x = solve(Matrix::from_rows({{2, 0}, {0, 4}}), Matrix::from_rows({{2}, {8}}));
    EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(x(1, 0), 2.0);
}

TEST(Solve, RandomSpdResidual) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Matrix a = random_spd(3, seed);
        const Matrix b = ref::gaussian_matrix(3, 2, seed, 7);
        const Matrix x = solve(a, b);
        Matrix r = matmul(a, x);
        for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] -= b.data()[i];
        EXPECT_LE(frobenius_norm(r), 1e-10 * frobenius_norm(b));
    }
}

TEST(Solve, RecoversKnownSolutionUpToCondition1e8) {
    // A = Q D Qᵀ with eigenvalues spread over [1e-8, 1].
    const std::size_t k = 6;
    const Matrix g = ref::gaussian_matrix(k, k, 5);
    Matrix q = g;
    for (std::size_t j = 0; j < k; ++j) {
        auto cj = q.col(j);
        for (std::size_t i = 0; i < j; ++i) {
            const auto ci = q.col(i);
            double d = 0.0;
            for (std::size_t r = 0; r < k; ++r) d += ci[r] * cj[r];
            for (std::size_t r = 0; r < k; ++r) cj[r] -= d * ci[r];
        }
        const double nrm = norm2(cj);
        for (double& v : cj) v /= nrm;
    }
    Matrix d(k, k);
    for (std::size_t i = 0; i < k; ++i) d(i, i) = std::pow(10.0, -8.0 * static_cast<double>(i) / (k - 1));
    const Matrix a = matmul(matmul(q, d), transpose(q));
    const Matrix x = ref::gaussian_matrix(k, 1, 6);
    const Matrix got = solve(a, matmul(a, x));
    EXPECT_LE(rel_frobenius(got, x), 1e-8);
}

TEST(Solve, SingularThrowsWithRcond) {
    try {
        solve(Matrix::from_rows({{1, 2}, {2, 4}}), Matrix::from_rows({{1}, {2}}));
        FAIL() << "expected SingularSystem";
    } catch (const SingularSystem& e) {
        EXPECT_LT(e.rcond(), kSingularRcond);
    }
    EXPECT_THROW(solve(Matrix::from_rows({{1, 0}, {0, 1e-15}}), Matrix::from_rows({{1}, {1}})), SingularSystem);
}

TEST(Solve, DimensionChecks) {
    EXPECT_THROW(solve(Matrix(2, 3), Matrix(2, 1)), DimensionMismatch);
    EXPECT_THROW(solve(Matrix::identity(2), Matrix(3, 1)), DimensionMismatch);
}

TEST(Matrix, ColumnMajorLayoutAndHelpers) {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    EXPECT_EQ(a.rows(), 2u);
    EXPECT_EQ(a.cols(), 3u);
    EXPECT_EQ(a.col(1)[0], 2.0);
    EXPECT_EQ(a.col(1)[1], 5.0);
    EXPECT_EQ(transpose(transpose(a)), a);
    const Matrix g = scaled_gram(a);
    EXPECT_DOUBLE_EQ(g(0, 1), (1 * 2 + 4 * 5) / 2.0);
    EXPECT_EQ(g(0, 1), g(1, 0));
    const Vector v = matvec(a, Vector{1, 1, 1});
    EXPECT_EQ(v, (Vector{6, 15}));
    EXPECT_EQ(tmatvec(a, Vector{1, 1}), (Vector{5, 7, 9}));
    EXPECT_EQ(drop_column(a, 1), Matrix::from_rows({{1, 3}, {4, 6}}));
    EXPECT_EQ(drop_row_col(Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}), 1),
              Matrix::from_rows({{1, 3}, {7, 9}}));
    EXPECT_EQ(hstack(a, Matrix::column_vector(Vector{7, 8})).cols(), 4u);
    EXPECT_DOUBLE_EQ(norm1(Vector{1, -2, 3}), 6.0);
    EXPECT_DOUBLE_EQ(norm_inf(Vector{1, -5, 3}), 5.0);
    EXPECT_DOUBLE_EQ(max_abs(a), 6.0);
}

TEST(Matrix, InverseSpdIsSymmetricInverse) {
    const Matrix s = random_spd(5, 11);
    const Matrix inv = inverse_spd(s);
    const Matrix prod = matmul(s, inv);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            EXPECT_NEAR(prod(i, j), i == j ? 1.0 : 0.0, 1e-10);
            EXPECT_EQ(inv(i, j), inv(j, i));
        }
}

TEST(Moments, SplitMatchesDirectComputation) {
    const Matrix u = ref::gaussian_matrix(40, 6, 3);
    const Vector y = ref::gaussian_vector(40, 3);
    const Matrix g = scaled_gram(u);
    Vector uy = tmatvec(u, y);
    for (double& v : uy) v /= 40.0;
    double yy = 0.0;
    for (double v : y) yy += v * v;
    yy /= 40.0;
    for (std::size_t t = 0; t < 6; ++t) {
        const BlockMoments split = split_moments(g, uy, yy, 40, t);
        const BlockMoments direct = compute_moments(split_target(u, y, t));
        EXPECT_NEAR(split.xx(0, 0), direct.xx(0, 0), 1e-13);
        EXPECT_NEAR(max_abs(split.zz) - max_abs(direct.zz), 0.0, 1e-13);
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_NEAR(split.zx(k, 0), direct.zx(k, 0), 1e-13);
            EXPECT_NEAR(split.zy[k], direct.zy[k], 1e-13);
        }
        EXPECT_NEAR(split.yy, direct.yy, 1e-13);
    }
}

TEST(Data, ValidateCatchesShapes) {
    SemiparametricData d{Vector(3, 1.0), Matrix(3, 1), Matrix(4, 2)};
    EXPECT_THROW(d.validate(), DimensionMismatch);
    SemiparametricData ok{Vector(3, 1.0), Matrix(3, 1), Matrix(3, 2)};
    EXPECT_NO_THROW(ok.validate());
}
