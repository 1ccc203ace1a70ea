#include "classo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "classo/error.hpp"

namespace classo {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols() || a.empty())
        throw DimensionMismatch(std::string(who) + ": matrix must be square and non-empty");
}

struct LuFactor {
    Matrix lu;
    std::vector<std::size_t> perm;
    bool singular = false;
};

LuFactor lu_factor(const Matrix& a) {
    const std::size_t n = a.rows();
    LuFactor f{a, std::vector<std::size_t>(n)};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    Matrix& m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > best) {
                best = std::abs(m(i, k));
                piv = i;
            }
        if (best == 0.0) {
            f.singular = true;
            return f;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const double lik = m(i, k);
            if (lik == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
        }
    }
    return f;
}

Matrix lu_solve(const LuFactor& f, const Matrix& b) {
    const std::size_t n = f.lu.rows();
    Matrix x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        auto col = x.col(c);
        for (std::size_t i = 0; i < n; ++i) col[i] = b(f.perm[i], c);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) col[i] -= f.lu(i, k) * col[k];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) col[i] -= f.lu(i, k) * col[k];
            col[i] /= f.lu(i, i);
        }
    }
    return x;
}

double one_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) best = std::max(best, norm1(a.col(j)));
    return best;
}

double rcond_from(const Matrix& a, const LuFactor& f) {
    if (f.singular) return 0.0;
    const Matrix inv = lu_solve(f, Matrix::identity(a.rows()));
    const double denom = one_norm(a) * one_norm(inv);
    if (!std::isfinite(denom) || denom == 0.0) return 0.0;
    return 1.0 / denom;
}

}  // namespace

CholeskyFactor cholesky(const Matrix& sigma) {
    require_square(sigma, "cholesky");
    const std::size_t n = sigma.rows();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) {
            const double tol = 1e-12 * std::max(1.0, std::abs(sigma(i, j)));
            if (std::abs(sigma(i, j) - sigma(j, i)) > tol)
                throw DimensionMismatch("cholesky: matrix is not symmetric");
        }

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = sigma(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > kCholeskyPivotFloor)) throw NotPositiveDefinite(j, d);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = sigma(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return {std::move(l)};
}

double rcond(const Matrix& a) {
    require_square(a, "rcond");
    return rcond_from(a, lu_factor(a));
}

Matrix solve(const Matrix& a, const Matrix& b) {
    require_square(a, "solve");
    if (b.rows() != a.rows()) throw DimensionMismatch("solve: right-hand side has wrong row count");
    const LuFactor f = lu_factor(a);
    const double rc = rcond_from(a, f);
    if (rc < kSingularRcond) {
        std::ostringstream os;
        os << "linear system is numerically singular (rcond = " << rc << ")";
        throw SingularSystem(os.str(), rc);
    }
    return lu_solve(f, b);
}

Matrix inverse_spd(const Matrix& a) {
    Matrix inv = solve(a, Matrix::identity(a.rows()));
    for (std::size_t j = 0; j < inv.cols(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

}  // namespace classo
