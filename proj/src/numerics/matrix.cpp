#include "classo/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "classo/error.hpp"
#include "classo/kernels.hpp"

namespace classo {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatch("ragged row list");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column_vector(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj != 0.0) kernels::axpy(bkj, a.col(k), c.col(j));
        }
    return c;
}

Matrix crossprod(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("crossprod: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = kernels::dot(a.col(i), b.col(j));
    return c;
}

Matrix scaled_gram(const Matrix& a) {
    const std::size_t m = a.cols();
    const double inv_n = 1.0 / static_cast<double>(a.rows());
    Matrix g(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i <= j; ++i) {
            const double v = kernels::dot(a.col(i), a.col(j)) * inv_n;
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matvec: length differs from columns");
    Vector y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (x[j] != 0.0) kernels::axpy(x[j], a.col(j), y);
    return y;
}

Vector tmatvec(const Matrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw DimensionMismatch("tmatvec: length differs from rows");
    Vector y(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] = kernels::dot(a.col(j), x);
    return y;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("hstack: row counts differ");
    Matrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) std::ranges::copy(a.col(j), c.col(j).begin());
    for (std::size_t j = 0; j < b.cols(); ++j)
        std::ranges::copy(b.col(j), c.col(a.cols() + j).begin());
    return c;
}

Matrix select_columns(const Matrix& a, std::span<const std::size_t> cols) {
    Matrix c(a.rows(), cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= a.cols()) throw DimensionMismatch("select_columns: index out of range");
        std::ranges::copy(a.col(cols[k]), c.col(k).begin());
    }
    return c;
}

Matrix drop_column(const Matrix& a, std::size_t col) {
    if (col >= a.cols()) throw DimensionMismatch("drop_column: index out of range");
    Matrix c(a.rows(), a.cols() - 1);
    for (std::size_t j = 0, k = 0; j < a.cols(); ++j)
        if (j != col) std::ranges::copy(a.col(j), c.col(k++).begin());
    return c;
}

Matrix drop_row_col(const Matrix& a, std::size_t k) {
    if (a.rows() != a.cols() || k >= a.rows())
        throw DimensionMismatch("drop_row_col: needs a square matrix and a valid index");
    const std::size_t m = a.rows() - 1;
    Matrix c(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t sj = j < k ? j : j + 1;
        for (std::size_t i = 0; i < m; ++i) c(i, j) = a(i < k ? i : i + 1, sj);
    }
    return c;
}

double frobenius_norm(const Matrix& a) { return std::sqrt(kernels::sum_squares(a.data())); }

double norm1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::sum_squares(x)); }

double norm_inf(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

double max_abs(const Matrix& a) { return norm_inf(a.data()); }

}  // namespace classo
