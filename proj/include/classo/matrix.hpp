#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace classo {

using Vector = std::vector<double>;

/// Dense matrix stored column by column, so that a column is a contiguous
/// span. Indexing is (row, col).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Build from a list of rows, e.g. {{4, 2}, {2, 3}}.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    /// Single-column matrix holding `v`.
    static Matrix column_vector(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const noexcept {
        return {data_.data() + j * rows_, rows_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ b
Matrix crossprod(const Matrix& a, const Matrix& b);
/// n⁻¹ aᵀ a with n = a.rows(). Symmetric by construction.
Matrix scaled_gram(const Matrix& a);
Vector matvec(const Matrix& a, std::span<const double> x);
/// aᵀ x
Vector tmatvec(const Matrix& a, std::span<const double> x);

Matrix hstack(const Matrix& a, const Matrix& b);
Matrix select_columns(const Matrix& a, std::span<const std::size_t> cols);
Matrix drop_column(const Matrix& a, std::size_t col);
/// Principal submatrix with row and column `k` removed.
Matrix drop_row_col(const Matrix& a, std::size_t k);

double frobenius_norm(const Matrix& a);
double norm1(std::span<const double> x);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
/// Max absolute entry.
double max_abs(const Matrix& a);

}  // namespace classo
