#pragma once

#include <cstddef>
#include <span>

#include "classo/matrix.hpp"

namespace classo {

/// Y = Xθ + Zγ + w with X holding the d columns of interest and Z the p
/// nuisance columns.
struct SemiparametricData {
    Vector y;
    Matrix x;
    Matrix z;

    std::size_t n() const noexcept { return y.size(); }
    std::size_t d() const noexcept { return x.cols(); }
    std::size_t p() const noexcept { return z.cols(); }

    /// Throws DimensionMismatch / ConfigError when rows disagree or a block is empty.
    void validate() const;
};

/// Scaled cross-products n⁻¹[X Z Y]ᵀ[X Z Y] split by block. Every estimator
/// step except forming X̃ itself runs on these.
struct BlockMoments {
    std::size_t n = 0;
    Matrix xx;  // d×d
    Matrix zx;  // p×d
    Matrix zz;  // p×p
    Vector xy;  // d
    Vector zy;  // p
    double yy = 0.0;
};

BlockMoments compute_moments(const SemiparametricData& data);

/// Moments of the single-target split (X_t as interest column, the other
/// columns as nuisance) taken from the full scaled gram n⁻¹UᵀU and n⁻¹UᵀY.
BlockMoments split_moments(const Matrix& full_gram, std::span<const double> full_uy, double yy,
                           std::size_t n, std::size_t target);

/// Y = U β with column `target` as the interest column and the rest, in
/// their original order, as nuisance.
SemiparametricData split_target(const Matrix& u, std::span<const double> y, std::size_t target);

/// Joint design U = (X, Z).
Matrix joint_design(const SemiparametricData& data);

}  // namespace classo
