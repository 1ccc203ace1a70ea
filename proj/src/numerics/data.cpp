#include "classo/data.hpp"

#include <algorithm>

#include "classo/error.hpp"
#include "classo/kernels.hpp"

namespace classo {

void SemiparametricData::validate() const {
    if (x.cols() == 0) throw ConfigError("data: need at least one column of interest (d >= 1)");
    if (z.cols() == 0) throw ConfigError("data: need at least one nuisance column (p >= 1)");
    if (x.rows() != y.size() || z.rows() != y.size())
        throw DimensionMismatch("data: X, Z and Y must have the same number of rows");
    if (y.size() < 2) throw ConfigError("data: need at least two observations");
}

BlockMoments compute_moments(const SemiparametricData& data) {
    data.validate();
    const double inv_n = 1.0 / static_cast<double>(data.n());
    BlockMoments m;
    m.n = data.n();
    m.xx = scaled_gram(data.x);
    m.zz = scaled_gram(data.z);
    m.zx = crossprod(data.z, data.x);
    kernels::scale(inv_n, m.zx.data());
    m.xy = tmatvec(data.x, data.y);
    kernels::scale(inv_n, m.xy);
    m.zy = tmatvec(data.z, data.y);
    kernels::scale(inv_n, m.zy);
    m.yy = kernels::sum_squares(data.y) * inv_n;
    return m;
}

BlockMoments split_moments(const Matrix& full_gram, std::span<const double> full_uy, double yy,
                           std::size_t n, std::size_t target) {
    const std::size_t m = full_gram.rows();
    if (full_gram.cols() != m || full_uy.size() != m || target >= m || m < 2)
        throw DimensionMismatch("split_moments: inconsistent full moments or target");
    BlockMoments out;
    out.n = n;
    out.yy = yy;
    out.xx = Matrix(1, 1, full_gram(target, target));
    out.xy = {full_uy[target]};
    out.zx = Matrix(m - 1, 1);
    out.zy.resize(m - 1);
    for (std::size_t i = 0, k = 0; i < m; ++i) {
        if (i == target) continue;
        out.zx(k, 0) = full_gram(i, target);
        out.zy[k] = full_uy[i];
        ++k;
    }
    out.zz = drop_row_col(full_gram, target);
    return out;
}

SemiparametricData split_target(const Matrix& u, std::span<const double> y, std::size_t target) {
    if (target >= u.cols()) throw DimensionMismatch("split_target: target out of range");
    if (u.rows() != y.size()) throw DimensionMismatch("split_target: row count differs from Y");
    SemiparametricData data;
    data.y.assign(y.begin(), y.end());
    data.x = Matrix(u.rows(), 1);
    std::ranges::copy(u.col(target), data.x.col(0).begin());
    data.z = drop_column(u, target);
    return data;
}

Matrix joint_design(const SemiparametricData& data) { return hstack(data.x, data.z); }

}  // namespace classo
