#pragma once

#include "dyncausal/rng.hpp"
#include "dyncausal/types.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace dyncausal {

namespace detail {

// Least-squares residuals of column y regressed on [1, Z columns]. Throws
// DegenerateDataError when the design is rank deficient (constant or
// collinear conditioning columns).
inline Vector regression_residuals(const Matrix& samples, int y, const std::vector<int>& Z) {
    const int n = static_cast<int>(samples.rows());
    Matrix X(n, Z.size() + 1);
    X.col(0).setOnes();
    for (std::size_t c = 0; c < Z.size(); ++c) X.col(c + 1) = samples.col(Z[c]);
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols())
        throw DegenerateDataError("conditioning columns are rank deficient");
    Vector beta = qr.solve(samples.col(y));
    return samples.col(y) - X * beta;
}

}  // namespace detail

// Sample partial correlation of columns i and j given the columns Z, computed
// from regression residuals.
inline double partial_correlation(const Matrix& samples, int i, int j, const std::vector<int>& Z) {
    const int n = static_cast<int>(samples.rows());
    if (i == j) throw std::invalid_argument("partial_correlation: columns must be distinct");
    for (int z : Z)
        if (z == i || z == j) throw std::invalid_argument("partial_correlation: conditioning set overlaps i or j");
    if (n <= static_cast<int>(Z.size()) + 3)
        throw std::invalid_argument("partial_correlation: need more than |Z| + 3 samples");
    Vector ri = detail::regression_residuals(samples, i, Z);
    Vector rj = detail::regression_residuals(samples, j, Z);
    double si = ri.norm(), sj = rj.norm();
    if (si <= 0.0 || sj <= 0.0) throw DegenerateDataError("a residual column has zero variance");
    double r = ri.dot(rj) / (si * sj);
    return std::clamp(r, -1.0, 1.0);
}

// Second, independent route: the normalized off-diagonal entry of the
// precision matrix of (i, j, Z).
inline double partial_correlation_precision(const Matrix& samples, int i, int j, const std::vector<int>& Z) {
    const int n = static_cast<int>(samples.rows());
    if (n <= static_cast<int>(Z.size()) + 3)
        throw std::invalid_argument("partial_correlation_precision: need more than |Z| + 3 samples");
    std::vector<int> cols = {i, j};
    cols.insert(cols.end(), Z.begin(), Z.end());
    Matrix sub(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(c) = samples.col(cols[c]);
    Matrix centered = sub.rowwise() - sub.colwise().mean();
    Matrix cov = centered.transpose() * centered / double(n - 1);
    Eigen::FullPivLU<Matrix> lu(cov);
    if (!lu.isInvertible()) throw DegenerateDataError("covariance of (i, j, Z) is singular");
    Matrix prec = lu.inverse();
    return std::clamp(-prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1)), -1.0, 1.0);
}

struct CITestResult {
    double statistic = 0.0;  // sample partial correlation
    int n = 0;
    double z_score = 0.0;  // Fisher-transformed
    bool independent = false;
    double alpha = 0.01;
};

// Fisher z-test of zero partial correlation: independent when
// |atanh(r)| sqrt(n - |Z| - 3) stays below the two-sided normal quantile.
inline CITestResult ci_test(const Matrix& samples, int i, int j, const std::vector<int>& Z, double alpha = 0.01) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ci_test: alpha must lie in (0,1)");
    CITestResult res;
    res.n = static_cast<int>(samples.rows());
    res.alpha = alpha;
    res.statistic = partial_correlation(samples, i, j, Z);
    double r = std::clamp(res.statistic, -1.0 + 1e-15, 1.0 - 1e-15);
    res.z_score = std::atanh(r) * std::sqrt(double(res.n - static_cast<int>(Z.size()) - 3));
    res.independent = std::abs(res.z_score) < normal_quantile(1.0 - alpha / 2.0);
    return res;
}

}  // namespace dyncausal
