#include "dlsc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dlsc/errors.hpp"

namespace dlsc {

Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& sigma)
{
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
        throw InvalidInput("covariance must be a nonempty square matrix");
    }
    if (!sigma.allFinite()) throw InvalidInput("covariance has non-finite entries");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
        return llt.matrixL();
    }
    const Eigen::MatrixXd jittered =
        sigma + 1e-10 * Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    Eigen::LLT<Eigen::MatrixXd> retry(jittered);
    if (retry.info() != Eigen::Success) {
        throw InvalidInput("covariance is not positive definite");
    }
    Eigen::MatrixXd l = retry.matrixL();
    if (!(l.diagonal().minCoeff() > 0.0)) throw InvalidInput("covariance is not positive definite");
    return l;
}

GaussianFactor::GaussianFactor(const CovMatrix& sigma)
    : chol{robust_cholesky(sigma)}
{
    log_det = 2.0 * chol.diagonal().array().log().sum();
    const Eigen::MatrixXd linv =
        chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
    precision = linv.transpose() * linv;
}

double mvn_logpdf(const LatentPoint& x, const LatentPoint& mu, const CovMatrix& sigma)
{
    if (x.size() != mu.size() || sigma.rows() != x.size()) {
        throw InvalidInput("mvn_logpdf: dimension mismatch");
    }
    return GaussianFactor(sigma).logpdf(x, mu);
}

Eigen::MatrixXd distance_matrix(std::span<const LatentPoint> positions)
{
    const auto n = static_cast<Eigen::Index>(positions.size());
    if (n == 0) return {};
    const auto p = positions.front().size();
    for (const auto& x : positions) {
        if (x.size() != p) throw InvalidInput("distance_matrix: mixed dimensions");
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = (positions[i] - positions[j]).norm();
        }
    }
    return d;
}

double log_sum_exp(std::span<const double> values)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a)
{
    return 0.5 * (a + a.transpose());
}

} // namespace dlsc
