#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dlsc {

/// Latent position of one actor at one time; length p.
using LatentPoint = Eigen::VectorXd;
/// Symmetric positive-definite p x p matrix.
using CovMatrix = Eigen::MatrixXd;

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// Lower Cholesky factor of a symmetric matrix. Retries once with a 1e-10
/// diagonal jitter; throws InvalidInput if the matrix is still not PD or is
/// not symmetric.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& sigma);

/// Cached factorization of a Gaussian covariance for repeated density
/// evaluation.
struct GaussianFactor
{
    Eigen::MatrixXd chol;      // lower triangular
    Eigen::MatrixXd precision; // sigma^{-1}
    double log_det = 0.0;      // log |sigma|

    GaussianFactor() = default;
    explicit GaussianFactor(const CovMatrix& sigma);

    int dim() const { return static_cast<int>(chol.rows()); }

    /// log N(x | mu, sigma); x and mu may be any dense expressions.
    template <typename A, typename B>
    double logpdf(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& mu) const
    {
        const Eigen::VectorXd r = x - mu;
        const double quad = chol.triangularView<Eigen::Lower>().solve(r).squaredNorm();
        return -0.5 * (dim() * kLog2Pi + log_det + quad);
    }
};

double mvn_logpdf(const LatentPoint& x, const LatentPoint& mu, const CovMatrix& sigma);

/// Log density of a spherical Gaussian N(x | mu, I / precision).
template <typename A, typename B>
double spherical_logpdf(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& mu,
                        double precision)
{
    const double p = static_cast<double>(x.size());
    return 0.5 * p * (std::log(precision) - kLog2Pi) - 0.5 * precision * (x - mu).squaredNorm();
}

/// n x n Euclidean distance matrix of the given points.
Eigen::MatrixXd distance_matrix(std::span<const LatentPoint> positions);

double log_sum_exp(std::span<const double> values);

/// Symmetric part (A + A') / 2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

} // namespace dlsc
