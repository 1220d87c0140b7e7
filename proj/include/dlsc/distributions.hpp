#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/linalg.hpp"
#include "dlsc/rng.hpp"

namespace dlsc {

// ---------------------------------------------------------------------------
// Scalar special functions

double normal_cdf(double x);
double log_normal_cdf(double x);
double normal_quantile(double u);
/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);
double digamma(double x);
double logistic(double x);
/// log(1 + exp(x)) without overflow.
double log1p_exp(double x);
/// log cosh(x) without overflow.
double log_cosh(double x);

// ---------------------------------------------------------------------------
// Polya-Gamma PG(1, c)

/// Exact draw from PG(1, c) using the alternating-series accept/reject
/// scheme on the tilted Jacobi density (truncation point 0.64).
double sample_polya_gamma(double c, RngStream& rng);

/// E[PG(1, c)] = tanh(c/2) / (2c), with the c -> 0 limit 1/4.
double polya_gamma_mean(double c);

/// log density of PG(1, 0) at omega > 0 (series evaluation).
double polya_gamma_logpdf(double omega);

/// log density of PG(1, c): log cosh(c/2) - c^2 omega / 2 + log PG(omega | 1, 0).
double polya_gamma_logpdf(double omega, double c);

// ---------------------------------------------------------------------------
// Matrix-variate and simplex draws

/// Draw from W^{-1}(df, scale); requires df > p - 1.
CovMatrix sample_inverse_wishart(double df, const CovMatrix& scale, RngStream& rng);
double inverse_wishart_logpdf(const CovMatrix& sigma, double df, const CovMatrix& scale);

Eigen::VectorXd sample_dirichlet(std::span<const double> alpha, RngStream& rng);
double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha);

/// Draw from N(mean, chol chol').
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, RngStream& rng);

/// Draw from the Gaussian with density proportional to
/// exp(-x' P x / 2 + b' x), i.e. N(P^{-1} b, P^{-1}).
Eigen::VectorXd sample_gaussian_canonical(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear, RngStream& rng);

// ---------------------------------------------------------------------------
// Truncated normal

/// Draw from N(mean, sd^2) restricted to (lo, hi); either bound may be infinite.
double sample_truncated_normal(double mean, double sd, double lo, double hi, RngStream& rng);

/// Draw from N(mean, var) truncated to (0, 1); the result is strictly inside.
double sample_truncated_normal_01(double mean, double var, RngStream& rng);

/// log of P(lo < N(mean, sd^2) < hi).
double log_truncated_normal_mass(double mean, double sd, double lo, double hi);

/// Moments of N(mean, sd^2) truncated to (0, inf).
struct PositiveTruncatedNormal
{
    double mean = 0.0;     // location before truncation
    double sd = 1.0;
    double first = 0.0;    // E[x]
    double second = 0.0;   // E[x^2]
    double entropy = 0.0;
    double log_mass = 0.0; // log P(x > 0) before truncation

    PositiveTruncatedNormal() = default;
    PositiveTruncatedNormal(double mean, double sd);
};

// ---------------------------------------------------------------------------
// von Mises-Fisher on the unit sphere in R^p

/// log I_nu(x) for x >= 0.
double log_bessel_i(double nu, double x);

/// Mean resultant length A_p(kappa) = I_{p/2}(kappa) / I_{p/2-1}(kappa).
double vmf_mean_resultant(int p, double kappa);

/// log C_p(kappa), the vMF normalizing constant w.r.t. surface measure.
double vmf_log_normalizer(int p, double kappa);

/// Draw from vMF with density proportional to exp(m' u); m = kappa * direction.
/// m = 0 gives the uniform distribution on the sphere.
Eigen::VectorXd sample_vmf(const Eigen::VectorXd& m, RngStream& rng);

/// log of the uniform density on the unit sphere in R^p.
double log_uniform_sphere_density(int p);

} // namespace dlsc
