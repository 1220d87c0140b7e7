#include "dlsc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

// ---------------------------------------------------------------------------
// Scalar special functions

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / kSqrt2);
}

double log_normal_cdf(double x)
{
    if (x < -5.0) return std::log(0.5 * erfcx(-x / kSqrt2)) - 0.5 * x * x;
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
    return std::log(normal_cdf(x));
}

double normal_quantile(double u)
{
    if (u <= 0.0) return -kInf;
    if (u >= 1.0) return kInf;
    return -kSqrt2 * boost::math::erfc_inv(2.0 * u);
}

double erfcx(double x)
{
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic expansion, error below 1e-15 for x >= 25
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(kPi));
}

double digamma(double x)
{
    return boost::math::digamma(x);
}

double logistic(double x)
{
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log1p_exp(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_cosh(double x)
{
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// ---------------------------------------------------------------------------
// Polya-Gamma

namespace {

constexpr double kPgTrunc = 0.64;

// n-th coefficient of the alternating series for the J*(1, z) density,
// piecewise in x around the truncation point.
double pg_series_coef(int n, double x)
{
    const double k = (n + 0.5) * kPi;
    if (x > kPgTrunc) return k * std::exp(-0.5 * k * k * x);
    if (x <= 0.0) return 0.0;
    const double h = n + 0.5;
    return std::exp(-1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) - 2.0 * h * h / x);
}

// Probability that the proposal comes from the truncated exponential piece.
double pg_exponential_mass(double z)
{
    const double t = kPgTrunc;
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
    const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
    const double x0 = std::log(fz) + fz * t;
    const double xb = x0 - z + log_normal_cdf(b);
    const double xa = x0 + z + log_normal_cdf(a);
    const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
    return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, t).
double pg_truncated_inverse_gaussian(double z, RngStream& rng)
{
    const double t = kPgTrunc;
    double x = t + 1.0;
    if (z < 1.0 / t) {
        double accept = 0.0;
        do {
            double e1 = rng.exponential();
            double e2 = rng.exponential();
            while (e1 * e1 > 2.0 * e2 / t) {
                e1 = rng.exponential();
                e2 = rng.exponential();
            }
            x = 1.0 + e1 * t;
            x = t / (x * x);
            accept = std::exp(-0.5 * z * z * x);
        } while (rng.uniform() > accept);
        return x;
    }
    const double mu = 1.0 / z;
    while (x > t) {
        const double y0 = rng.normal();
        const double mu_y = mu * y0 * y0;
        x = mu + 0.5 * mu * mu_y - 0.5 * mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
        if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
    return x;
}

} // namespace

double sample_polya_gamma(double c, RngStream& rng)
{
    const double z = 0.5 * std::abs(c);
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double mass = pg_exponential_mass(z);
    for (;;) {
        double x;
        if (rng.uniform() < mass) {
            x = kPgTrunc + rng.exponential() / fz;
        } else {
            x = pg_truncated_inverse_gaussian(z, rng);
        }
        double s = pg_series_coef(0, x);
        const double y = rng.uniform() * s;
        for (int n = 1;; ++n) {
            if (n % 2 == 1) {
                s -= pg_series_coef(n, x);
                if (y <= s) return 0.25 * x;
            } else {
                s += pg_series_coef(n, x);
                if (y > s) break;
            }
        }
    }
}

double polya_gamma_mean(double c)
{
    const double a = std::abs(c);
    if (a < 1e-6) return 0.25 - a * a / 48.0;
    return std::tanh(0.5 * a) / (2.0 * a);
}

double polya_gamma_logpdf(double omega)
{
    if (!(omega > 0.0)) return -kInf;
    double sum = 1.0;
    double lead;
    if (omega < 0.16) {
        // sum_n (-1)^n (2n+1) / sqrt(2 pi w^3) exp(-(2n+1)^2 / (8w))
        lead = -0.5 * (kLog2Pi + 3.0 * std::log(omega)) - 1.0 / (8.0 * omega);
        for (int n = 1; n < 200; ++n) {
            const double m = 2.0 * n + 1.0;
            const double term = m * std::exp(-(m * m - 1.0) / (8.0 * omega));
            sum += (n % 2 ? -term : term);
            if (term < 1e-18) break;
        }
    } else {
        // sum_n (-1)^n 4 pi (n + 1/2) exp(-2 (n + 1/2)^2 pi^2 w)
        lead = std::log(2.0 * kPi) - 0.5 * kPi * kPi * omega;
        for (int n = 1; n < 200; ++n) {
            const double h = n + 0.5;
            const double term = 2.0 * h * std::exp(-2.0 * kPi * kPi * omega * (h * h - 0.25));
            sum += (n % 2 ? -term : term);
            if (term < 1e-18) break;
        }
    }
    return lead + std::log(sum);
}

double polya_gamma_logpdf(double omega, double c)
{
    return log_cosh(0.5 * c) - 0.5 * c * c * omega + polya_gamma_logpdf(omega);
}

// ---------------------------------------------------------------------------
// Matrix-variate and simplex draws

CovMatrix sample_inverse_wishart(double df, const CovMatrix& scale, RngStream& rng)
{
    const auto p = scale.rows();
    if (scale.cols() != p || p == 0) throw InvalidInput("inverse Wishart: scale must be square");
    if (!(df > static_cast<double>(p) - 1.0)) {
        throw InvalidInput("inverse Wishart: degrees of freedom must exceed p - 1");
    }
    // Sigma^{-1} ~ W(df, scale^{-1}); scale^{-1} = M M' with M = L^{-T}.
    const Eigen::MatrixXd l = robust_cholesky(scale);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        a(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (df - static_cast<double>(i))));
        for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
    }
    // Sigma = (M A A' M')^{-1} = L A^{-T} A^{-1} L'
    const Eigen::MatrixXd ainv =
        a.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd b = l * ainv.transpose();
    return symmetrize(b * b.transpose());
}

double inverse_wishart_logpdf(const CovMatrix& sigma, double df, const CovMatrix& scale)
{
    const auto p = static_cast<double>(scale.rows());
    const GaussianFactor s(sigma);
    const GaussianFactor psi(scale);
    double log_mgamma = 0.25 * p * (p - 1.0) * std::log(kPi);
    for (int j = 0; j < static_cast<int>(p); ++j) log_mgamma += std::lgamma(0.5 * (df - j));
    const double trace = (scale * s.precision).trace();
    return 0.5 * df * psi.log_det - 0.5 * df * p * std::numbers::ln2 - log_mgamma -
           0.5 * (df + p + 1.0) * s.log_det - 0.5 * trace;
}

Eigen::VectorXd sample_dirichlet(std::span<const double> alpha, RngStream& rng)
{
    const auto k = static_cast<Eigen::Index>(alpha.size());
    if (k == 0) throw InvalidInput("Dirichlet: empty concentration vector");
    Eigen::VectorXd logg(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double a = alpha[i];
        if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("Dirichlet: concentrations must be positive");
        logg(i) = a >= 1.0 ? std::log(rng.gamma(a))
                           : std::log(rng.gamma(a + 1.0)) + std::log(rng.uniform()) / a;
    }
    const double m = logg.maxCoeff();
    Eigen::VectorXd x = (logg.array() - m).exp();
    x /= x.sum();
    return x;
}

double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha)
{
    if (x.size() != alpha.size()) throw InvalidInput("Dirichlet: dimension mismatch");
    double total = 0.0;
    double out = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += alpha[i];
        out += (alpha[i] - 1.0) * std::log(x[i]) - std::lgamma(alpha[i]);
    }
    return out + std::lgamma(total);
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, RngStream& rng)
{
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return mean + chol.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_gaussian_canonical(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear, RngStream& rng)
{
    const Eigen::MatrixXd l = robust_cholesky(precision);
    const auto lower = l.triangularView<Eigen::Lower>();
    const Eigen::VectorXd mean = lower.transpose().solve(lower.solve(linear));
    Eigen::VectorXd z(linear.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return mean + lower.transpose().solve(z);
}

// ---------------------------------------------------------------------------
// Truncated normal

namespace {

// Standard normal restricted to (a, b) with a > 0 (upper tail).
double sample_standard_upper_tail(double a, double b, RngStream& rng)
{
    if (b - a < 1.0 / a) {
        // uniform proposal; acceptance >= exp(-1) on such a narrow band
        for (;;) {
            const double z = a + (b - a) * rng.uniform();
            if (rng.uniform() <= std::exp(-0.5 * (z * z - a * a))) return z;
        }
    }
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a + rng.exponential() / rate;
        if (z >= b) continue;
        const double d = z - rate;
        if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
    }
}

double sample_standard_truncated(double a, double b, RngStream& rng)
{
    double sign = 1.0;
    if (a >= 0.0) {
        sign = -1.0;
        const double tmp = a;
        a = -b;
        b = -tmp;
    }
    // now a < 0
    if (b <= -30.0) return -sign * sample_standard_upper_tail(-b, -a, rng);
    const double fa = normal_cdf(a);
    double x;
    if (b <= 0.0) {
        const double fb = normal_cdf(b);
        x = normal_quantile(fa + rng.uniform() * (fb - fa));
    } else {
        // straddles zero; invert each half in its own tail for precision
        const double qb = normal_cdf(-b);
        const double mass = (1.0 - fa) - qb;
        const double v = rng.uniform() * mass;
        if (fa + v < 0.5) {
            x = normal_quantile(fa + v);
        } else {
            x = -normal_quantile(qb + (mass - v));
        }
    }
    x = std::clamp(x, a, b);
    return sign * x;
}

} // namespace

double sample_truncated_normal(double mean, double sd, double lo, double hi, RngStream& rng)
{
    if (!(sd > 0.0)) throw InvalidInput("truncated normal: sd must be positive");
    if (!(lo < hi)) throw InvalidInput("truncated normal: empty interval");
    const double a = (lo - mean) / sd;
    const double b = (hi - mean) / sd;
    double x = mean + sd * sample_standard_truncated(a, b, rng);
    if (x <= lo) x = std::nextafter(lo, hi);
    if (x >= hi) x = std::nextafter(hi, lo);
    return x;
}

double sample_truncated_normal_01(double mean, double var, RngStream& rng)
{
    if (!(var > 0.0)) throw InvalidInput("truncated normal: variance must be positive");
    return sample_truncated_normal(mean, std::sqrt(var), 0.0, 1.0, rng);
}

double log_truncated_normal_mass(double mean, double sd, double lo, double hi)
{
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    if (a >= 0.0) {
        const double tmp = a;
        a = -b;
        b = -tmp;
    }
    const double la = log_normal_cdf(a);
    const double lb = log_normal_cdf(b);
    if (b > 0.0) {
        // 1 - Phi(a) - Phi(-b)
        return std::log1p(-std::exp(la) - normal_cdf(-b));
    }
    return lb + std::log1p(-std::exp(la - lb));
}

PositiveTruncatedNormal::PositiveTruncatedNormal(double m, double s)
    : mean{m}, sd{s}
{
    if (!(s > 0.0)) throw InvalidInput("truncated normal: sd must be positive");
    const double alpha = -m / s;
    const double x = alpha / kSqrt2;
    const double ex = erfcx(x);
    const double hazard = std::sqrt(2.0 / kPi) / ex; // phi(alpha) / Q(alpha)
    first = m + s * hazard;
    double var = s * s * (1.0 + alpha * hazard - hazard * hazard);
    if (alpha > 50.0) {
        // cancellation in the closed form; use the tail expansion
        const double a2 = alpha * alpha;
        var = s * s / a2 * (1.0 - 6.0 / a2 + 50.0 / (a2 * a2));
    }
    var = std::max(var, 1e-300);
    second = var + first * first;
    log_mass = x > 0.0 ? std::log(0.5 * ex) - x * x : std::log(0.5 * std::erfc(x));
    entropy = std::log(s * std::sqrt(2.0 * kPi * std::numbers::e)) + log_mass + 0.5 * alpha * hazard;
}

// ---------------------------------------------------------------------------
// von Mises-Fisher

namespace {

// sum_k (-1)^k a_k(nu) / x^k, the large-x series of sqrt(2 pi x) e^{-x} I_nu(x)
double bessel_i_asymptotic_series(double nu, double x)
{
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * x);
        sum += term;
    }
    return sum;
}

} // namespace

double log_bessel_i(double nu, double x)
{
    if (x < 0.0) throw InvalidInput("log_bessel_i: negative argument");
    if (x == 0.0) return nu == 0.0 ? 0.0 : -kInf;
    if (x < 500.0) {
        const double v = std::cyl_bessel_i(nu, x);
        if (v > 0.0 && std::isfinite(v)) return std::log(v);
    }
    return x - 0.5 * std::log(2.0 * kPi * x) + std::log(bessel_i_asymptotic_series(nu, x));
}

double vmf_mean_resultant(int p, double kappa)
{
    if (p < 2) throw InvalidInput("vMF: dimension must be at least 2");
    if (kappa <= 0.0) return 0.0;
    if (p == 3) {
        if (kappa < 1e-3) return kappa / 3.0 - kappa * kappa * kappa / 45.0;
        return 1.0 / std::tanh(kappa) - 1.0 / kappa;
    }
    const double nu = 0.5 * p;
    if (kappa > 1000.0) {
        return bessel_i_asymptotic_series(nu, kappa) / bessel_i_asymptotic_series(nu - 1.0, kappa);
    }
    // I_nu / I_{nu-1} by the Gauss continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double f = 2.0 * nu / kappa;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 100000; ++k) {
        const double b = 2.0 * (nu + k) / kappa;
        d = b + d;
        d = std::abs(d) < tiny ? tiny : d;
        c = b + 1.0 / c;
        c = std::abs(c) < tiny ? tiny : c;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

double log_uniform_sphere_density(int p)
{
    return std::lgamma(0.5 * p) - std::numbers::ln2 - 0.5 * p * std::log(kPi);
}

double vmf_log_normalizer(int p, double kappa)
{
    if (p < 2) throw InvalidInput("vMF: dimension must be at least 2");
    if (kappa < 1e-10) return log_uniform_sphere_density(p);
    if (p == 3) {
        // kappa / (4 pi sinh kappa)
        return std::log(kappa) - std::log(2.0 * kPi) - kappa - std::log1p(-std::exp(-2.0 * kappa));
    }
    const double nu = 0.5 * p - 1.0;
    return nu * std::log(kappa) - 0.5 * p * kLog2Pi - log_bessel_i(nu, kappa);
}

Eigen::VectorXd sample_vmf(const Eigen::VectorXd& m, RngStream& rng)
{
    const auto p = m.size();
    if (p < 2) throw InvalidInput("vMF: dimension must be at least 2");
    const double kappa = m.norm();
    Eigen::VectorXd g(p);
    for (Eigen::Index i = 0; i < p; ++i) g(i) = rng.normal();
    if (kappa < 1e-12) return g / g.norm();
    const Eigen::VectorXd mu = m / kappa;

    double w;
    if (p == 3) {
        const double u = rng.uniform();
        w = 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * kappa)) / kappa;
    } else {
        // Wood (1994) rejection sampler for the cosine to the mean direction
        const double dm1 = static_cast<double>(p - 1);
        const double b = dm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1));
        const double x0 = (1.0 - b) / (1.0 + b);
        const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);
        for (;;) {
            const double z = rng.beta(0.5 * dm1, 0.5 * dm1);
            w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
            if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(rng.uniform())) break;
        }
    }
    w = std::clamp(w, -1.0, 1.0);
    // tangent direction orthogonal to mu
    Eigen::VectorXd v = g - g.dot(mu) * mu;
    const double vn = v.norm();
    if (vn < 1e-300) return mu;
    v /= vn;
    Eigen::VectorXd out = w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * v;
    return out / out.norm();
}

} // namespace dlsc
