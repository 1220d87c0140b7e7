#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/hmm.hpp"
#include "dlsc/linalg.hpp"
#include "dlsc/rng.hpp"

using namespace dlsc;

namespace {

constexpr double kPi = std::numbers::pi;

// PG(1, 0) density by direct summation of 200 terms; the short-time form
// below 0.64, the long-time form above.
double pg0_density_oracle(double w)
{
    double s = 0.0;
    if (w < 0.64) {
        for (int n = 0; n < 200; ++n) {
            const double m = 2.0 * n + 1.0;
            s += (n % 2 ? -1.0 : 1.0) * m / std::sqrt(2.0 * kPi * w * w * w) * std::exp(-m * m / (8.0 * w));
        }
    } else {
        for (int n = 0; n < 200; ++n) {
            const double h = n + 0.5;
            s += (n % 2 ? -1.0 : 1.0) * 4.0 * kPi * h * std::exp(-2.0 * h * h * kPi * kPi * w);
        }
    }
    return s;
}

// k-th raw moment of PG(1, c) by Simpson quadrature of the oracle density
double pg_moment_oracle(double c, int k)
{
    const double lo = 1e-4, hi = 12.0;
    const int m = 40000;
    const double h = (hi - lo) / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double w = lo + i * h;
        const double f = std::cosh(0.5 * c) * std::exp(-0.5 * c * c * w) * pg0_density_oracle(w) * std::pow(w, k);
        s += f * (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return s * h / 3.0;
}

double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

} // namespace

TEST_CASE("rng streams are reproducible and distinct")
{
    RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_stream = false, differs_seed = false;
    for (int k = 0; k < 1000; ++k) {
        const auto x = a();
        CHECK(x == b());
        differs_stream |= x != c();
        differs_seed |= x != d();
    }
    CHECK(differs_stream);
    CHECK(differs_seed);

    // adjacent streams are uncorrelated
    RngStream e(7, 0), f(7, 1);
    const int n = 200000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = e.uniform(), y = f.uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double r = (sxy / n - sx / n * sy / n) /
                     std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::abs(r) < 4.0 / std::sqrt(n));
}

TEST_CASE("mvn_logpdf")
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1), mu = Eigen::VectorXd::Zero(1);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(1, 1);
    CHECK(mvn_logpdf(x, mu, s) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
    x(0) = 2.0;
    s(0, 0) = 4.0;
    CHECK(mvn_logpdf(x, mu, s) == doctest::Approx(-0.5 * std::log(8.0 * kPi) - 0.5).epsilon(1e-14));
    CHECK(mvn_logpdf(x, mu, s) == doctest::Approx(-2.112085713764618).epsilon(1e-13));

    // translation invariance at the mean
    Eigen::MatrixXd s2(2, 2);
    s2 << 2.0, 0.3, 0.3, 1.0;
    Eigen::VectorXd a(2), b(2);
    a << 1.0, -4.0;
    b << 10.0, 3.5;
    CHECK(mvn_logpdf(a, a, s2) == doctest::Approx(mvn_logpdf(b, b, s2)).epsilon(1e-15));

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(mvn_logpdf(a, b, bad), InvalidInput);
}

TEST_CASE("robust_cholesky retries with jitter and rejects non-PD input")
{
    Eigen::MatrixXd near(2, 2);
    near << 1.0, 1.0, 1.0, 1.0; // singular: PD after the 1e-10 jitter
    const Eigen::MatrixXd L = robust_cholesky(near);
    CHECK((L * L.transpose() - near).norm() < 1e-9);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.1, 1.0;
    CHECK_THROWS_AS(robust_cholesky(asym), InvalidInput);
    Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(robust_cholesky(neg), InvalidInput);
}

TEST_CASE("distance_matrix")
{
    std::vector<LatentPoint> pts(3, Eigen::VectorXd::Zero(2));
    CHECK(distance_matrix(pts).isZero());
    pts[1] << 3.0, 0.0;
    pts[2] << 3.0, 4.0;
    const Eigen::MatrixXd d = distance_matrix(pts);
    CHECK(d(0, 2) == doctest::Approx(5.0));
    CHECK(d(2, 0) == d(0, 2));
    CHECK(d.diagonal().isZero());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(d(i, k) <= d(i, j) + d(j, k) + 1e-12);

    std::vector<LatentPoint> perm{pts[2], pts[0], pts[1]};
    const Eigen::MatrixXd dp = distance_matrix(perm);
    const int idx[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(dp(i, j) == d(idx[i], idx[j]));

    std::vector<LatentPoint> mixed{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)};
    CHECK_THROWS_AS(distance_matrix(mixed), InvalidInput);
}

TEST_CASE("Polya-Gamma log density matches the series oracle")
{
    for (double w : {0.02, 0.1, 0.15, 0.2, 0.5, 0.64, 1.0, 2.5, 6.0}) {
        CHECK(polya_gamma_logpdf(w) == doctest::Approx(std::log(pg0_density_oracle(w))).epsilon(1e-10));
    }
    // the density integrates to one
    CHECK(pg_moment_oracle(0.0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pg_moment_oracle(0.0, 1) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("Polya-Gamma draws: moments within tolerance")
{
    RngStream rng(2024, 0);
    const int n = 1000000;
    for (double c : {0.0, 0.1, 1.0, 2.0, 5.0}) {
        double s = 0.0, ss = 0.0;
        for (int k = 0; k < n; ++k) {
            const double w = sample_polya_gamma(c, rng);
            REQUIRE(w > 0.0);
            s += w;
            ss += w * w;
        }
        const double mean = s / n;
        const double var = ss / n - mean * mean;
        const double exact = c == 0.0 ? 0.25 : std::tanh(0.5 * c) / (2.0 * c);
        CHECK(mean == doctest::Approx(exact).epsilon(0.01));
        CHECK(polya_gamma_mean(c) == doctest::Approx(exact).epsilon(1e-12));
        const double m1 = pg_moment_oracle(c, 1), m2 = pg_moment_oracle(c, 2);
        CHECK(m1 == doctest::Approx(exact).epsilon(1e-6));
        CHECK(var == doctest::Approx(m2 - m1 * m1).epsilon(0.02));
    }
    // reference values 0.25 at c=0 and tanh(1)/4 at c=2, to 1e-3 absolute
    double s0 = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        s0 += sample_polya_gamma(0.0, rng);
        s2 += sample_polya_gamma(2.0, rng);
    }
    CHECK(std::abs(s0 / n - 0.25) < 1e-3);
    CHECK(std::abs(s2 / n - 0.25 * std::tanh(1.0)) < 1e-3);
}

TEST_CASE("Polya-Gamma draws depend on c only through |c|")
{
    RngStream a(5, 0), b(5, 1);
    const int n = 100000;
    std::vector<double> x(n), y(n);
    for (int k = 0; k < n; ++k) {
        x[k] = sample_polya_gamma(3.0, a);
        y[k] = sample_polya_gamma(-3.0, b);
    }
    // two-sample KS at alpha = 0.001
    CHECK(ks_statistic(x, y) < 1.95 * std::sqrt(2.0 / n));
}

TEST_CASE("inverse-Wishart draws")
{
    RngStream rng(11, 0);
    const int n = 100000;
    double s = 0.0;
    Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXd w = sample_inverse_wishart(3.0, one, rng);
        REQUIRE(w(0, 0) > 0.0);
        s += w(0, 0);
    }
    CHECK(std::abs(s / n - 1.0) < 0.05);

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXd w = sample_inverse_wishart(10.0, I2, rng);
        REQUIRE(w.isApprox(w.transpose()));
        REQUIRE(Eigen::LLT<Eigen::MatrixXd>(w).info() == Eigen::Success);
        acc += w;
    }
    acc /= n;
    CHECK(((acc - I2 / 7.0).cwiseAbs().maxCoeff()) < 0.01);
    CHECK_THROWS_AS(sample_inverse_wishart(0.5, I2, rng), InvalidInput);

    // log density: p = 1 reduces to an inverse gamma(df/2, scale/2)
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = 0.7;
    const double a = 1.5, b = 0.5;
    const double ig = a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(0.7) - b / 0.7;
    CHECK(inverse_wishart_logpdf(x, 3.0, one) == doctest::Approx(ig).epsilon(1e-12));
}

TEST_CASE("Dirichlet draws")
{
    RngStream rng(12, 0);
    const int n = 100000;
    const std::vector<double> a1{1.0, 1.0}, a2{2.0, 3.0, 5.0};
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(2), m2 = Eigen::VectorXd::Zero(3);
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd x = sample_dirichlet(a1, rng);
        const Eigen::VectorXd y = sample_dirichlet(a2, rng);
        REQUIRE((x.array() >= 0.0).all());
        REQUIRE((y.array() >= 0.0).all());
        REQUIRE(std::abs(x.sum() - 1.0) < 1e-12);
        REQUIRE(std::abs(y.sum() - 1.0) < 1e-12);
        m1 += x;
        m2 += y;
    }
    m1 /= n;
    m2 /= n;
    CHECK(std::abs(m1(0) - 0.5) < 0.005);
    CHECK(std::abs(m2(0) - 0.2) < 0.005);
    CHECK(std::abs(m2(1) - 0.3) < 0.005);
    CHECK(std::abs(m2(2) - 0.5) < 0.005);

    const std::vector<double> a3{1e6, 1.0};
    const Eigen::VectorXd z = sample_dirichlet(a3, rng);
    CHECK(z(0) > 0.999);
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(sample_dirichlet(bad, rng), InvalidInput);

    // log density of Dir(2, 3) at (0.4, 0.6) = log(B(2,3)^-1 0.4 0.6^2)
    const std::vector<double> x{0.4, 0.6}, a{2.0, 3.0};
    CHECK(dirichlet_logpdf(x, a) == doctest::Approx(std::log(12.0 * 0.4 * 0.36)).epsilon(1e-12));
}

TEST_CASE("truncated normal on (0, 1)")
{
    RngStream rng(13, 0);
    for (int k = 0; k < 1000; ++k) {
        const double x = sample_truncated_normal_01(0.5, 1e-14, rng);
        REQUIRE(std::abs(x - 0.5) < 1e-5);
    }
    // flat limit: KS against Uniform(0, 1)
    const int n = 50000;
    std::vector<double> u(n);
    for (auto& v : u) {
        v = sample_truncated_normal_01(0.5, 1e6, rng);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (int k = 0; k < n; ++k) d = std::max({d, std::abs(u[k] - static_cast<double>(k) / n),
                                              std::abs(u[k] - static_cast<double>(k + 1) / n)});
    CHECK(d < 1.95 / std::sqrt(n));

    // mean 5, var 1: all inside, mass piles up near 1; mean against the closed form
    double s = 0.0;
    int hi = 0, lo = 0;
    for (int k = 0; k < n; ++k) {
        const double x = sample_truncated_normal_01(5.0, 1.0, rng);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        s += x;
        hi += x > 0.9;
        lo += x < 0.1;
    }
    CHECK(hi > lo);
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); };
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double a = -5.0, b = -4.0;
    const double mean = 5.0 + (phi(a) - phi(b)) / (Phi(b) - Phi(a));
    CHECK(std::abs(s / n - mean) < 4.0 * 0.29 / std::sqrt(n));
}

TEST_CASE("truncated normal general bounds and moments")
{
    RngStream rng(14, 0);
    for (int k = 0; k < 10000; ++k) {
        const double x = sample_truncated_normal(0.0, 1.0, 40.0, INFINITY, rng);
        REQUIRE(x > 40.0);
        const double y = sample_truncated_normal(-3.0, 0.5, 0.0, INFINITY, rng);
        REQUIRE(y > 0.0);
    }
    const PositiveTruncatedNormal q(0.3, 1.2);
    const int n = 400000;
    double s = 0.0, ss = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = sample_truncated_normal(0.3, 1.2, 0.0, INFINITY, rng);
        s += x;
        ss += x * x;
    }
    CHECK(std::abs(s / n - q.first) < 0.01);
    CHECK(std::abs(ss / n - q.second) < 0.02);
    CHECK(q.log_mass == doctest::Approx(std::log(0.5 * std::erfc(-0.25 / std::sqrt(2.0)))).epsilon(1e-12));
    CHECK(log_truncated_normal_mass(0.0, 1.0, 0.0, INFINITY) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("von Mises-Fisher")
{
    // A_3(kappa) = coth(kappa) - 1/kappa, and the general-p path agrees
    for (double k : {0.5, 2.0, 10.0, 200.0}) {
        CHECK(vmf_mean_resultant(3, k) == doctest::Approx(1.0 / std::tanh(k) - 1.0 / k).epsilon(1e-12));
    }
    // p = 2: I_1 / I_0 from the standard library
    CHECK(vmf_mean_resultant(2, 1.5) ==
          doctest::Approx(std::cyl_bessel_i(1.0, 1.5) / std::cyl_bessel_i(0.0, 1.5)).epsilon(1e-12));
    CHECK(vmf_mean_resultant(4, 3.0) ==
          doctest::Approx(std::cyl_bessel_i(2.0, 3.0) / std::cyl_bessel_i(1.0, 3.0)).epsilon(1e-12));
    // normalizer integrates the p = 3 density to one: C_3 = kappa / (4 pi sinh kappa)
    CHECK(std::exp(vmf_log_normalizer(3, 2.0)) == doctest::Approx(2.0 / (4.0 * kPi * std::sinh(2.0))).epsilon(1e-12));
    CHECK(vmf_log_normalizer(4, 1e-12) == doctest::Approx(log_uniform_sphere_density(4)));

    RngStream rng(15, 0);
    for (int p : {2, 3, 5}) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(p);
        m(0) = 4.0;
        m(1) = -3.0; // kappa 5
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
        const int n = 100000;
        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd u = sample_vmf(m, rng);
            REQUIRE(std::abs(u.norm() - 1.0) < 1e-12);
            acc += u;
        }
        acc /= n;
        const Eigen::VectorXd expect = vmf_mean_resultant(p, 5.0) * m / 5.0;
        CHECK((acc - expect).norm() < 0.01);
    }
}

TEST_CASE("hidden Markov routines match path enumeration")
{
    RngStream rng(16, 0);
    for (int G : {1, 2, 3}) {
        for (int T : {1, 2, 3, 4}) {
            ChainLogWeights w;
            w.log_init = Eigen::VectorXd(G);
            w.log_trans = Eigen::MatrixXd(G, G);
            w.log_emit = Eigen::MatrixXd(G, T);
            for (int g = 0; g < G; ++g) w.log_init(g) = rng.normal();
            for (int g = 0; g < G; ++g)
                for (int h = 0; h < G; ++h) w.log_trans(g, h) = rng.normal();
            for (int g = 0; g < G; ++g)
                for (int t = 0; t < T; ++t) w.log_emit(g, t) = 3.0 * rng.normal();

            int paths = 1;
            for (int t = 0; t < T; ++t) paths *= G;
            double total = 0.0;
            Eigen::MatrixXd marg = Eigen::MatrixXd::Zero(G, T);
            std::vector<Eigen::MatrixXd> pair(T > 0 ? T - 1 : 0, Eigen::MatrixXd::Zero(G, G));
            std::vector<int> z(T);
            for (int code = 0; code < paths; ++code) {
                int c = code;
                for (int t = 0; t < T; ++t) {
                    z[t] = c % G;
                    c /= G;
                }
                double lw = w.log_init(z[0]) + w.log_emit(z[0], 0);
                for (int t = 1; t < T; ++t) lw += w.log_trans(z[t - 1], z[t]) + w.log_emit(z[t], t);
                const double pw = std::exp(lw);
                total += pw;
                for (int t = 0; t < T; ++t) marg(z[t], t) += pw;
                for (int t = 0; t + 1 < T; ++t) pair[t](z[t], z[t + 1]) += pw;
            }
            CHECK(chain_log_normalizer(w) == doctest::Approx(std::log(total)).epsilon(1e-12));
            const ChainPosterior post = forward_backward(w);
            CHECK(post.log_normalizer == doctest::Approx(std::log(total)).epsilon(1e-12));
            CHECK((post.marginals - marg / total).cwiseAbs().maxCoeff() < 1e-10);
            for (int t = 0; t + 1 < T; ++t) CHECK((post.pairwise[t] - pair[t] / total).cwiseAbs().maxCoeff() < 1e-10);

            // FFBS draws reproduce the single-site marginals
            if (G > 1) {
                const int n = 40000;
                Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(G, T);
                for (int k = 0; k < n; ++k) {
                    const Eigen::VectorXi path = sample_chain(w, rng);
                    for (int t = 0; t < T; ++t) freq(path(t), t) += 1.0;
                }
                freq /= n;
                for (int g = 0; g < G; ++g) {
                    for (int t = 0; t < T; ++t) {
                        const double p = post.marginals(g, t);
                        CHECK(std::abs(freq(g, t) - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("samplers are deterministic given the stream state")
{
    RngStream a(99, 2), b(99, 2);
    Eigen::VectorXd m(3);
    m << 1.0, 2.0, -0.5;
    const std::vector<double> al{0.5, 2.0, 1.0};
    for (int k = 0; k < 100; ++k) {
        CHECK(sample_polya_gamma(1.3, a) == sample_polya_gamma(1.3, b));
        CHECK(sample_vmf(m, a) == sample_vmf(m, b));
        CHECK(sample_dirichlet(al, a) == sample_dirichlet(al, b));
        CHECK(sample_truncated_normal_01(0.2, 0.3, a) == sample_truncated_normal_01(0.2, 0.3, b));
    }
}
