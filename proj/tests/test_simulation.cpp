#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dlsc/errors.hpp"
#include "dlsc/simulation.hpp"

using namespace dlsc;

namespace {

// Pearson chi-square of observed transition counts against the generating rows.
void check_transitions(const PartitionSeries& Z, const Eigen::MatrixXd& beta)
{
    const auto G = beta.rows();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(G, G);
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index t = 1; t < Z.cols(); ++t) counts(Z(i, t - 1), Z(i, t)) += 1.0;
    double chi2 = 0.0;
    int df = 0;
    for (Eigen::Index h = 0; h < G; ++h) {
        const double row = counts.row(h).sum();
        if (row == 0.0) continue;
        for (Eigen::Index k = 0; k < G; ++k) {
            const double e = row * beta(h, k);
            chi2 += (counts(h, k) - e) * (counts(h, k) - e) / e;
        }
        df += static_cast<int>(G) - 1;
    }
    const boost::math::chi_squared dist(df);
    CHECK(chi2 < boost::math::quantile(dist, 0.999));

    // stay fraction per origin against the diagonal, 3 binomial standard errors
    for (Eigen::Index h = 0; h < G; ++h) {
        const double row = counts.row(h).sum();
        if (row < 20.0) continue;
        const double p = beta(h, h);
        CHECK(std::abs(counts(h, h) / row - p) <= 3.0 * std::sqrt(p * (1.0 - p) / row));
    }
}

} // namespace

TEST_CASE("distance transition matrix")
{
    // the reference ranges are rounded to two decimals
    const auto mu = reference_locations();
    for (auto [c, lo, hi] : {std::tuple{20.0, 0.82, 0.87}, std::tuple{10.0, 0.70, 0.77}}) {
        const Eigen::MatrixXd b = transition_matrix_distance(mu, c);
        for (int h = 0; h < 6; ++h) {
            CHECK(b.row(h).sum() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(b(h, h) >= lo - 0.005);
            CHECK(b(h, h) <= hi + 0.005);
        }
    }
    // two symmetric locations: mirror-image rows
    Eigen::VectorXd a(2), b(2);
    a << -1.0, 0.5;
    b << 1.0, -0.5;
    const Eigen::MatrixXd m = transition_matrix_distance({a, b}, 3.0);
    CHECK(m(0, 0) == doctest::Approx(m(1, 1)).epsilon(1e-15));
    CHECK(m(0, 1) == doctest::Approx(m(1, 0)).epsilon(1e-15));
    CHECK(m(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(transition_matrix_distance({a, a}, 3.0), InvalidInput);
}

TEST_CASE("projection transition matrix")
{
    const auto u = reference_directions();
    for (const auto& v : u) CHECK(std::abs(v.norm() - 1.0) < 1e-14);
    for (auto [c, lo, hi] : {std::tuple{8.0, 0.68, 0.96}, std::tuple{5.0, 0.52, 0.83}}) {
        const Eigen::MatrixXd b = transition_matrix_projection(u, c);
        double mn = 1.0, mx = 0.0;
        for (int h = 0; h < 6; ++h) {
            CHECK(b.row(h).sum() == doctest::Approx(1.0).epsilon(1e-14));
            mn = std::min(mn, b(h, h));
            mx = std::max(mx, b(h, h));
        }
        CHECK(mn >= lo - 0.005);
        CHECK(mx <= hi + 0.005);
    }
    const Eigen::MatrixXd flat = transition_matrix_projection(u, 0.0);
    CHECK((flat.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("generators are reproducible")
{
    for (Geometry g : {Geometry::Distance, Geometry::Projection}) {
        SimConfig cfg;
        cfg.geometry = g;
        cfg.n = 30;
        cfg.T = 5;
        cfg.G = 4;
        cfg.seed = 17;
        cfg.next_step = true;
        if (g == Geometry::Distance) {
            const auto a = simulate_distance(cfg);
            const auto b = simulate_distance(cfg);
            CHECK(a.net == b.net);
            CHECK(a.truth.Z == b.truth.Z);
            for (int t = 0; t < 5; ++t) CHECK(a.truth.X[t] == b.truth.X[t]);
            CHECK(*a.next_probs == *b.next_probs);
            cfg.seed = 18;
            CHECK_FALSE(simulate_distance(cfg).net == a.net);
        } else {
            const auto a = simulate_projection(cfg);
            const auto b = simulate_projection(cfg);
            CHECK(a.net == b.net);
            CHECK(a.truth.Z == b.truth.Z);
            for (int t = 0; t < 5; ++t) CHECK(a.truth.X[t] == b.truth.X[t]);
            CHECK(*a.next_probs == *b.next_probs);
            cfg.seed = 18;
            CHECK_FALSE(simulate_projection(cfg).net == a.net);
        }
    }
}

TEST_CASE("generated label chains follow their transition matrices")
{
    for (auto stick : {Stickiness::Sticky, Stickiness::Transitory}) {
        SimConfig cfg;
        cfg.n = 100;
        cfg.T = 10;
        cfg.G = 6;
        cfg.stickiness = stick;
        cfg.seed = 23;
        cfg.geometry = Geometry::Distance;
        const auto d = simulate_distance(cfg);
        check_transitions(d.truth.Z, d.params.beta);
        cfg.geometry = Geometry::Projection;
        const auto p = simulate_projection(cfg);
        check_transitions(p.truth.Z, p.params.beta);
    }
}

TEST_CASE("generated payloads")
{
    SimConfig cfg;
    cfg.n = 40;
    cfg.T = 4;
    cfg.G = 4;
    cfg.seed = 3;
    for (Geometry g : {Geometry::Distance, Geometry::Projection}) {
        cfg.geometry = g;
        const DynamicNetwork net = g == Geometry::Distance ? simulate_distance(cfg).net : simulate_projection(cfg).net;
        CHECK(net.directed());
        CHECK(net.is_binary());
        bool asymmetric = false;
        for (int t = 0; t < net.T(); ++t) {
            const auto& y = net.adjacency(t);
            CHECK(y.diagonal().isZero());
            CHECK(((y.array() == 0.0) || (y.array() == 1.0)).all());
            asymmetric |= !y.isApprox(y.transpose());
        }
        CHECK(asymmetric);
    }
    SimConfig bad = cfg;
    bad.G = 50;
    CHECK_THROWS_AS(simulate_projection(bad), InvalidInput);
    bad.G = 0;
    CHECK_THROWS_AS(simulate_distance(bad), InvalidInput);
}

TEST_CASE("projection positions have E||X||^2 = p / tau + r^2")
{
    SimConfig cfg;
    cfg.geometry = Geometry::Projection;
    cfg.n = 200;
    cfg.T = 20;
    cfg.G = 6;
    cfg.seed = 31;
    const auto sim = simulate_projection(cfg);
    const auto& prm = sim.params;
    const int p = prm.p();
    // pooled standardized residual over every actor-time
    double sum = 0.0, var = 0.0;
    for (int i = 0; i < cfg.n; ++i) {
        const double tau = prm.tau(i), r = prm.r(i);
        for (int t = 0; t < cfg.T; ++t) sum += sim.truth.x(i, t).squaredNorm() - (p / tau + r * r);
        var += cfg.T * (2.0 * p / (tau * tau) + 4.0 * r * r / tau);
    }
    CHECK(std::abs(sum) < 4.0 * std::sqrt(var));
    for (int i = 0; i < cfg.n; ++i) {
        CHECK(prm.s(i) > 0.0);
        CHECK(prm.tau(i) == doctest::Approx(175.0 / (prm.r(i) * prm.r(i))).epsilon(1e-14));
    }
}
