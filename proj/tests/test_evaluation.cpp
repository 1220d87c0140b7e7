#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dlsc/errors.hpp"
#include "dlsc/metrics.hpp"
#include "dlsc/prediction.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/simulation.hpp"

using namespace dlsc;

namespace {

PartitionSeries col(std::initializer_list<int> v)
{
    PartitionSeries p(static_cast<Eigen::Index>(v.size()), 1);
    int k = 0;
    for (int x : v) p(k++, 0) = x;
    return p;
}

PartitionSeries random_partition(int n, int T, int G, RngStream& rng)
{
    PartitionSeries p(n, T);
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = static_cast<int>(rng.index(G));
    return p;
}

PartitionSeries relabel(const PartitionSeries& p, const std::vector<int>& perm)
{
    PartitionSeries q = p;
    for (Eigen::Index k = 0; k < q.size(); ++k) q(k) = perm[p(k)];
    return q;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

TEST_CASE("AUC")
{
    const std::vector<double> sep{0.1, 0.2, 0.8, 0.9};
    const std::vector<int> lab{0, 0, 1, 1};
    CHECK(auc(sep, lab) == 1.0);
    const std::vector<double> flat(4, 0.3);
    CHECK(auc(flat, lab) == 0.5);
    const std::vector<double> ex{0.1, 0.4, 0.35, 0.8};
    CHECK(auc(ex, lab) == doctest::Approx(0.75).epsilon(1e-15));
    const std::vector<int> one{1, 1, 1, 1};
    CHECK_THROWS_AS(auc(ex, one), UndefinedMetric);

    RngStream rng(1, 0);
    const int n = 20000;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int k = 0; k < n; ++k) {
        s[k] = rng.uniform();
        y[k] = rng.uniform() < 0.3;
    }
    CHECK(std::abs(auc(s, y) - 0.5) < 0.02);
}

TEST_CASE("corrected Rand index and variation of information")
{
    const auto a = col({0, 0, 1, 1});
    const auto b = col({0, 1, 0, 1});
    CHECK(corrected_rand(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(corrected_rand(a, b) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(variation_of_information(a, a) == doctest::Approx(0.0));
    const auto merged = col({3, 3, 3, 3});
    CHECK(variation_of_information(a, merged) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(variation_of_information(merged, a) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(corrected_rand(a, col({0, 1, 0})), InvalidInput);
    CHECK_THROWS_AS(variation_of_information(a, col({0, 1, 0})), InvalidInput);

    RngStream rng(2, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = random_partition(10, 1, 3, rng);
        const auto y = random_partition(10, 1, 4, rng);
        const auto z = random_partition(10, 1, 2, rng);
        std::vector<int> p3{0, 1, 2}, p4{0, 1, 2, 3};
        std::shuffle(p3.begin(), p3.end(), rng);
        std::shuffle(p4.begin(), p4.end(), rng);
        CHECK(corrected_rand(relabel(x, p3), y) == doctest::Approx(corrected_rand(x, y)).epsilon(1e-12));
        CHECK(corrected_rand(x, relabel(y, p4)) == doctest::Approx(corrected_rand(x, y)).epsilon(1e-12));
        CHECK(variation_of_information(relabel(x, p3), relabel(y, p4)) ==
              doctest::Approx(variation_of_information(x, y)).epsilon(1e-12));
        CHECK(variation_of_information(x, y) == doctest::Approx(variation_of_information(y, x)).epsilon(1e-12));
        CHECK(variation_of_information(x, z) <= variation_of_information(x, y) + variation_of_information(y, z) + 1e-12);
        CHECK(variation_of_information(x, y) >= 0.0);
    }

    // pooled over cells, with a per-time breakdown
    const auto u = random_partition(8, 3, 3, rng);
    const auto v = random_partition(8, 3, 3, rng);
    const auto cr = corrected_rand_by_time(u, v);
    const auto vi = variation_of_information_by_time(u, v);
    REQUIRE(cr.size() == 3u);
    for (int t = 0; t < 3; ++t) {
        CHECK(cr[t] == doctest::Approx(corrected_rand(u.col(t), v.col(t))).epsilon(1e-14));
        CHECK(vi[t] == doctest::Approx(variation_of_information(u.col(t), v.col(t))).epsilon(1e-14));
    }
}

TEST_CASE("modularity")
{
    // two disjoint single edges, communities = the pairs
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 4);
    y(0, 1) = y(1, 0) = y(2, 3) = y(3, 2) = 1.0;
    Eigen::VectorXi z(4);
    z << 0, 0, 1, 1;
    CHECK(modularity(y, z) == doctest::Approx(0.75).epsilon(1e-15));
    // direction is absorbed by the symmetrization
    Eigen::MatrixXd yd = Eigen::MatrixXd::Zero(4, 4);
    yd(0, 1) = yd(3, 2) = 1.0;
    CHECK(modularity(yd, z) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(modularity(yd.transpose(), z) == doctest::Approx(modularity(yd, z)).epsilon(1e-15));
    Eigen::VectorXi zr(4);
    zr << 5, 5, 2, 2;
    CHECK(modularity(y, zr) == modularity(y, z));
    CHECK_THROWS_AS(modularity(Eigen::MatrixXd::Zero(4, 4), z), UndefinedMetric);

    // five disjoint 20-cliques: the i != j sum gives 1 - 5 * 20 * 19 * 19^2 / 1900^2 = 0.81
    Eigen::MatrixXd cl = Eigen::MatrixXd::Zero(100, 100);
    Eigen::VectorXi zc(100);
    for (int i = 0; i < 100; ++i) {
        zc(i) = i / 20;
        for (int j = 0; j < 100; ++j)
            if (i != j && i / 20 == j / 20) cl(i, j) = 1.0;
    }
    CHECK(modularity(cl, zc) == doctest::Approx(0.81).epsilon(1e-13));

    // directed Erdos-Renyi with random equal communities: near zero
    RngStream rng(3, 0);
    double total = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::MatrixXd er = Eigen::MatrixXd::Zero(100, 100);
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j)
                if (i != j && rng.uniform() < 0.22) er(i, j) = 1.0;
        std::vector<int> lab(100);
        for (int i = 0; i < 100; ++i) lab[i] = i % 6;
        std::shuffle(lab.begin(), lab.end(), rng);
        total += modularity(er, Eigen::Map<Eigen::VectorXi>(lab.data(), 100));
    }
    CHECK(std::abs(total / 50.0) < 0.01);
}

TEST_CASE("co-assignment")
{
    std::vector<Eigen::VectorXi> draws(4, Eigen::VectorXi(4));
    draws[0] << 0, 0, 1, 1;
    draws[1] << 1, 1, 0, 0;
    draws[2] << 0, 1, 0, 1;
    draws[3] << 2, 2, 2, 0;
    const Eigen::MatrixXd c = coassignment_probs(draws);
    Eigen::MatrixXd hand(4, 4);
    hand << 1.0, 0.75, 0.5, 0.0,
            0.75, 1.0, 0.25, 0.25,
            0.5, 0.25, 1.0, 0.5,
            0.0, 0.25, 0.5, 1.0;
    CHECK((c - hand).cwiseAbs().maxCoeff() < 1e-15);

    // relabeling any draw leaves the matrix unchanged
    auto relabeled = draws;
    relabeled[2] = relabeled[2].unaryExpr([](int v) { return 7 - v; });
    CHECK(coassignment_probs(relabeled) == c);

    // a single shared partition gives its 0/1 pattern
    std::vector<Eigen::VectorXi> same(3, draws[0]);
    const Eigen::MatrixXd s = coassignment_probs(same);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(s(i, j) == (draws[0](i) == draws[0](j) ? 1.0 : 0.0));

    // over a chain, at one time point
    DistanceSamples ds;
    for (const auto& d : draws) {
        DistanceDraw dd;
        dd.state = LatentState(4, 2, 2);
        dd.state.Z.col(0).setZero();
        dd.state.Z.col(1) = d;
        ds.draws.push_back(dd);
    }
    CHECK(coassignment_probs(ds, 1) == c);
    CHECK(coassignment_probs(ds, 0) == Eigen::MatrixXd::Ones(4, 4));
    CHECK_THROWS_AS(coassignment_probs(DistanceSamples{}, 0), InvalidInput);
}

TEST_CASE("one-step-ahead: single cluster with lambda near 1")
{
    // X_{i,T+1} ~ N(mu, s^2 I_2) independently, so ||X_i - X_j|| is Rayleigh with
    // scale sqrt(2) s and P_ij = int sigmoid(alpha - r) Rayleigh(r) dr.
    const int n = 5;
    const double s2 = 0.3, alpha = 0.8;
    DistanceDraw d;
    d.state = LatentState(n, 2, 2);
    for (auto& x : d.state.X) x.setRandom();
    d.state.Z.setZero();
    d.params.lambda = 1.0 - 1e-12;
    d.params.mu = {Eigen::VectorXd::Constant(2, 0.4)};
    d.params.sigma = {s2 * Eigen::MatrixXd::Identity(2, 2)};
    d.params.tau2 = 1.0;
    d.params.gamma = Eigen::VectorXd::Ones(2);
    d.params.beta0 = Eigen::VectorXd::Ones(1);
    d.params.beta = Eigen::MatrixXd::Ones(1, 1);
    d.params.lik = Logistic{alpha};
    DistanceSamples ds;
    ds.draws.push_back(d);

    const double sc2 = 2.0 * s2;
    double oracle = 0.0;
    const int m = 20000;
    const double hi = 12.0 * std::sqrt(sc2), h = hi / m;
    for (int k = 0; k <= m; ++k) {
        const double r = k * h;
        const double f = sigmoid(alpha - r) * r / sc2 * std::exp(-r * r / (2.0 * sc2));
        oracle += f * (k == 0 || k == m ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    oracle *= h / 3.0;

    RngStream rng(4, 0);
    const int reps = 40000;
    const Eigen::MatrixXd P = one_step_ahead_probs(ds, true, rng, reps);
    for (int i = 0; i < n; ++i) {
        CHECK(P(i, i) == 0.0);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            CHECK(P(i, j) > 0.0);
            CHECK(P(i, j) < 1.0);
            CHECK(std::abs(P(i, j) - oracle) < 4.0 * 0.25 / std::sqrt(reps));
        }
    }

    RngStream a(5, 0), b(5, 0);
    CHECK(one_step_ahead_probs(ds, true, a, 10) == one_step_ahead_probs(ds, true, b, 10));

    DistanceSamples pl = ds;
    pl.draws[0].params.lik = PlackettLuce{Eigen::VectorXd::Constant(n, 1.0 / n)};
    CHECK_THROWS_AS(one_step_ahead_probs(pl, true, rng), UnsupportedLikelihood);
    CHECK_THROWS_AS(one_step_ahead_probs(DistanceSamples{}, true, rng), InvalidInput);
}

TEST_CASE("in-sample AUC and VB co-assignment on a well-separated network")
{
    SimConfig cfg;
    cfg.geometry = Geometry::Projection;
    cfg.n = 30;
    cfg.T = 4;
    cfg.G = 2;
    cfg.seed = 12;
    cfg.alpha = -2.5;
    cfg.communities = {0, 3}; // directions 120 degrees apart
    const auto sim = simulate_projection(cfg);
    RngStream rng(6, 0);
    VBConfig vc;
    vc.restarts = 2;
    const auto post = vb_fit_projection(sim.net, 2, 3, ProjectionHyperparams{}, vc, rng);
    CHECK(insample_auc(post, sim.net) >= 0.95);

    const Eigen::MatrixXd c = coassignment_probs(post, 2);
    CHECK((c.diagonal().array() == 1.0).all());
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            double e = 0.0;
            for (int g = 0; g < 2; ++g) e += post.z[i].marginals(g, 2) * post.z[j].marginals(g, 2);
            CHECK(c(i, j) == doctest::Approx(e).epsilon(1e-14));
        }
    }

    const Eigen::MatrixXd P = one_step_ahead_probs(post, rng, 50);
    for (int i = 0; i < cfg.n; ++i)
        for (int j = 0; j < cfg.n; ++j)
            if (i != j) CHECK((P(i, j) > 0.0 && P(i, j) < 1.0));
}
