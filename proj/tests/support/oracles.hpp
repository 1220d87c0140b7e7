#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance run.

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include "dlsc/distance_model.hpp"
#include "dlsc/distance_sampler.hpp"
#include "dlsc/distributions.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_gibbs.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/rng.hpp"

namespace oracle {

using namespace dlsc;

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Eigen::VectorXd random_simplex(int k, RngStream& rng)
{
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = rng.exponential();
    return v / v.sum();
}

inline Eigen::VectorXd random_unit(int p, RngStream& rng)
{
    Eigen::VectorXd v(p);
    for (int l = 0; l < p; ++l) v(l) = rng.normal();
    return v / v.norm();
}

inline DistanceParams random_distance(int G, int p, RngStream& rng)
{
    DistanceParams prm;
    prm.lambda = 0.1 + 0.8 * rng.uniform();
    prm.tau2 = 1.0;
    prm.gamma = Eigen::VectorXd::Ones(p);
    prm.beta0 = random_simplex(G, rng);
    prm.beta = Eigen::MatrixXd(G, G);
    for (int g = 0; g < G; ++g) {
        Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(p, p, [&] { return rng.normal(); });
        prm.mu.push_back(Eigen::VectorXd::NullaryExpr(p, [&] { return rng.normal(); }));
        prm.sigma.push_back(a * a.transpose() + 0.2 * Eigen::MatrixXd::Identity(p, p));
        prm.beta.row(g) = random_simplex(G, rng).transpose();
    }
    return prm;
}

inline ProjectionParams random_projection(int n, int G, int p, RngStream& rng)
{
    ProjectionParams prm;
    prm.s = Eigen::VectorXd::Ones(n);
    prm.r = Eigen::VectorXd(n);
    prm.tau = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        prm.r(i) = 0.2 + 2.0 * rng.uniform();
        prm.tau(i) = 0.5 + 3.0 * rng.uniform();
    }
    for (int g = 0; g < G; ++g) {
        Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(p, [&] { return rng.normal(); });
        prm.u.push_back(u / u.norm());
    }
    prm.beta0 = random_simplex(G, rng);
    prm.beta = Eigen::MatrixXd(G, G);
    for (int g = 0; g < G; ++g) prm.beta.row(g) = random_simplex(G, rng).transpose();
    return prm;
}

inline LatentState random_state(int n, int T, int p, RngStream& rng)
{
    LatentState s(n, T, p);
    for (auto& x : s.X)
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = 1.5 * rng.normal();
    s.Z.setZero();
    return s;
}

// log sum over every label path of exp(joint), by enumeration
template <typename Params, typename Joint>
double enumerate_paths(LatentState st, const Params& prm, int G, Joint joint)
{
    const int n = st.n(), T = st.T();
    long paths = 1;
    for (int k = 0; k < n * T; ++k) paths *= G;
    std::vector<double> terms;
    terms.reserve(paths);
    for (long code = 0; code < paths; ++code) {
        long c = code;
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t) {
                st.Z(i, t) = static_cast<int>(c % G);
                c /= G;
            }
        terms.push_back(joint(st, prm));
    }
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double v : terms) s += std::exp(v - m);
    return m + std::log(s);
}

// Geweke joint-distribution test: marginal-conditional draws against
// successive-conditional draws (sampler sweep, then fresh data). The
// successive standard error comes from batch means.
inline constexpr int kGewekeStats = 9;

struct GewekeResult
{
    std::array<double, kGewekeStats> marginal{};
    std::array<double, kGewekeStats> successive{};
    std::array<double, kGewekeStats> z{};

    double max_abs_z() const
    {
        double m = 0.0;
        for (double v : z) m = std::max(m, std::abs(v));
        return m;
    }
};

template <typename Prior, typename Data, typename Stats, typename Sweep>
GewekeResult geweke(int M, int S, Prior prior_draw, Data draw_data, Stats stats, Sweep make_sampler,
                    const DynamicNetwork& empty)
{
    GewekeResult res;
    std::array<double, kGewekeStats> v1{};
    {
        auto net = empty;
        for (int r = 0; r < M; ++r) {
            auto [prm, st] = prior_draw();
            draw_data(net, prm, st);
            const auto g = stats(net, prm, st);
            for (int k = 0; k < kGewekeStats; ++k) {
                res.marginal[k] += g[k];
                v1[k] += g[k] * g[k];
            }
        }
        for (int k = 0; k < kGewekeStats; ++k) {
            res.marginal[k] /= M;
            v1[k] = v1[k] / M - res.marginal[k] * res.marginal[k];
        }
    }

    const int batches = 100, per = S / batches;
    std::vector<std::array<double, kGewekeStats>> bm(batches, std::array<double, kGewekeStats>{});
    {
        auto net = empty;
        auto [prm, st] = prior_draw();
        draw_data(net, prm, st);
        auto sampler = make_sampler(net, st, prm);
        for (int r = 0; r < S; ++r) {
            sampler.sweep();
            draw_data(net, sampler.params(), sampler.state());
            const auto g = stats(net, sampler.params(), sampler.state());
            for (int k = 0; k < kGewekeStats; ++k) {
                res.successive[k] += g[k];
                bm[r / per][k] += g[k] / per;
            }
        }
        for (int k = 0; k < kGewekeStats; ++k) res.successive[k] /= S;
    }
    for (int k = 0; k < kGewekeStats; ++k) {
        double bv = 0.0;
        for (const auto& b : bm) bv += (b[k] - res.successive[k]) * (b[k] - res.successive[k]);
        bv /= batches - 1.0;
        res.z[k] = (res.marginal[k] - res.successive[k]) / std::sqrt(v1[k] / M + bv / batches);
    }
    return res;
}

// Distance model, logistic likelihood, n=4, T=3, G=2, p=2, proper priors.
inline GewekeResult geweke_distance(int M = 40000, int S = 300000)
{
    const int n = 4, T = 3, G = 2, p = 2;
    DistanceHyperparams hyper;
    hyper.nu_lambda = 0.5;
    hyper.xi_lambda = 0.04;
    hyper.a = 3.0;
    hyper.b = 2.0;
    hyper.c = 3.0;
    hyper.d = 3.0;
    hyper.lik_prior_var = 1.0;

    RngStream rng(12, 0);
    auto prior_draw = [&] {
        DistanceParams prm;
        do prm.lambda = hyper.nu_lambda + std::sqrt(hyper.xi_lambda) * rng.normal();
        while (!(prm.lambda > 0.0 && prm.lambda < 1.0));
        prm.tau2 = hyper.b / rng.gamma(hyper.a);
        prm.gamma = Eigen::VectorXd(p);
        for (int l = 0; l < p; ++l) prm.gamma(l) = rng.gamma(hyper.c) / hyper.d;
        prm.mu.assign(G, Eigen::VectorXd(p));
        prm.sigma.assign(G, Eigen::MatrixXd(p, p));
        prm.beta0 = random_simplex(G, rng);
        prm.beta = Eigen::MatrixXd(G, G);
        for (int g = 0; g < G; ++g) {
            for (int l = 0; l < p; ++l) prm.mu[g](l) = std::sqrt(prm.tau2) * rng.normal();
            prm.sigma[g] = sample_inverse_wishart(p + 1.0, prm.gamma.asDiagonal(), rng);
            prm.beta.row(g) = random_simplex(G, rng).transpose();
        }
        prm.lik = Logistic{std::sqrt(hyper.lik_prior_var) * rng.normal()};
        LatentState st(n, T, p);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < T; ++t) {
                const Eigen::VectorXd w = t == 0 ? prm.beta0 : Eigen::VectorXd(prm.beta.row(st.Z(i, t - 1)).transpose());
                double u = rng.uniform();
                int k = 0;
                while (k + 1 < G && (u -= w(k)) > 0.0) ++k;
                st.Z(i, t) = k;
                const Eigen::VectorXd mean =
                    t == 0 ? prm.mu[k] : Eigen::VectorXd(prm.lambda * prm.mu[k] + (1.0 - prm.lambda) * st.x(i, t - 1));
                const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(prm.sigma[k]).matrixL();
                Eigen::VectorXd e(p);
                for (int l = 0; l < p; ++l) e(l) = rng.normal();
                st.x(i, t) = mean + L * e;
            }
        }
        return std::pair{prm, st};
    };
    auto draw_data = [&](DynamicNetwork& net, const DistanceParams& prm, const LatentState& st) {
        const double alpha = std::get<Logistic>(prm.lik).alpha;
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double d = (st.x(i, t) - st.x(j, t)).norm();
                    net.set_edge(t, i, j, rng.uniform() < logistic(alpha - d));
                }
    };
    auto stats = [&](const DynamicNetwork& net, const DistanceParams& prm, const LatentState& st) {
        std::array<double, kGewekeStats> g{};
        g[0] = prm.lambda;
        g[1] = std::log(prm.tau2);
        g[2] = std::log(prm.gamma(0));
        g[3] = std::get<Logistic>(prm.lik).alpha;
        g[4] = std::log(prm.sigma[0](0, 0));
        double stay = 0.0, xs = 0.0, dens = 0.0;
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t) {
                if (t > 0) stay += st.Z(i, t) == st.Z(i, t - 1);
                xs += std::log1p(st.x(i, t).squaredNorm());
            }
        for (int t = 0; t < T; ++t) dens += net.density(t);
        g[5] = stay / (n * (T - 1.0));
        g[6] = xs / (n * T);
        g[7] = dens / T;
        g[8] = std::log1p(prm.mu[0].squaredNorm());
        return g;
    };
    auto make_sampler = [&](const DynamicNetwork& net, const LatentState& st, const DistanceParams& prm) {
        ChainConfig chain;
        chain.adapt = false;
        chain.x_step = 1.0;
        chain.lik_step = 0.5;
        return DistanceSampler(net, hyper, chain, st, prm, RngStream(12, 1));
    };
    return geweke(M, S, prior_draw, draw_data, stats, make_sampler, DynamicNetwork::binary(n, T, true));
}

// Projection model Gibbs sampler, n=4, T=3, G=2, p=2, proper priors.
inline GewekeResult geweke_projection(int M = 40000, int S = 200000)
{
    const int n = 4, T = 3, G = 2, p = 2;
    ProjectionHyperparams hyper;
    hyper.a2 = 3.0;
    hyper.b2 = 1.0;
    hyper.c = 1.0;
    hyper.b3 = 1.0;
    RngStream rng(6, 0);

    auto prior_draw = [&] {
        ProjectionParams prm;
        prm.alpha = std::sqrt(hyper.b3) * rng.normal();
        prm.s = Eigen::VectorXd(n);
        prm.r = Eigen::VectorXd(n);
        prm.tau = Eigen::VectorXd(n);
        for (int i = 0; i < n; ++i) {
            prm.tau(i) = hyper.b2 * rng.gamma(hyper.a2);
            prm.r(i) = rng.exponential() * hyper.c / prm.tau(i);
            prm.s(i) = rng.exponential();
        }
        for (int g = 0; g < G; ++g) prm.u.push_back(random_unit(p, rng));
        prm.beta0 = random_simplex(G, rng);
        prm.beta = Eigen::MatrixXd(G, G);
        for (int g = 0; g < G; ++g) prm.beta.row(g) = random_simplex(G, rng).transpose();
        LatentState st(n, T, p);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t) {
                const Eigen::VectorXd w = t == 0 ? prm.beta0 : Eigen::VectorXd(prm.beta.row(st.Z(i, t - 1)).transpose());
                int k = rng.uniform() < w(0) ? 0 : 1;
                st.Z(i, t) = k;
                for (int l = 0; l < p; ++l)
                    st.X[t](l, i) = prm.r(i) * prm.u[k](l) + rng.normal() / std::sqrt(prm.tau(i));
            }
        return std::pair{prm, st};
    };
    auto draw_data = [&](DynamicNetwork& net, const ProjectionParams& prm, const LatentState& st) {
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j)
                        net.set_edge(t, i, j,
                                     rng.uniform() < logistic(eta_projection(prm.alpha, prm.s(j), st.x(i, t), st.x(j, t))));
    };
    auto stats = [&](const DynamicNetwork& net, const ProjectionParams& prm, const LatentState& st) {
        std::array<double, kGewekeStats> g{};
        g[0] = prm.alpha;
        g[1] = std::log(prm.s(0));
        g[2] = std::log(prm.r(1));
        g[3] = std::log(prm.tau(2));
        g[4] = prm.u[0](0);
        double stay = 0.0, xs = 0.0, dens = 0.0;
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t) {
                if (t > 0) stay += st.Z(i, t) == st.Z(i, t - 1);
                xs += std::log1p(st.x(i, t).squaredNorm());
            }
        for (int t = 0; t < T; ++t) dens += net.density(t);
        g[5] = stay / (n * (T - 1.0));
        g[6] = xs / (n * T);
        g[7] = dens / T;
        g[8] = prm.beta0(0);
        return g;
    };
    auto make_sampler = [&](const DynamicNetwork& net, const LatentState& st, const ProjectionParams& prm) {
        return ProjectionSampler(net, hyper, st, prm, RngStream(6, 1));
    };
    return geweke(M, S, prior_draw, draw_data, stats, make_sampler, DynamicNetwork::binary(n, T, true));
}

} // namespace oracle
