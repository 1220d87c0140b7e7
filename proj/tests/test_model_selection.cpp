#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dlsc/distance_model.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/selection.hpp"
#include "dlsc/simulation.hpp"

#include "support/oracles.hpp"

using namespace dlsc;

using namespace oracle;

TEST_CASE("BIC components")
{
    const auto b = bic_components(-100.0, 2, 100, -40.0, 5, 30);
    CHECK(b.bic1 == doctest::Approx(-209.21034037197618).epsilon(1e-14));
    CHECK(b.bic2 == doctest::Approx(-80.0 - 5.0 * std::log(30.0)).epsilon(1e-15));
    CHECK(b.bic == b.bic1 + b.bic2);

    const auto z = bic_components(-12.5, 0, 7, 3.25, 0, 9);
    CHECK(z.bic == 2.0 * (-12.5 + 3.25));

    const auto d1 = bic_components(-50.0, 3, 40, -20.0, 7, 60);
    const auto d2 = bic_components(-50.0, 3, 40, -20.0, 7, 120);
    CHECK(d2.bic2 - d1.bic2 == doctest::Approx(-7.0 * std::log(2.0)).epsilon(1e-13));
    CHECK(d2.bic1 == d1.bic1);

    CHECK_THROWS_AS(bic_components(-1.0, 1, 0, 0.0, 1, 5), InvalidInput);
    CHECK_THROWS_AS(bic_components(-1.0, 1, 5, 0.0, 1, 0), InvalidInput);
    CHECK_THROWS_AS(bic_components(-1.0, -1, 5, 0.0, 1, 5), InvalidInput);
}

TEST_CASE("latent marginal: forward recursion equals path enumeration")
{
    RngStream rng(1, 0);
    // every (T, G) with G^T <= 3^5
    for (int G = 1; G <= 3; ++G) {
        for (int T = 1; T <= 7; ++T) {
            double paths = std::pow(G, T);
            if (paths > 243.0) continue;
            for (int rep = 0; rep < 100; ++rep) {
                const auto dp = random_distance(G, 2, rng);
                const auto st = random_state(1, T, 2, rng);
                const double e = enumerate_paths(st, dp, G, [](const LatentState& s, const DistanceParams& p) {
                    return joint_logdensity_xz(s, p);
                });
                const double r = latent_marginal_loglik(st, dp);
                REQUIRE(std::abs(r - e) <= 1e-10 * std::abs(e));

                const auto pp = random_projection(1, G, 3, rng);
                const auto sp = random_state(1, T, 3, rng);
                const double ep = enumerate_paths(sp, pp, G, [](const LatentState& s, const ProjectionParams& p) {
                    return joint_logdensity_xz_proj(s, p);
                });
                REQUIRE(std::abs(latent_marginal_loglik(sp, pp) - ep) <= 1e-10 * std::abs(ep));
            }
        }
    }
    // several actors: the value is the sum over actors
    const auto dp = random_distance(2, 2, rng);
    const auto st = random_state(2, 3, 2, rng);
    const double e = enumerate_paths(st, dp, 2, [](const LatentState& s, const DistanceParams& p) {
        return joint_logdensity_xz(s, p);
    });
    CHECK(latent_marginal_loglik(st, dp) == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("latent marginal: G = 1 and label permutations")
{
    RngStream rng(2, 0);
    const auto d1 = random_distance(1, 2, rng);
    auto st = random_state(4, 3, 2, rng);
    CHECK(latent_marginal_loglik(st, d1) == doctest::Approx(joint_logdensity_xz(st, d1)).epsilon(1e-12));

    const auto dp = random_distance(3, 2, rng);
    const std::vector<int> perm{2, 0, 1}; // new label of old label g
    DistanceParams q = dp;
    for (int g = 0; g < 3; ++g) {
        q.mu[perm[g]] = dp.mu[g];
        q.sigma[perm[g]] = dp.sigma[g];
        q.beta0(perm[g]) = dp.beta0(g);
        for (int h = 0; h < 3; ++h) q.beta(perm[g], perm[h]) = dp.beta(g, h);
    }
    CHECK(latent_marginal_loglik(st, q) == doctest::Approx(latent_marginal_loglik(st, dp)).epsilon(1e-12));

    const auto pp = random_projection(4, 3, 3, rng);
    ProjectionParams pq = pp;
    for (int g = 0; g < 3; ++g) {
        pq.u[perm[g]] = pp.u[g];
        pq.beta0(perm[g]) = pp.beta0(g);
        for (int h = 0; h < 3; ++h) pq.beta(perm[g], perm[h]) = pp.beta(g, h);
    }
    const auto sp = random_state(4, 3, 3, rng);
    CHECK(latent_marginal_loglik(sp, pq) == doctest::Approx(latent_marginal_loglik(sp, pp)).epsilon(1e-12));
}

TEST_CASE("DIC arithmetic")
{
    const std::vector<double> same(5, -42.0);
    CHECK(dic_from_trace(same, -42.0) == doctest::Approx(84.0).epsilon(1e-15));

    // three draws with logliks -10, -12, -14 and plug-in -9:
    // mean -12, p_D = 2 (-9 + 12) = 6, DIC = 24 + 6 = 30
    const std::vector<double> three{-10.0, -12.0, -14.0};
    CHECK(dic_from_trace(three, -9.0) == doctest::Approx(30.0).epsilon(1e-15));

    std::vector<double> shifted = three;
    for (auto& v : shifted) v += 7.5;
    CHECK(dic_from_trace(shifted, -9.0 + 7.5) == doctest::Approx(30.0 - 15.0).epsilon(1e-14));
    CHECK_THROWS_AS(dic_from_trace(std::vector<double>{}, 0.0), InvalidInput);
}

TEST_CASE("DIC of a degenerate chain")
{
    SimConfig cfg;
    cfg.geometry = Geometry::Distance;
    cfg.n = 8;
    cfg.T = 2;
    cfg.G = 2;
    cfg.seed = 5;
    const auto sim = simulate_distance(cfg);
    DistanceDraw d;
    d.state = sim.truth;
    d.params = sim.params;
    d.loglik = distance_loglik(sim.net, d.state, d.params.lik);
    DistanceSamples s;
    s.draws.assign(99, d);
    CHECK_THROWS_AS(dic(s, sim.net), InvalidInput);
    s.draws.push_back(d);
    CHECK(dic(s, sim.net) == doctest::Approx(-2.0 * d.loglik).epsilon(1e-10));

    cfg.geometry = Geometry::Projection;
    cfg.p = 3;
    const auto ps = simulate_projection(cfg);
    ProjectionDraw pd;
    pd.state = ps.truth;
    pd.params = ps.params;
    pd.loglik = loglik_projection(ps.net, pd.state, pd.params.alpha, pd.params.s);
    ProjectionSamples pss;
    pss.draws.assign(100, pd);
    CHECK(dic(pss, ps.net) == doctest::Approx(-2.0 * pd.loglik).epsilon(1e-10));
}

TEST_CASE("dimension counts")
{
    CHECK(distance_prior_dim(4, 2) == 1 + 8 + 12 + 3 + 12);
    CHECK(distance_lik_dim(Logistic{}, 30) == 1);
    CHECK(distance_lik_dim(DegreeCorrected{}, 30) == 2 + 29);
    CHECK(distance_lik_dim(PlackettLuce{}, 30) == 29);
    CHECK(projection_prior_dim(4, 3, 30) == 90 + 8 + 3 + 12);
}

TEST_CASE("model selection: table, winners and re-ranking")
{
    SimConfig cfg;
    cfg.geometry = Geometry::Projection;
    cfg.n = 16;
    cfg.T = 3;
    cfg.G = 2;
    cfg.seed = 9;
    const auto sim = simulate_projection(cfg);
    SelectionBudget budget;
    budget.distance_chain.iterations = 300;
    budget.distance_chain.burn_in = 100;
    budget.distance_chain.thin = 2;
    budget.projection_chain = budget.distance_chain;
    budget.projection_vb.max_sweeps = 50;
    budget.projection_vb.restarts = 2;
    budget.threads = 1;
    const auto res = select_model(sim.net, 1, 3, budget, 77);
    REQUIRE(res.table.size() == 6u);
    for (const auto& f : res.table) {
        CHECK(f.ok);
        CHECK(f.bic == doctest::Approx(f.bic1 + f.bic2).epsilon(1e-14));
        CHECK(f.dim_lik >= 0);
        CHECK(f.dim_prior >= 0);
        CHECK(f.nT == 48);
        CHECK(f.edge_total == sim.net.edge_total());
    }
    REQUIRE(res.winners.size() == 2u);
    CHECK(res.winners[0].dic <= res.winners[1].dic);
    for (const auto& w : res.winners) {
        for (const auto& f : res.table)
            if (f.geometry == w.geometry) CHECK(f.bic <= w.bic);
    }
    const auto again = rank_winners(res.table);
    REQUIRE(again.size() == res.winners.size());
    for (std::size_t k = 0; k < again.size(); ++k) {
        CHECK(again[k].geometry == res.winners[k].geometry);
        CHECK(again[k].G == res.winners[k].G);
        CHECK(again[k].bic == res.winners[k].bic);
    }

    // same seed, same table
    const auto rerun = select_model(sim.net, 1, 3, budget, 77);
    for (std::size_t k = 0; k < rerun.table.size(); ++k) CHECK(rerun.table[k].bic == res.table[k].bic);

    // a singleton range reduces to a DIC comparison
    const auto single = select_model(sim.net, 2, 2, budget, 78);
    REQUIRE(single.winners.size() == 2u);
    CHECK(single.winners[0].G == 2);
    CHECK(single.winners[0].dic <= single.winners[1].dic);

    // an impossible cell is recorded, not thrown
    const auto wide = select_model(sim.net, 16, 17, budget, 79);
    bool any_failed = false;
    for (const auto& f : wide.table) any_failed |= !f.ok && !f.error.empty();
    CHECK(any_failed);
    CHECK_THROWS_AS(select_model(sim.net, 3, 2, budget, 1), ConfigError);
}
