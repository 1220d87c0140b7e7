#include "dlsc/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

#include "dlsc/distance_sampler.hpp"
#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/hmm.hpp"
#include "dlsc/projection_gibbs.hpp"

namespace dlsc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double binary_loglik_from_probs(const DynamicNetwork& net, const std::vector<Eigen::MatrixXd>& probs)
{
    double total = 0.0;
    for (int t = 0; t < net.T(); ++t) {
        const auto& Y = net.adjacency(t);
        for (int i = 0; i < net.n(); ++i) {
            for (int j = net.directed() ? 0 : i + 1; j < net.n(); ++j) {
                if (i == j) continue;
                const double p = std::clamp(probs[t](i, j), 1e-300, 1.0 - 1e-16);
                total += Y(i, j) > 0.0 ? std::log(p) : std::log1p(-p);
            }
        }
    }
    return total;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& Xt)
{
    const auto n = Xt.cols();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index j = 0; j < n; ++j) D.col(j) = (Xt.colwise() - Xt.col(j)).colwise().norm().transpose();
    return D;
}

void require_draws(std::size_t k)
{
    if (k < kMinDicDraws) throw InvalidInput("DIC needs at least 100 post-burn-in draws");
}

void fill_bic(FitSummary& f)
{
    const BicParts b = bic_components(f.loglik_at_map, f.dim_lik, f.edge_total, f.latent_marginal_loglik,
                                      f.dim_prior, f.nT);
    f.bic1 = b.bic1;
    f.bic2 = b.bic2;
    f.bic = b.bic;
}

long edge_count(const DynamicNetwork& net)
{
    // sum of y_ijt over ordered pairs; rank payloads count one choice per alter
    if (!net.is_binary()) return static_cast<long>(net.n()) * (net.n() - 1) * net.T();
    return net.edge_total();
}

} // namespace

BicParts bic_components(double loglik_map, int dim_lik, long edge_total, double latent_loglik, int dim_prior,
                        long nT)
{
    if (edge_total < 1 || nT < 1) throw InvalidInput("BIC needs positive edge and actor-time counts");
    if (dim_lik < 0 || dim_prior < 0) throw InvalidInput("BIC dimensions must be nonnegative");
    BicParts b;
    b.bic1 = 2.0 * loglik_map - dim_lik * std::log(static_cast<double>(edge_total));
    b.bic2 = 2.0 * latent_loglik - dim_prior * std::log(static_cast<double>(nT));
    b.bic = b.bic1 + b.bic2;
    return b;
}

double latent_marginal_loglik(const LatentState& xhat, const DistanceParams& params)
{
    const int G = params.G();
    const int T = xhat.T();
    std::vector<GaussianFactor> f;
    for (const auto& s : params.sigma) f.emplace_back(s);
    ChainLogWeights w;
    w.log_init = params.beta0.array().log();
    w.log_trans = params.beta.array().log();
    w.log_emit.resize(G, T);
    double total = 0.0;
    for (int i = 0; i < xhat.n(); ++i) {
        for (int t = 0; t < T; ++t) {
            const Eigen::VectorXd prev = t > 0 ? Eigen::VectorXd(xhat.x(i, t - 1)) : Eigen::VectorXd();
            for (int k = 0; k < G; ++k) {
                w.log_emit(k, t) = distance_emission_logpdf(params, f[k], k, xhat.x(i, t), t > 0 ? &prev : nullptr);
            }
        }
        total += chain_log_normalizer(w);
    }
    return total;
}

double latent_marginal_loglik(const LatentState& xhat, const ProjectionParams& params)
{
    const int G = params.G();
    const int T = xhat.T();
    ChainLogWeights w;
    w.log_init = params.beta0.array().log();
    w.log_trans = params.beta.array().log();
    w.log_emit.resize(G, T);
    double total = 0.0;
    for (int i = 0; i < xhat.n(); ++i) {
        for (int t = 0; t < T; ++t) {
            for (int k = 0; k < G; ++k) {
                w.log_emit(k, t) = spherical_logpdf(xhat.x(i, t), params.r(i) * params.u[k], params.tau(i));
            }
        }
        total += chain_log_normalizer(w);
    }
    return total;
}

double dic_from_trace(std::span<const double> logliks, double plugin_loglik)
{
    if (logliks.empty()) throw InvalidInput("DIC needs at least one draw");
    const double mean = std::accumulate(logliks.begin(), logliks.end(), 0.0) / logliks.size();
    const double pd = 2.0 * (plugin_loglik - mean);
    return -2.0 * mean + pd;
}

double dic(const DistanceSamples& samples, const DynamicNetwork& net)
{
    require_draws(samples.size());
    const int T = net.T();
    const int n = net.n();
    const double k = static_cast<double>(samples.size());
    std::vector<double> ll;
    ll.reserve(samples.size());
    for (const auto& d : samples.draws) ll.push_back(d.loglik);

    double plugin = 0.0;
    if (net.is_binary()) {
        std::vector<Eigen::MatrixXd> probs(T, Eigen::MatrixXd::Zero(n, n));
        for (const auto& d : samples.draws) {
            for (int t = 0; t < T; ++t) probs[t] += distance_edge_probs(d.state.X[t], d.params.lik, net.directed()) / k;
        }
        plugin = binary_loglik_from_probs(net, probs);
    } else {
        std::vector<Eigen::MatrixXd> dist(T, Eigen::MatrixXd::Zero(n, n));
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        for (const auto& d : samples.draws) {
            for (int t = 0; t < T; ++t) dist[t] += pairwise_distances(d.state.X[t]) / k;
            s += std::get<PlackettLuce>(d.params.lik).s / k;
        }
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < n; ++i) plugin += rank_loglik_plackett_luce(net.ordering(t, i), s, dist[t].col(i));
        }
    }
    return dic_from_trace(ll, plugin);
}

double dic(const ProjectionSamples& samples, const DynamicNetwork& net)
{
    require_draws(samples.size());
    const int T = net.T();
    const int n = net.n();
    const double k = static_cast<double>(samples.size());
    std::vector<double> ll;
    std::vector<Eigen::MatrixXd> probs(T, Eigen::MatrixXd::Zero(n, n));
    for (const auto& d : samples.draws) {
        ll.push_back(d.loglik);
        for (int t = 0; t < T; ++t) {
            probs[t] += projection_edge_probs(d.state.X[t], d.params.alpha, d.params.s, net.directed()) / k;
        }
    }
    return dic_from_trace(ll, binary_loglik_from_probs(net, probs));
}

FitSummary summarize_fit(const DynamicNetwork& net, const DistanceSamples& samples, bool with_dic)
{
    const DistanceDraw& m = map_extract(samples);
    FitSummary f;
    f.geometry = Geometry::Distance;
    f.engine = "mcmc";
    f.G = m.params.G();
    f.loglik_at_map = m.loglik;
    f.latent_marginal_loglik = latent_marginal_loglik(m.state, m.params);
    f.dim_lik = distance_lik_dim(m.params.lik, net.n());
    f.dim_prior = distance_prior_dim(f.G, m.params.p());
    f.edge_total = edge_count(net);
    f.nT = static_cast<long>(net.n()) * net.T();
    f.dic = with_dic ? dic(samples, net) : kNaN;
    fill_bic(f);
    return f;
}

FitSummary summarize_fit(const DynamicNetwork& net, const ProjectionSamples& samples, bool with_dic)
{
    const ProjectionDraw& m = map_extract(samples);
    FitSummary f;
    f.geometry = Geometry::Projection;
    f.engine = "mcmc";
    f.G = m.params.G();
    f.loglik_at_map = m.loglik;
    f.latent_marginal_loglik = latent_marginal_loglik(m.state, m.params);
    f.dim_lik = projection_lik_dim(net.n(), net.directed());
    f.dim_prior = projection_prior_dim(f.G, m.params.p(), net.n());
    f.edge_total = edge_count(net);
    f.nT = static_cast<long>(net.n()) * net.T();
    f.dic = with_dic ? dic(samples, net) : kNaN;
    fill_bic(f);
    return f;
}

FitSummary summarize_fit(const DynamicNetwork& net, const VBPosterior& post)
{
    const LatentState st = post.point_state();
    const ProjectionParams params = post.point_params();
    FitSummary f;
    f.geometry = Geometry::Projection;
    f.engine = "vb";
    f.G = post.G();
    f.loglik_at_map = loglik_projection(net, st, params.alpha, params.s);
    f.latent_marginal_loglik = latent_marginal_loglik(st, params);
    f.dim_lik = projection_lik_dim(net.n(), net.directed());
    f.dim_prior = projection_prior_dim(f.G, post.p(), net.n());
    f.edge_total = edge_count(net);
    f.nT = static_cast<long>(net.n()) * net.T();
    f.dic = kNaN;
    fill_bic(f);
    return f;
}

int default_thread_count()
{
    if (const char* env = std::getenv("DLSC_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0) return k;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<FitSummary> rank_winners(const std::vector<FitSummary>& table)
{
    std::vector<FitSummary> winners;
    for (Geometry g : {Geometry::Distance, Geometry::Projection}) {
        const FitSummary* best = nullptr;
        for (const auto& f : table) {
            if (f.geometry != g || !f.ok) continue;
            if (!best || f.bic > best->bic) best = &f;
        }
        if (best) winners.push_back(*best);
    }
    std::stable_sort(winners.begin(), winners.end(), [](const FitSummary& a, const FitSummary& b) {
        if (std::isnan(a.dic)) return false;
        if (std::isnan(b.dic)) return true;
        return a.dic < b.dic;
    });
    return winners;
}

SelectionResult select_model(const DynamicNetwork& net, int g_lo, int g_hi, const SelectionBudget& budget,
                             std::uint64_t seed)
{
    if (g_lo < 1 || g_hi < g_lo) throw ConfigError("G range must be nonempty and positive");
    if (budget.geometries.empty()) throw ConfigError("no geometry to fit");
    struct Cell
    {
        Geometry geometry;
        int G;
    };
    std::vector<Cell> cells;
    for (Geometry g : budget.geometries) {
        for (int k = g_lo; k <= g_hi; ++k) cells.push_back({g, k});
    }

    SelectionResult result;
    result.table.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            FitSummary& f = result.table[c];
            f.geometry = cells[c].geometry;
            f.G = cells[c].G;
            RngStream rng(seed, c + 1);
            try {
                if (cells[c].geometry == Geometry::Distance) {
                    const auto s = mh_within_gibbs_fit(net, cells[c].G, budget.p_distance, budget.distance_kind,
                                                       budget.distance_hyper, budget.distance_chain, rng);
                    f = summarize_fit(net, s);
                } else {
                    const auto q = vb_fit_projection(net, cells[c].G, budget.p_projection, budget.projection_hyper,
                                                     budget.projection_vb, rng);
                    f = summarize_fit(net, q);
                }
            } catch (const std::exception& e) {
                f.ok = false;
                f.error = e.what();
                f.dic = kNaN;
            }
        }
    };
    const int threads = std::min<int>(budget.threads > 0 ? budget.threads : default_thread_count(),
                                      static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // DIC for the projection winner comes from a Gibbs chain at its G.
    FitSummary* best = nullptr;
    for (auto& f : result.table) {
        if (f.geometry == Geometry::Projection && f.ok && (!best || f.bic > best->bic)) best = &f;
    }
    if (best) {
        RngStream rng(seed, cells.size() + 1);
        try {
            const auto s = gibbs_fit_projection(net, best->G, budget.p_projection, budget.projection_hyper,
                                                budget.projection_chain, rng);
            best->dic = dic(s, net);
        } catch (const std::exception& e) {
            best->error = std::string("DIC chain failed: ") + e.what();
        }
    }
    result.winners = rank_winners(result.table);
    return result;
}

} // namespace dlsc
