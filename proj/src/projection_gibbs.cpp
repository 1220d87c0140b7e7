#include "dlsc/projection_gibbs.hpp"

#include <cmath>
#include <limits>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/hmm.hpp"
#include "dlsc/init.hpp"

namespace dlsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double receiver_scale(const ProjectionParams& params, bool directed, int j)
{
    return directed ? params.s(j) : 1.0;
}

Eigen::VectorXd unit(const Eigen::VectorXd& v)
{
    return v / v.norm();
}

} // namespace

PGAux make_pg_aux(int n, int T)
{
    return PGAux(static_cast<std::size_t>(T), Eigen::MatrixXd::Constant(n, n, 0.25));
}

void sample_projection_omega(const DynamicNetwork& net, const LatentState& state, const ProjectionParams& params,
                             PGAux& omega, RngStream& rng)
{
    const int n = net.n();
    const bool directed = net.directed();
    for (int t = 0; t < net.T(); ++t) {
        const Eigen::MatrixXd gram = state.X[t].transpose() * state.X[t];
        auto& w = omega[t];
        for (int i = 0; i < n; ++i) {
            for (int j = directed ? 0 : i + 1; j < n; ++j) {
                if (i == j) continue;
                w(i, j) = sample_polya_gamma(params.alpha + receiver_scale(params, directed, j) * gram(i, j), rng);
                if (!directed) w(j, i) = w(i, j);
            }
        }
    }
}

// X_it is Gaussian given everything else: the augmented likelihood is
// quadratic in X_it through every dyad it belongs to, as sender and receiver.
void sample_projection_x(const DynamicNetwork& net, LatentState& state, const ProjectionParams& params,
                         const PGAux& omega, RngStream& rng)
{
    const int n = net.n();
    const bool directed = net.directed();
    Eigen::VectorXd quad(n), lin(n);
    for (int t = 0; t < net.T(); ++t) {
        const auto& Y = net.adjacency(t);
        const auto& w = omega[t];
        auto& Xt = state.X[t];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) {
                    quad(j) = lin(j) = 0.0;
                } else if (directed) {
                    const double sj = params.s(j);
                    const double si = params.s(i);
                    quad(j) = w(i, j) * sj * sj + w(j, i) * si * si;
                    lin(j) = (Y(i, j) - 0.5 - w(i, j) * params.alpha) * sj +
                             (Y(j, i) - 0.5 - w(j, i) * params.alpha) * si;
                } else {
                    quad(j) = w(i, j);
                    lin(j) = Y(i, j) - 0.5 - w(i, j) * params.alpha;
                }
            }
            Eigen::MatrixXd prec = Xt * quad.asDiagonal() * Xt.transpose();
            prec.diagonal().array() += params.tau(i);
            const Eigen::VectorXd b =
                Xt * lin + params.tau(i) * params.r(i) * params.u[state.Z(i, t)];
            Xt.col(i) = sample_gaussian_canonical(prec, b, rng);
        }
    }
}

void sample_projection_z(LatentState& state, const ProjectionParams& params, RngStream& rng)
{
    const int G = params.G();
    const int T = state.T();
    ChainLogWeights w;
    w.log_init = params.beta0.array().log();
    w.log_trans = params.beta.array().log();
    w.log_emit.resize(G, T);
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < T; ++t) {
            for (int k = 0; k < G; ++k) {
                w.log_emit(k, t) = spherical_logpdf(state.x(i, t), params.r(i) * params.u[k], params.tau(i));
            }
        }
        state.Z.row(i) = sample_chain(w, rng).transpose();
    }
}

void sample_projection_u(const LatentState& state, ProjectionParams& params, RngStream& rng)
{
    const int p = params.p();
    std::vector<Eigen::VectorXd> m(params.G(), Eigen::VectorXd::Zero(p));
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < state.T(); ++t) m[state.Z(i, t)] += params.tau(i) * params.r(i) * state.x(i, t);
    }
    for (int g = 0; g < params.G(); ++g) params.u[g] = unit(sample_vmf(m[g], rng));
}

void sample_projection_r(const LatentState& state, ProjectionParams& params, const ProjectionHyperparams& hyper,
                         RngStream& rng)
{
    const double T = state.T();
    for (int i = 0; i < state.n(); ++i) {
        double proj = 0.0;
        for (int t = 0; t < state.T(); ++t) proj += params.u[state.Z(i, t)].dot(state.x(i, t));
        const double mean = (proj - 1.0 / hyper.c) / T;
        const double sd = 1.0 / std::sqrt(T * params.tau(i));
        params.r(i) = sample_truncated_normal(mean, sd, 0.0, kInf, rng);
    }
}

void sample_projection_tau(const LatentState& state, ProjectionParams& params,
                           const ProjectionHyperparams& hyper, RngStream& rng)
{
    const double shape = hyper.a2 + 1.0 + 0.5 * state.p() * state.T();
    for (int i = 0; i < state.n(); ++i) {
        double ss = 0.0;
        for (int t = 0; t < state.T(); ++t) {
            ss += (state.x(i, t) - params.r(i) * params.u[state.Z(i, t)]).squaredNorm();
        }
        const double rate = 1.0 / hyper.b2 + params.r(i) / hyper.c + 0.5 * ss;
        params.tau(i) = rng.gamma(shape) / rate;
    }
}

void sample_projection_s(const DynamicNetwork& net, const LatentState& state, ProjectionParams& params,
                         const PGAux& omega, RngStream& rng)
{
    if (!net.directed()) return;
    const int n = net.n();
    Eigen::VectorXd prec = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lin = Eigen::VectorXd::Constant(n, -1.0); // Exp(1) prior
    for (int t = 0; t < net.T(); ++t) {
        const Eigen::MatrixXd gram = state.X[t].transpose() * state.X[t];
        const auto& Y = net.adjacency(t);
        const auto& w = omega[t];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double a = gram(i, j);
                prec(j) += w(i, j) * a * a;
                lin(j) += (Y(i, j) - 0.5 - w(i, j) * params.alpha) * a;
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        params.s(j) = prec(j) > 0.0 ? sample_truncated_normal(lin(j) / prec(j), 1.0 / std::sqrt(prec(j)), 0.0, kInf, rng)
                                    : rng.exponential();
    }
}

void sample_projection_alpha(const DynamicNetwork& net, const LatentState& state, ProjectionParams& params,
                             const PGAux& omega, const ProjectionHyperparams& hyper, RngStream& rng)
{
    const int n = net.n();
    const bool directed = net.directed();
    double prec = 1.0 / hyper.b3;
    double lin = 0.0;
    for (int t = 0; t < net.T(); ++t) {
        const Eigen::MatrixXd gram = state.X[t].transpose() * state.X[t];
        const auto& Y = net.adjacency(t);
        const auto& w = omega[t];
        for (int i = 0; i < n; ++i) {
            for (int j = directed ? 0 : i + 1; j < n; ++j) {
                if (i == j) continue;
                prec += w(i, j);
                lin += Y(i, j) - 0.5 - w(i, j) * receiver_scale(params, directed, j) * gram(i, j);
            }
        }
    }
    params.alpha = lin / prec + rng.normal() / std::sqrt(prec);
}

void sample_projection_beta(const LatentState& state, ProjectionParams& params,
                            const ProjectionHyperparams& hyper, RngStream& rng)
{
    const int G = params.G();
    std::vector<double> first(G, hyper.beta_pseudo);
    std::vector<std::vector<double>> trans(G, std::vector<double>(G, hyper.beta_pseudo));
    for (int i = 0; i < state.n(); ++i) {
        first[state.Z(i, 0)] += 1.0;
        for (int t = 1; t < state.T(); ++t) trans[state.Z(i, t - 1)][state.Z(i, t)] += 1.0;
    }
    params.beta0 = sample_dirichlet(first, rng);
    for (int h = 0; h < G; ++h) params.beta.row(h) = sample_dirichlet(trans[h], rng).transpose();
}

double projection_log_posterior(const DynamicNetwork& net, const LatentState& state,
                                const ProjectionParams& params, const ProjectionHyperparams& hyper)
{
    return loglik_projection(net, state, params.alpha, params.s) + joint_logdensity_xz_proj(state, params) +
           projection_log_prior(params, hyper, net.directed());
}

ProjectionSampler::ProjectionSampler(const DynamicNetwork& net, const ProjectionHyperparams& hyper,
                                     LatentState state, ProjectionParams params, RngStream rng)
    : net_{net}, hyper_{hyper}, state_{std::move(state)}, params_{std::move(params)},
      omega_{make_pg_aux(net.n(), net.T())}, rng_{rng}
{
    if (!net.directed()) params_.s.setOnes();
}

void ProjectionSampler::sweep()
{
    sample_projection_omega(net_, state_, params_, omega_, rng_);
    sample_projection_x(net_, state_, params_, omega_, rng_);
    sample_projection_z(state_, params_, rng_);
    sample_projection_u(state_, params_, rng_);
    sample_projection_r(state_, params_, hyper_, rng_);
    sample_projection_tau(state_, params_, hyper_, rng_);
    sample_projection_s(net_, state_, params_, omega_, rng_);
    sample_projection_alpha(net_, state_, params_, omega_, hyper_, rng_);
    sample_projection_beta(state_, params_, hyper_, rng_);
}

double ProjectionSampler::log_posterior() const
{
    return projection_log_posterior(net_, state_, params_, hyper_);
}

ProjectionSamples gibbs_fit_projection(const DynamicNetwork& net, const ProjectionHyperparams& hyper,
                                       const ChainConfig& chain, LatentState state, ProjectionParams params,
                                       RngStream& rng)
{
    chain.validate();
    hyper.validate();
    params.validate();
    if (!net.is_binary()) throw UnsupportedLikelihood("the projection model is defined for binary payloads only");
    ProjectionSampler sampler(net, hyper, std::move(state), std::move(params), rng);
    if (!std::isfinite(sampler.log_posterior())) throw ConfigError("initial log-posterior is not finite");
    ProjectionSamples out;
    out.seed = rng.seed();
    out.log_posterior_trace.reserve(chain.iterations);
    for (int it = 0; it < chain.iterations; ++it) {
        sampler.sweep();
        const double lp = sampler.log_posterior();
        if (!std::isfinite(lp)) throw NumericalError("log-posterior became non-finite");
        out.log_posterior_trace.push_back(lp);
        if (it < chain.burn_in) continue;
        const bool keep = (it - chain.burn_in) % chain.thin == chain.thin - 1;
        const bool best = !out.map_draw || lp > out.map_draw->log_posterior;
        if (!keep && !best) continue;
        ProjectionDraw d;
        d.iteration = it;
        d.state = sampler.state();
        d.params = sampler.params();
        d.log_posterior = lp;
        d.loglik = loglik_projection(net, d.state, d.params.alpha, d.params.s);
        if (best) out.map_draw = d;
        if (keep) {
            if (chain.keep_aux) d.omega = sampler.omega();
            out.draws.push_back(std::move(d));
        }
    }
    rng = sampler.rng();
    return out;
}

ProjectionSamples gibbs_fit_projection(const DynamicNetwork& net, int G, int p,
                                       const ProjectionHyperparams& hyper, const ChainConfig& chain,
                                       RngStream& rng)
{
    if (net.n() < 1 || net.T() < 1) throw ConfigError("empty network");
    if (!net.is_binary()) throw UnsupportedLikelihood("the projection model is defined for binary payloads only");
    if (net.edge_total() == 0) throw ConfigError("network has no edges");
    if (G < 1 || G > net.n()) throw ConfigError("need 1 <= G <= n");
    if (p < 2) throw ConfigError("the hypersphere model needs p >= 2");
    ProjectionStart start = initialize_projection(net, G, p, hyper, rng);
    return gibbs_fit_projection(net, hyper, chain, std::move(start.state), std::move(start.params), rng);
}

} // namespace dlsc
