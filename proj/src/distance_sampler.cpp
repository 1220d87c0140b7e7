#include "dlsc/distance_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/init.hpp"

namespace dlsc {

namespace {

constexpr int kBatch = 50;
constexpr double kTargetAccept = 0.234;

std::vector<GaussianFactor> factors(const DistanceParams& params)
{
    std::vector<GaussianFactor> f;
    f.reserve(params.sigma.size());
    for (const auto& s : params.sigma) f.emplace_back(s);
    return f;
}

int draw_categorical(const Eigen::VectorXd& logw, RngStream& rng)
{
    const double m = logw.maxCoeff();
    const Eigen::VectorXd w = (logw.array() - m).exp();
    double u = rng.uniform() * w.sum();
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        u -= w(k);
        if (u <= 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(w.size() - 1);
}

Eigen::VectorXd z_log_weights(const LatentState& state, const DistanceParams& params,
                              const std::vector<GaussianFactor>& f, int i, int t)
{
    const int G = params.G();
    const int T = state.T();
    Eigen::VectorXd logw(G);
    const Eigen::VectorXd prev = t > 0 ? Eigen::VectorXd(state.x(i, t - 1)) : Eigen::VectorXd();
    for (int k = 0; k < G; ++k) {
        const double in = t == 0 ? params.beta0(k) : params.beta(state.Z(i, t - 1), k);
        const double out = t + 1 < T ? params.beta(k, state.Z(i, t + 1)) : 1.0;
        logw(k) = std::log(in) + std::log(out) +
                  distance_emission_logpdf(params, f[k], k, state.x(i, t), t > 0 ? &prev : nullptr);
    }
    return logw;
}

// Log prior terms of X_it: its own emission and the emission of X_i(t+1).
double x_prior_terms(const LatentState& state, const DistanceParams& params,
                     const std::vector<GaussianFactor>& f, int i, int t, const Eigen::VectorXd& x)
{
    const int k = state.Z(i, t);
    const Eigen::VectorXd prev = t > 0 ? Eigen::VectorXd(state.x(i, t - 1)) : Eigen::VectorXd();
    double lp = distance_emission_logpdf(params, f[k], k, x, t > 0 ? &prev : nullptr);
    if (t + 1 < state.T()) {
        const int kn = state.Z(i, t + 1);
        lp += distance_emission_logpdf(params, f[kn], kn, state.x(i, t + 1), &x);
    }
    return lp;
}

double x_log_ratio(const DynamicNetwork& net, const LatentState& state, const DistanceParams& params,
                   const std::vector<GaussianFactor>& f, int i, int t, const Eigen::VectorXd& proposal)
{
    const Eigen::VectorXd current = state.x(i, t);
    const double dl = distance_loglik_actor(net, state.X[t], t, i, proposal, params.lik) -
                      distance_loglik_actor(net, state.X[t], t, i, current, params.lik);
    return dl + x_prior_terms(state, params, f, i, t, proposal) -
           x_prior_terms(state, params, f, i, t, current);
}

Eigen::VectorXd& lik_s(LikelihoodVariant& lik)
{
    if (auto* dc = std::get_if<DegreeCorrected>(&lik)) return dc->s;
    return std::get<PlackettLuce>(lik).s;
}

} // namespace

Eigen::VectorXd distance_z_conditional(const LatentState& state, const DistanceParams& params, int i, int t)
{
    const Eigen::VectorXd logw = z_log_weights(state, params, factors(params), i, t);
    Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp();
    return w / w.sum();
}

void sample_distance_z(LatentState& state, const DistanceParams& params, RngStream& rng)
{
    const auto f = factors(params);
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < state.T(); ++t) {
            state.Z(i, t) = draw_categorical(z_log_weights(state, params, f, i, t), rng);
        }
    }
}

void sample_distance_mu(const LatentState& state, DistanceParams& params, RngStream& rng)
{
    const int G = params.G();
    const int p = params.p();
    const double lam = params.lambda;
    std::vector<double> n1(G, 0.0), n2(G, 0.0);
    std::vector<Eigen::VectorXd> sum1(G, Eigen::VectorXd::Zero(p)), sumw(G, Eigen::VectorXd::Zero(p));
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < state.T(); ++t) {
            const int k = state.Z(i, t);
            if (t == 0) {
                n1[k] += 1.0;
                sum1[k] += state.x(i, 0);
            } else {
                n2[k] += 1.0;
                sumw[k] += state.x(i, t) - (1.0 - lam) * state.x(i, t - 1);
            }
        }
    }
    for (int g = 0; g < G; ++g) {
        const Eigen::MatrixXd prec = GaussianFactor(params.sigma[g]).precision;
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(p, p) / params.tau2 + (n1[g] + lam * lam * n2[g]) * prec;
        const Eigen::VectorXd b = prec * (sum1[g] + lam * sumw[g]);
        params.mu[g] = sample_gaussian_canonical(symmetrize(P), b, rng);
    }
}

void sample_distance_sigma(const LatentState& state, DistanceParams& params, RngStream& rng)
{
    const int G = params.G();
    const int p = params.p();
    const double lam = params.lambda;
    std::vector<Eigen::MatrixXd> S(G, Eigen::MatrixXd::Zero(p, p));
    std::vector<double> count(G, 0.0);
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < state.T(); ++t) {
            const int k = state.Z(i, t);
            const Eigen::VectorXd mean =
                t == 0 ? params.mu[k] : Eigen::VectorXd(lam * params.mu[k] + (1.0 - lam) * state.x(i, t - 1));
            const Eigen::VectorXd r = state.x(i, t) - mean;
            S[k] += r * r.transpose();
            count[k] += 1.0;
        }
    }
    const Eigen::MatrixXd psi = params.gamma.asDiagonal();
    for (int g = 0; g < G; ++g) {
        params.sigma[g] = sample_inverse_wishart(p + 1.0 + count[g], symmetrize(psi + S[g]), rng);
    }
}

void sample_distance_lambda(const LatentState& state, DistanceParams& params,
                            const DistanceHyperparams& hyper, RngStream& rng)
{
    const auto f = factors(params);
    double A = 0.0;
    double B = 0.0;
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 1; t < state.T(); ++t) {
            const int k = state.Z(i, t);
            const Eigen::VectorXd v = params.mu[k] - state.x(i, t - 1);
            const Eigen::VectorXd w = state.x(i, t) - state.x(i, t - 1);
            const Eigen::VectorXd pv = f[k].precision * v;
            A += v.dot(pv);
            B += w.dot(pv);
        }
    }
    const double prec = A + 1.0 / hyper.xi_lambda;
    const double mean = (B + hyper.nu_lambda / hyper.xi_lambda) / prec;
    params.lambda = sample_truncated_normal_01(mean, 1.0 / prec, rng);
}

void sample_distance_tau2(DistanceParams& params, const DistanceHyperparams& hyper, RngStream& rng)
{
    double ss = 0.0;
    for (const auto& m : params.mu) ss += m.squaredNorm();
    const double shape = hyper.a + 0.5 * params.G() * params.p();
    const double scale = hyper.b + 0.5 * ss;
    params.tau2 = scale / rng.gamma(shape);
}

void sample_distance_gamma(DistanceParams& params, const DistanceHyperparams& hyper, RngStream& rng)
{
    const int G = params.G();
    const int p = params.p();
    Eigen::VectorXd diag_prec = Eigen::VectorXd::Zero(p);
    for (const auto& s : params.sigma) diag_prec += GaussianFactor(s).precision.diagonal();
    const double shape = hyper.c + 0.5 * G * (p + 1.0);
    for (int l = 0; l < p; ++l) {
        const double rate = hyper.d + 0.5 * diag_prec(l);
        params.gamma(l) = rng.gamma(shape) / rate;
    }
}

void sample_distance_beta(const LatentState& state, DistanceParams& params,
                          const DistanceHyperparams& hyper, RngStream& rng)
{
    const int G = params.G();
    std::vector<double> c0(G, hyper.beta_pseudo);
    std::vector<std::vector<double>> ct(G, std::vector<double>(G, hyper.beta_pseudo));
    for (int i = 0; i < state.n(); ++i) {
        c0[state.Z(i, 0)] += 1.0;
        for (int t = 1; t < state.T(); ++t) ct[state.Z(i, t - 1)][state.Z(i, t)] += 1.0;
    }
    params.beta0 = sample_dirichlet(c0, rng);
    for (int h = 0; h < G; ++h) params.beta.row(h) = sample_dirichlet(ct[h], rng).transpose();
}

double distance_x_log_ratio(const DynamicNetwork& net, const LatentState& state,
                            const DistanceParams& params, int i, int t, const Eigen::VectorXd& proposal)
{
    return x_log_ratio(net, state, params, factors(params), i, t, proposal);
}

double distance_log_posterior(const DynamicNetwork& net, const LatentState& state,
                              const DistanceParams& params, const DistanceHyperparams& hyper)
{
    return distance_loglik(net, state, params.lik) + joint_logdensity_xz(state, params) +
           distance_log_prior(params, hyper);
}

// ---------------------------------------------------------------------------

DistanceSampler::DistanceSampler(const DynamicNetwork& net, const DistanceHyperparams& hyper,
                                 const ChainConfig& chain, LatentState state, DistanceParams params,
                                 RngStream rng)
    : net_{net}, hyper_{hyper}, chain_{chain}, state_{std::move(state)}, params_{std::move(params)},
      rng_{rng}, lik_step_{chain.lik_step}
{
    const int n = net.n();
    x_scale_ = Eigen::VectorXd::Constant(n, chain.x_step);
    x_accept_ = Eigen::VectorXd::Zero(n);
    x_tries_ = Eigen::VectorXd::Zero(n);
    s_conc_ = chain.s_concentration > 0.0 ? chain.s_concentration : 50.0 * n * n;
}

void DistanceSampler::update_positions()
{
    const auto f = factors(params_);
    std::vector<double> sd(params_.G());
    for (int g = 0; g < params_.G(); ++g) sd[g] = std::sqrt(params_.sigma[g].trace() / params_.p());
    const int p = params_.p();
    Eigen::VectorXd proposal(p);
    for (int t = 0; t < state_.T(); ++t) {
        for (int i = 0; i < state_.n(); ++i) {
            const double step = x_scale_(i) * sd[state_.Z(i, t)];
            for (int l = 0; l < p; ++l) proposal(l) = state_.X[t](l, i) + step * rng_.normal();
            const double log_r = x_log_ratio(net_, state_, params_, f, i, t, proposal);
            x_tries_(i) += 1.0;
            x_tries_total_ += 1.0;
            if (std::log(rng_.uniform()) < log_r) {
                state_.X[t].col(i) = proposal;
                x_accept_(i) += 1.0;
                x_accept_total_ += 1.0;
            }
        }
    }
}

void DistanceSampler::update_likelihood_params()
{
    const double v = hyper_.lik_prior_var;
    const double current = distance_loglik(net_, state_, params_.lik);

    // global coefficients
    LikelihoodVariant prop = params_.lik;
    double log_prior_diff = 0.0;
    if (auto* lg = std::get_if<Logistic>(&prop)) {
        const double old = lg->alpha;
        lg->alpha += lik_step_ * rng_.normal();
        log_prior_diff = -0.5 * (lg->alpha * lg->alpha - old * old) / v;
    } else if (auto* dc = std::get_if<DegreeCorrected>(&prop)) {
        const double oi = dc->beta_in;
        const double oo = dc->beta_out;
        dc->beta_in += lik_step_ * rng_.normal();
        dc->beta_out += lik_step_ * rng_.normal();
        log_prior_diff = -0.5 * (dc->beta_in * dc->beta_in + dc->beta_out * dc->beta_out - oi * oi - oo * oo) / v;
    }
    double accepted_loglik = current;
    if (!std::holds_alternative<PlackettLuce>(prop)) {
        const double cand = distance_loglik(net_, state_, prop);
        lik_tries_ += 1.0;
        lik_tries_total_ += 1.0;
        if (std::log(rng_.uniform()) < cand - current + log_prior_diff) {
            params_.lik = prop;
            accepted_loglik = cand;
            lik_accept_ += 1.0;
            lik_accept_total_ += 1.0;
        }
    }
    if (std::holds_alternative<Logistic>(params_.lik)) return;

    // s on the simplex: Dirichlet proposal centred on the current value
    prop = params_.lik;
    Eigen::VectorXd& s_new = lik_s(prop);
    const Eigen::VectorXd s_old = s_new;
    const auto n = static_cast<std::size_t>(s_old.size());
    std::vector<double> fwd(n), rev(n), pseudo(n, hyper_.s_pseudo);
    for (std::size_t j = 0; j < n; ++j) fwd[j] = s_conc_ * s_old(static_cast<Eigen::Index>(j));
    s_new = sample_dirichlet(fwd, rng_);
    if ((s_new.array() <= 0.0).any()) return;
    for (std::size_t j = 0; j < n; ++j) rev[j] = s_conc_ * s_new(static_cast<Eigen::Index>(j));
    const double cand = distance_loglik(net_, state_, prop);
    const std::span<const double> so{s_old.data(), n}, sn{s_new.data(), n};
    const double log_r = cand - accepted_loglik + dirichlet_logpdf(sn, pseudo) - dirichlet_logpdf(so, pseudo) +
                         dirichlet_logpdf(so, rev) - dirichlet_logpdf(sn, fwd);
    s_tries_ += 1.0;
    s_tries_total_ += 1.0;
    if (std::log(rng_.uniform()) < log_r) {
        params_.lik = std::move(prop);
        s_accept_ += 1.0;
        s_accept_total_ += 1.0;
    }
}

void DistanceSampler::update_scale()
{
    const int n = state_.n();
    const int T = state_.T();
    const int G = params_.G();
    const int p = params_.p();
    const double log_k = scale_step_ * rng_.normal();
    const double k = std::exp(log_k);
    const double k2 = k * k;

    LatentState cand_state = state_;
    DistanceParams cand = params_;
    for (auto& x : cand_state.X) x *= k;
    for (auto& m : cand.mu) m *= k;
    for (auto& s : cand.sigma) s *= k2;
    cand.tau2 *= k2;
    cand.gamma *= k2;

    // log Jacobian of the map on (X, mu, Sigma, tau2, gamma)
    const double dims = static_cast<double>(n) * T * p + G * p + G * p * (p + 1) + 2.0 + 2.0 * p;
    const double log_r = distance_log_posterior(net_, cand_state, cand, hyper_) -
                         distance_log_posterior(net_, state_, params_, hyper_) + dims * log_k;
    scale_tries_ += 1.0;
    scale_tries_total_ += 1.0;
    if (std::log(rng_.uniform()) < log_r) {
        state_ = std::move(cand_state);
        params_ = std::move(cand);
        scale_accept_ += 1.0;
        scale_accept_total_ += 1.0;
    }
}

void DistanceSampler::sweep()
{
    update_positions();
    update_likelihood_params();
    update_scale();
    sample_distance_z(state_, params_, rng_);
    sample_distance_mu(state_, params_, rng_);
    sample_distance_sigma(state_, params_, rng_);
    sample_distance_lambda(state_, params_, hyper_, rng_);
    sample_distance_tau2(params_, hyper_, rng_);
    sample_distance_gamma(params_, hyper_, rng_);
    sample_distance_beta(state_, params_, hyper_, rng_);
    if (++sweeps_in_batch_ == kBatch) {
        if (adapting_) adapt();
        sweeps_in_batch_ = 0;
        x_accept_.setZero();
        x_tries_.setZero();
        lik_accept_ = lik_tries_ = s_accept_ = s_tries_ = scale_accept_ = scale_tries_ = 0.0;
    }
}

void DistanceSampler::adapt()
{
    for (Eigen::Index i = 0; i < x_scale_.size(); ++i) {
        if (x_tries_(i) == 0.0) continue;
        const double rate = x_accept_(i) / x_tries_(i);
        x_scale_(i) = std::clamp(x_scale_(i) * std::exp(2.0 * (rate - kTargetAccept)), 1e-4, 1e4);
    }
    if (lik_tries_ > 0.0) {
        lik_step_ = std::clamp(lik_step_ * std::exp(2.0 * (lik_accept_ / lik_tries_ - kTargetAccept)), 1e-6, 10.0);
    }
    if (scale_tries_ > 0.0) {
        scale_step_ = std::clamp(scale_step_ * std::exp(2.0 * (scale_accept_ / scale_tries_ - kTargetAccept)), 1e-5,
                                 1.0);
    }
    if (s_tries_ > 0.0) {
        // larger concentration = smaller steps
        s_conc_ = std::clamp(s_conc_ * std::exp(-2.0 * (s_accept_ / s_tries_ - kTargetAccept)), 1.0, 1e12);
    }
}

void DistanceSampler::reset_counters()
{
    x_accept_total_ = x_tries_total_ = 0.0;
    lik_accept_total_ = lik_tries_total_ = 0.0;
    s_accept_total_ = s_tries_total_ = 0.0;
    scale_accept_total_ = scale_tries_total_ = 0.0;
}

std::map<std::string, double> DistanceSampler::acceptance_rates() const
{
    std::map<std::string, double> out;
    if (x_tries_total_ > 0.0) out["positions"] = x_accept_total_ / x_tries_total_;
    if (lik_tries_total_ > 0.0) out["likelihood"] = lik_accept_total_ / lik_tries_total_;
    if (s_tries_total_ > 0.0) out["s"] = s_accept_total_ / s_tries_total_;
    if (scale_tries_total_ > 0.0) out["scale"] = scale_accept_total_ / scale_tries_total_;
    return out;
}

double DistanceSampler::log_posterior() const
{
    return distance_log_posterior(net_, state_, params_, hyper_);
}

// ---------------------------------------------------------------------------

DistanceSamples mh_within_gibbs_fit(const DynamicNetwork& net, const DistanceHyperparams& hyper,
                                    const ChainConfig& chain, LatentState state, DistanceParams params,
                                    RngStream& rng)
{
    chain.validate();
    hyper.validate();
    params.validate();
    DistanceSampler sampler(net, hyper, chain, std::move(state), std::move(params), rng);
    if (!std::isfinite(sampler.log_posterior())) {
        throw ConfigError("initial log-posterior is not finite");
    }
    DistanceSamples out;
    out.seed = rng.seed();
    out.log_posterior_trace.reserve(chain.iterations);
    sampler.set_adapting(chain.adapt);
    for (int it = 0; it < chain.iterations; ++it) {
        if (it == chain.burn_in) {
            sampler.set_adapting(false);
            sampler.reset_counters();
        }
        sampler.sweep();
        const double lp = sampler.log_posterior();
        if (!std::isfinite(lp)) throw NumericalError("log-posterior became non-finite");
        out.log_posterior_trace.push_back(lp);
        if (it < chain.burn_in) continue;
        const bool keep = (it - chain.burn_in) % chain.thin == chain.thin - 1;
        const bool best = !out.map_draw || lp > out.map_draw->log_posterior;
        if (!keep && !best) continue;
        DistanceDraw d;
        d.iteration = it;
        d.state = sampler.state();
        d.params = sampler.params();
        d.log_posterior = lp;
        d.loglik = distance_loglik(net, d.state, d.params.lik);
        if (best) out.map_draw = d;
        if (keep) out.draws.push_back(std::move(d));
    }
    out.acceptance = sampler.acceptance_rates();
    rng = sampler.rng();
    return out;
}

DistanceSamples mh_within_gibbs_fit(const DynamicNetwork& net, int G, int p, LikelihoodKind kind,
                                    const DistanceHyperparams& hyper, const ChainConfig& chain,
                                    RngStream& rng)
{
    if (net.n() < 1 || net.T() < 1) throw ConfigError("empty network");
    if (net.is_binary() && net.edge_total() == 0) throw ConfigError("network has no edges");
    if (G < 1 || G > net.n()) throw ConfigError("need 1 <= G <= n");
    if (p < 1) throw ConfigError("latent dimension must be positive");
    DistanceStart start = initialize_distance(net, G, p, kind, hyper, rng);
    return mh_within_gibbs_fit(net, hyper, chain, std::move(start.state), std::move(start.params), rng);
}

} // namespace dlsc
