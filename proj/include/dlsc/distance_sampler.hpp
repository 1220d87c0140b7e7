#pragma once

#include <vector>

#include "dlsc/distance_model.hpp"
#include "dlsc/network.hpp"
#include "dlsc/rng.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

// Conjugate full-conditional draws. Each updates one block of params (or
// the labels) in place from its exact conditional given everything else.

void sample_distance_z(LatentState& state, const DistanceParams& params, RngStream& rng);
void sample_distance_mu(const LatentState& state, DistanceParams& params, RngStream& rng);
void sample_distance_sigma(const LatentState& state, DistanceParams& params, RngStream& rng);
void sample_distance_lambda(const LatentState& state, DistanceParams& params,
                            const DistanceHyperparams& hyper, RngStream& rng);
void sample_distance_tau2(DistanceParams& params, const DistanceHyperparams& hyper, RngStream& rng);
void sample_distance_gamma(DistanceParams& params, const DistanceHyperparams& hyper, RngStream& rng);
void sample_distance_beta(const LatentState& state, DistanceParams& params,
                          const DistanceHyperparams& hyper, RngStream& rng);

/// Normalized full conditional of Z_it over the G labels.
Eigen::VectorXd distance_z_conditional(const LatentState& state, const DistanceParams& params, int i,
                                       int t);

/// log pi(X' | rest) - log pi(X | rest) when X_it is replaced by proposal.
double distance_x_log_ratio(const DynamicNetwork& net, const LatentState& state,
                            const DistanceParams& params, int i, int t, const Eigen::VectorXd& proposal);

/// Full log-posterior (likelihood + latent joint + priors).
double distance_log_posterior(const DynamicNetwork& net, const LatentState& state,
                              const DistanceParams& params, const DistanceHyperparams& hyper);

/// MH-within-Gibbs chain state with its proposal tuning.
class DistanceSampler
{
public:
    DistanceSampler(const DynamicNetwork& net, const DistanceHyperparams& hyper, const ChainConfig& chain,
                    LatentState state, DistanceParams params, RngStream rng);

    /// One scan: X, likelihood parameters, joint scale, Z, mu, Sigma, lambda, tau2, gamma, beta.
    void sweep();
    void update_positions();
    void update_likelihood_params();
    /// Rescales X, mu, Sigma, tau2 and gamma together by a log-normal factor.
    /// Single-site moves alone cannot shrink or grow the whole configuration
    /// once Sigma has contracted around the current positions.
    void update_scale();

    /// Sets whether proposal scales adapt at the end of each batch.
    void set_adapting(bool on) { adapting_ = on; }
    /// Clears acceptance counters (called when burn-in ends).
    void reset_counters();
    std::map<std::string, double> acceptance_rates() const;

    const LatentState& state() const { return state_; }
    LatentState& state() { return state_; }
    const DistanceParams& params() const { return params_; }
    DistanceParams& params() { return params_; }
    RngStream& rng() { return rng_; }
    double log_posterior() const;

private:
    void adapt();

    const DynamicNetwork& net_;
    DistanceHyperparams hyper_;
    ChainConfig chain_;
    LatentState state_;
    DistanceParams params_;
    RngStream rng_;

    bool adapting_ = false;
    int sweeps_in_batch_ = 0;
    Eigen::VectorXd x_scale_;          // per-actor factor on the community sd
    Eigen::VectorXd x_accept_, x_tries_; // per-actor, current batch
    double x_accept_total_ = 0.0, x_tries_total_ = 0.0;
    double lik_step_;
    double s_conc_;
    double lik_accept_ = 0.0, lik_tries_ = 0.0, lik_accept_total_ = 0.0, lik_tries_total_ = 0.0;
    double s_accept_ = 0.0, s_tries_ = 0.0, s_accept_total_ = 0.0, s_tries_total_ = 0.0;
    double scale_step_ = 0.02; // sd of log kappa
    double scale_accept_ = 0.0, scale_tries_ = 0.0, scale_accept_total_ = 0.0, scale_tries_total_ = 0.0;
};

/// Runs a chain from the default initialization.
DistanceSamples mh_within_gibbs_fit(const DynamicNetwork& net, int G, int p, LikelihoodKind kind,
                                    const DistanceHyperparams& hyper, const ChainConfig& chain,
                                    RngStream& rng);

/// Runs a chain from the given state.
DistanceSamples mh_within_gibbs_fit(const DynamicNetwork& net, const DistanceHyperparams& hyper,
                                    const ChainConfig& chain, LatentState state, DistanceParams params,
                                    RngStream& rng);

} // namespace dlsc
