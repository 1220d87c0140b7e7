#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dlsc/distributions.hpp"
#include "dlsc/hmm.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/rng.hpp"

namespace dlsc {

struct VBConfig
{
    int max_sweeps = 500;
    double tolerance = 1e-8; // stop when the ELBO gain falls below tolerance * |ELBO|
    int restarts = 5;
    double jitter = 0.02;

    void validate() const;
};

/// Mean-field factors for the hypersphere model.
struct VBPosterior
{
    bool directed = true;

    std::vector<Eigen::MatrixXd> omega_tilt;            // per t, n x n; q(omega) = PG(1, tilt)
    std::vector<Eigen::MatrixXd> x_mean;                // per t, p x n
    std::vector<std::vector<Eigen::MatrixXd>> x_cov;    // [t][i], p x p
    std::vector<ChainPosterior> z;                      // per actor
    Eigen::VectorXd z_entropy;                          // per actor, at its last update
    double alpha_mean = 0.0;
    double alpha_var = 1.0;
    std::vector<PositiveTruncatedNormal> s;             // all fixed at 1 when undirected
    std::vector<PositiveTruncatedNormal> r;
    Eigen::VectorXd tau_shape;
    Eigen::VectorXd tau_rate;
    std::vector<Eigen::VectorXd> u_natural;             // q(u_g) proportional to exp(m_g' u)
    Eigen::VectorXd beta0_conc;
    Eigen::MatrixXd beta_conc;

    std::vector<double> elbo_trace;
    bool converged = false;

    int n() const { return x_mean.empty() ? 0 : static_cast<int>(x_mean.front().cols()); }
    int T() const { return static_cast<int>(x_mean.size()); }
    int p() const { return x_mean.empty() ? 0 : static_cast<int>(x_mean.front().rows()); }
    int G() const { return static_cast<int>(u_natural.size()); }

    double s_mean(int j) const { return directed ? s[j].first : 1.0; }
    double s_second(int j) const { return directed ? s[j].second : 1.0; }
    double tau_mean(int i) const { return tau_shape(i) / tau_rate(i); }
    Eigen::VectorXd u_mean(int g) const;

    /// E_q[eta_ijt] and E_q[eta_ijt^2].
    double expected_eta(int i, int j, int t) const;
    double expected_eta2(int i, int j, int t) const;

    /// argmax of the q(Z) marginals (n x T).
    Eigen::MatrixXi hard_labels() const;
    /// Posterior means as a point estimate (X = means, Z = hard labels).
    LatentState point_state() const;
    ProjectionParams point_params() const;
};

/// The evidence lower bound of the PG-augmented model under the current factors.
double vb_elbo(const DynamicNetwork& net, const VBPosterior& post, const ProjectionHyperparams& hyper);

/// Expected log weights of actor i's label chain under the other factors.
ChainLogWeights vb_z_weights(const VBPosterior& post, int i);

/// Factors seeded from a point estimate (e.g. the spectral initialization).
VBPosterior vb_initialize(const DynamicNetwork& net, const LatentState& state, const ProjectionParams& params,
                          const ProjectionHyperparams& hyper);

// Single-block coordinate-ascent updates (each maximizes the ELBO in its block).
void vb_update_omega(const DynamicNetwork& net, VBPosterior& post);
void vb_update_x(const DynamicNetwork& net, VBPosterior& post);
void vb_update_z(VBPosterior& post);
void vb_update_u(VBPosterior& post);
void vb_update_r(VBPosterior& post, const ProjectionHyperparams& hyper);
void vb_update_tau(VBPosterior& post, const ProjectionHyperparams& hyper);
void vb_update_s(const DynamicNetwork& net, VBPosterior& post);
void vb_update_alpha(const DynamicNetwork& net, VBPosterior& post, const ProjectionHyperparams& hyper);
void vb_update_beta(VBPosterior& post, const ProjectionHyperparams& hyper);

/// Runs sweeps (omega, X, Z, u, r, tau, s, alpha, beta) from the given factors
/// until convergence; deterministic.
void vb_run(const DynamicNetwork& net, VBPosterior& post, const ProjectionHyperparams& hyper,
            const VBConfig& cfg);

/// Best-ELBO fit over cfg.restarts jittered spectral starts.
VBPosterior vb_fit_projection(const DynamicNetwork& net, int G, int p, const ProjectionHyperparams& hyper,
                              const VBConfig& cfg, RngStream& rng);

/// Plug-in sigma(E_q[eta_ijt]).
double vb_predictive_edge_prob(const VBPosterior& post, int i, int j, int t);

} // namespace dlsc
