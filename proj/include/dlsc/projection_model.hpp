#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dlsc/linalg.hpp"
#include "dlsc/network.hpp"

namespace dlsc {

struct ProjectionParams
{
    double alpha = 0.0;
    Eigen::VectorXd s;   // receiver scaling (fixed at 1 for undirected networks)
    Eigen::VectorXd r;   // sender propensities
    Eigen::VectorXd tau; // per-actor precisions
    std::vector<Eigen::VectorXd> u; // unit community directions
    Eigen::VectorXd beta0;
    Eigen::MatrixXd beta;

    int G() const { return static_cast<int>(u.size()); }
    int p() const { return u.empty() ? 0 : static_cast<int>(u.front().size()); }
    int n() const { return static_cast<int>(r.size()); }

    void validate() const;
};

struct ProjectionHyperparams
{
    double c = 10.0;   // r_i | tau_i ~ Gamma(1, scale c / tau_i)
    double a2 = 600.0; // tau_i ~ Gamma(shape a2, scale b2)
    double b2 = 0.05;
    double b3 = 100.0; // alpha ~ N(0, b3)
    double beta_pseudo = 1.0;

    void validate() const;
};

/// alpha + s_j <X_i, X_j>.
template <typename A, typename B>
double eta_projection(double alpha, double s_j, const Eigen::MatrixBase<A>& x_i,
                      const Eigen::MatrixBase<B>& x_j)
{
    return alpha + s_j * x_i.dot(x_j);
}

/// Same predictor through norms and the cosine of the angle between positions.
double eta_projection_angular(double alpha, double s_j, const Eigen::VectorXd& x_i,
                              const Eigen::VectorXd& x_j);

/// log pi(Y | X, alpha, s). Undirected networks count each pair once and ignore s.
double loglik_projection(const DynamicNetwork& net, const LatentState& state, double alpha,
                         const Eigen::VectorXd& s);

Eigen::MatrixXd projection_edge_probs(const Eigen::MatrixXd& Xt, double alpha, const Eigen::VectorXd& s,
                                      bool directed);

/// log pi({X_t}, {Z_t} | theta_p) for the hypersphere model.
double joint_logdensity_xz_proj(const LatentState& state, const ProjectionParams& params);

/// log of (1/2) exp((y - 1/2) eta) exp(-omega eta^2 / 2) PG(omega | 1, 0).
double pg_augmented_logjoint(int y, double omega, double eta);

/// Log priors of all parameters except the PG auxiliaries.
double projection_log_prior(const ProjectionParams& params, const ProjectionHyperparams& hyper,
                            bool directed);

int projection_lik_dim(int n, bool directed);
int projection_prior_dim(int G, int p, int n);

} // namespace dlsc
