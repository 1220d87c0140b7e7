#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/linalg.hpp"
#include "dlsc/network.hpp"

namespace dlsc {

// ---------------------------------------------------------------------------
// Likelihood variants for the Euclidean geometry

struct Logistic
{
    double alpha = 0.0;
};

/// logit P(y_ij = 1) = beta_in (1 - d / s_j) + beta_out (1 - d / s_i), s on the simplex.
struct DegreeCorrected
{
    double beta_in = 0.0;
    double beta_out = 0.0;
    Eigen::VectorXd s;
};

/// Ranked payloads: choice probability of alter j proportional to s_j exp(-d_ij).
struct PlackettLuce
{
    Eigen::VectorXd s;
};

using LikelihoodVariant = std::variant<Logistic, DegreeCorrected, PlackettLuce>;

enum class LikelihoodKind { Logistic, DegreeCorrected, PlackettLuce };

LikelihoodKind kind_of(const LikelihoodVariant& lik);
const char* to_string(LikelihoodKind kind);
LikelihoodKind likelihood_kind_from_string(const std::string& name);

double edge_prob_logistic(double alpha, double d);
double edge_prob_degree_corrected(double beta_in, double beta_out, double s_i, double s_j, double d);

/// Linear predictor of the binary variants for the directed dyad i -> j.
double distance_eta(const LikelihoodVariant& lik, int i, int j, double d);

/// log P(ordering) under Plackett-Luce; ordering lists alters by choice,
/// d_row(j) is the distance from the chooser to j (the chooser is skipped).
double rank_loglik_plackett_luce(std::span<const int> ordering, const Eigen::VectorXd& s,
                                 const Eigen::VectorXd& d_row);

/// log pi(Y | X, theta_l) over all dyad-times. Undirected binary networks
/// count each unordered pair once with the symmetrized predictor.
double distance_loglik(const DynamicNetwork& net, const LatentState& state,
                       const LikelihoodVariant& lik);

/// Contribution of every term that involves actor i at time t, with X_it
/// replaced by x. Differences of this quantity equal differences of the full
/// log-likelihood when only X_it changes.
double distance_loglik_actor(const DynamicNetwork& net, const Eigen::MatrixXd& Xt, int t, int i,
                             const Eigen::VectorXd& x, const LikelihoodVariant& lik);

/// Edge probabilities at time t (zero diagonal); symmetric predictor when undirected.
Eigen::MatrixXd distance_edge_probs(const Eigen::MatrixXd& Xt, const LikelihoodVariant& lik,
                                    bool directed = true);

// ---------------------------------------------------------------------------
// Latent model

struct DistanceParams
{
    double lambda = 0.85;
    std::vector<LatentPoint> mu;
    std::vector<CovMatrix> sigma;
    double tau2 = 1.0;
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta0;
    Eigen::MatrixXd beta; // G x G, row h = transition from h
    LikelihoodVariant lik = Logistic{};

    int G() const { return static_cast<int>(mu.size()); }
    int p() const { return mu.empty() ? 0 : static_cast<int>(mu.front().size()); }

    /// Throws InvalidInput when any documented invariant fails.
    void validate() const;
};

struct DistanceHyperparams
{
    double nu_lambda = 0.85;
    double xi_lambda = 5e-4; // prior variance of lambda before truncation
    double a = 3.0;          // inverse-gamma shape on tau2
    double b = 0.03;         // inverse-gamma scale on tau2
    double c = 1.001;        // gamma shape on gamma_l
    double d = 10.0;         // gamma rate on gamma_l (scale 1/d)
    double beta_pseudo = 1.0;
    double lik_prior_var = 100.0; // N(0, v) on alpha, beta_in, beta_out
    double s_pseudo = 1.0;        // Dirichlet on s

    void validate() const;
};

/// log pi({X_t}, {Z_t} | theta_p) for the Euclidean model.
double joint_logdensity_xz(const LatentState& state, const DistanceParams& params);

/// Sum of log priors of theta_p and theta_l.
double distance_log_prior(const DistanceParams& params, const DistanceHyperparams& hyper);

/// Log emission density of X_it under community k given the previous position
/// (prev == nullptr at t = 0).
double distance_emission_logpdf(const DistanceParams& params, const GaussianFactor& fk, int k,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::VectorXd* prev);

/// Number of free likelihood parameters (for BIC1).
int distance_lik_dim(const LikelihoodVariant& lik, int n);
/// Number of free latent-model parameters (for BIC2).
int distance_prior_dim(int G, int p);

} // namespace dlsc
