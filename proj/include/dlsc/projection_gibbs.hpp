#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/rng.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

/// Polya-Gamma auxiliaries, one n x n matrix per time. Undirected networks
/// use (and keep symmetric) one value per unordered pair.
using PGAux = std::vector<Eigen::MatrixXd>;

PGAux make_pg_aux(int n, int T);

// Full-conditional draws of the augmented hypersphere posterior. Each
// replaces one block in place given everything else.

void sample_projection_omega(const DynamicNetwork& net, const LatentState& state, const ProjectionParams& params,
                             PGAux& omega, RngStream& rng);
void sample_projection_x(const DynamicNetwork& net, LatentState& state, const ProjectionParams& params,
                         const PGAux& omega, RngStream& rng);
void sample_projection_z(LatentState& state, const ProjectionParams& params, RngStream& rng);
void sample_projection_u(const LatentState& state, ProjectionParams& params, RngStream& rng);
void sample_projection_r(const LatentState& state, ProjectionParams& params, const ProjectionHyperparams& hyper,
                         RngStream& rng);
void sample_projection_tau(const LatentState& state, ProjectionParams& params,
                           const ProjectionHyperparams& hyper, RngStream& rng);
/// No-op for undirected networks, where s stays at 1.
void sample_projection_s(const DynamicNetwork& net, const LatentState& state, ProjectionParams& params,
                         const PGAux& omega, RngStream& rng);
void sample_projection_alpha(const DynamicNetwork& net, const LatentState& state, ProjectionParams& params,
                             const PGAux& omega, const ProjectionHyperparams& hyper, RngStream& rng);
void sample_projection_beta(const LatentState& state, ProjectionParams& params,
                            const ProjectionHyperparams& hyper, RngStream& rng);

/// Log-posterior with the auxiliaries integrated out.
double projection_log_posterior(const DynamicNetwork& net, const LatentState& state,
                                const ProjectionParams& params, const ProjectionHyperparams& hyper);

class ProjectionSampler
{
public:
    ProjectionSampler(const DynamicNetwork& net, const ProjectionHyperparams& hyper, LatentState state,
                      ProjectionParams params, RngStream rng);

    /// One scan: omega, X, Z, u, r, tau, s, alpha, beta.
    void sweep();

    const LatentState& state() const { return state_; }
    LatentState& state() { return state_; }
    const ProjectionParams& params() const { return params_; }
    ProjectionParams& params() { return params_; }
    const PGAux& omega() const { return omega_; }
    RngStream& rng() { return rng_; }
    double log_posterior() const;

private:
    const DynamicNetwork& net_;
    ProjectionHyperparams hyper_;
    LatentState state_;
    ProjectionParams params_;
    PGAux omega_;
    RngStream rng_;
};

/// Gibbs chain from the spectral initialization.
ProjectionSamples gibbs_fit_projection(const DynamicNetwork& net, int G, int p,
                                       const ProjectionHyperparams& hyper, const ChainConfig& chain,
                                       RngStream& rng);

/// Gibbs chain from the given state.
ProjectionSamples gibbs_fit_projection(const DynamicNetwork& net, const ProjectionHyperparams& hyper,
                                       const ChainConfig& chain, LatentState state, ProjectionParams params,
                                       RngStream& rng);

} // namespace dlsc
