#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/network.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/rng.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

/// Edge probabilities at T+1 (zero diagonal). Every posterior draw is pushed
/// forward `reps` times: Z_{i,T+1} from the transition row of Z_iT, then
/// X_{i,T+1} from its emission. The result is the average of the edge
/// probabilities. Requires a binary likelihood.
Eigen::MatrixXd one_step_ahead_probs(const DistanceSamples& samples, bool directed, RngStream& rng,
                                     int reps = 1);
Eigen::MatrixXd one_step_ahead_probs(const ProjectionSamples& samples, bool directed, RngStream& rng,
                                     int reps = 1);
/// Same propagation with the parameters, Z_iT and X_iT drawn from the
/// variational factors.
Eigen::MatrixXd one_step_ahead_probs(const VBPosterior& post, RngStream& rng, int draws = 200);

/// AUC of the fitted edge probabilities against the observed edges over all
/// dyad-times (each unordered pair once when undirected). MCMC fits use the
/// MAP draw, VB fits the plug-in mean.
double insample_auc(const DistanceSamples& samples, const DynamicNetwork& net);
double insample_auc(const ProjectionSamples& samples, const DynamicNetwork& net);
double insample_auc(const VBPosterior& post, const DynamicNetwork& net);

/// Fraction of label vectors in which i and j share a label.
Eigen::MatrixXd coassignment_probs(std::span<const Eigen::VectorXi> labels);
/// Over the draws of a chain at time t (0-based).
Eigen::MatrixXd coassignment_probs(const DistanceSamples& samples, int t);
Eigen::MatrixXd coassignment_probs(const ProjectionSamples& samples, int t);
/// sum_g q(Z_it = g) q(Z_jt = g) off the diagonal, 1 on it.
Eigen::MatrixXd coassignment_probs(const VBPosterior& post, int t);

} // namespace dlsc
