#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dlsc/rng.hpp"

namespace dlsc {

/// Log-space inputs for one actor's label chain: log initial weights (G),
/// log transition weights (G x G, row = from), log emissions (G x T).
/// Weights need not be normalized; all routines are linear in T.
struct ChainLogWeights
{
    Eigen::VectorXd log_init;
    Eigen::MatrixXd log_trans;
    Eigen::MatrixXd log_emit;
};

/// log of the sum over all G^T label paths of the path weight.
double chain_log_normalizer(const ChainLogWeights& w);

struct ChainPosterior
{
    Eigen::MatrixXd marginals;            // G x T
    std::vector<Eigen::MatrixXd> pairwise; // T-1 matrices, (h, k) = P(z_t = h, z_{t+1} = k)
    double log_normalizer = 0.0;
};

ChainPosterior forward_backward(const ChainLogWeights& w);

/// One exact draw of the whole label path (forward filter, backward sample).
Eigen::VectorXi sample_chain(const ChainLogWeights& w, RngStream& rng);

} // namespace dlsc
