#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlsc/distance_model.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

struct BicParts
{
    double bic1 = 0.0;
    double bic2 = 0.0;
    double bic = 0.0;
};

/// bic1 = 2 loglik - dim_lik log(edge_total); bic2 = 2 latent - dim_prior log(nT).
BicParts bic_components(double loglik_map, int dim_lik, long edge_total, double latent_loglik, int dim_prior,
                        long nT);

/// log pi({X_t} | theta_p) with every label path summed out (per-actor
/// forward recursion). The labels in xhat are ignored.
double latent_marginal_loglik(const LatentState& xhat, const DistanceParams& params);
double latent_marginal_loglik(const LatentState& xhat, const ProjectionParams& params);

constexpr std::size_t kMinDicDraws = 100;

/// -2 mean(loglik) + p_D with p_D = 2 (plugin - mean(loglik)).
double dic_from_trace(std::span<const double> logliks, double plugin_loglik);

/// DIC of a chain. The plug-in log-likelihood uses posterior-mean edge
/// probabilities (binary) or posterior-mean distances and s (ranks), which
/// are invariant to label switching and to rotations of the latent space.
double dic(const DistanceSamples& samples, const DynamicNetwork& net);
double dic(const ProjectionSamples& samples, const DynamicNetwork& net);

struct FitSummary
{
    Geometry geometry = Geometry::Distance;
    int G = 0;
    std::string engine; // "mcmc" or "vb"
    double loglik_at_map = 0.0;
    double latent_marginal_loglik = 0.0;
    int dim_lik = 0;
    int dim_prior = 0;
    long edge_total = 0;
    long nT = 0;
    double dic = 0.0; // NaN when not computed
    double bic1 = 0.0;
    double bic2 = 0.0;
    double bic = 0.0;
    bool ok = true;
    std::string error;
};

FitSummary summarize_fit(const DynamicNetwork& net, const DistanceSamples& samples, bool with_dic = true);
FitSummary summarize_fit(const DynamicNetwork& net, const ProjectionSamples& samples, bool with_dic = true);
FitSummary summarize_fit(const DynamicNetwork& net, const VBPosterior& post);

struct SelectionBudget
{
    std::vector<Geometry> geometries{Geometry::Distance, Geometry::Projection};
    int p_distance = 2;
    int p_projection = 3;
    LikelihoodKind distance_kind = LikelihoodKind::DegreeCorrected;
    DistanceHyperparams distance_hyper;
    ProjectionHyperparams projection_hyper;
    ChainConfig distance_chain;
    /// The projection sweep uses VB per G, then one Gibbs chain at the
    /// BIC-best G for the DIC comparison.
    VBConfig projection_vb;
    ChainConfig projection_chain;
    /// Worker threads; 0 = DLSC_THREADS or the hardware concurrency.
    int threads = 0;
};

struct SelectionResult
{
    std::vector<FitSummary> table;   // every cell, in (geometry, G) order
    std::vector<FitSummary> winners; // BIC-best cell per geometry, ascending DIC
};

/// BIC picks G per geometry, DIC then orders the geometries. Cell failures
/// are recorded in the table, not thrown.
SelectionResult select_model(const DynamicNetwork& net, int g_lo, int g_hi, const SelectionBudget& budget,
                             std::uint64_t seed);

/// Re-derives winners from a stored table (the ranking is a pure function of it).
std::vector<FitSummary> rank_winners(const std::vector<FitSummary>& table);

/// Thread count from DLSC_THREADS, else the hardware concurrency (at least 1).
int default_thread_count();

} // namespace dlsc
