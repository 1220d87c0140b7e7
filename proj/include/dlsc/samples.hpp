#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlsc/distance_model.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"

namespace dlsc {

enum class Geometry { Distance, Projection };
const char* to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

struct ChainConfig
{
    int iterations = 4000;
    int burn_in = 2000;
    int thin = 10;
    double x_step = 0.5;        // initial RW scale, relative to the community sd
    double lik_step = 0.05;     // initial RW sd for alpha / (beta_in, beta_out)
    double s_concentration = 0; // initial Dirichlet proposal concentration; 0 = 50 n^2
    bool adapt = true;          // adapt proposal scales during burn-in only
    bool keep_aux = false;      // store PG auxiliaries with each projection draw

    void validate() const;
};

struct DistanceDraw
{
    int iteration = 0;
    LatentState state;
    DistanceParams params;
    double log_posterior = 0.0;
    double loglik = 0.0;
};

struct ProjectionDraw
{
    int iteration = 0;
    LatentState state;
    ProjectionParams params;
    std::vector<Eigen::MatrixXd> omega; // per t, n x n; empty unless keep_aux
    double log_posterior = 0.0;
    double loglik = 0.0;
};

template <typename Draw>
struct PosteriorSamples
{
    std::vector<Draw> draws;               // thinned post-burn-in draws
    std::optional<Draw> map_draw;          // best post-burn-in sweep, thinned or not
    std::vector<double> log_posterior_trace; // every iteration
    std::map<std::string, double> acceptance; // post-burn-in acceptance rates
    std::uint64_t seed = 0;

    bool empty() const { return draws.empty(); }
    std::size_t size() const { return draws.size(); }
};

using DistanceSamples = PosteriorSamples<DistanceDraw>;
using ProjectionSamples = PosteriorSamples<ProjectionDraw>;

/// Index of the draw with the largest stored log-posterior (first on ties).
template <typename Draw>
std::size_t map_index(const PosteriorSamples<Draw>& samples)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < samples.draws.size(); ++k) {
        if (samples.draws[k].log_posterior > samples.draws[best].log_posterior) best = k;
    }
    return best;
}

/// The MAP draw: map_draw when the sampler tracked it, else the best thinned
/// draw. Throws InvalidInput on an empty sample set.
const DistanceDraw& map_extract(const DistanceSamples& samples);
const ProjectionDraw& map_extract(const ProjectionSamples& samples);

} // namespace dlsc
