#pragma once

#include <Eigen/Dense>

#include "dlsc/distance_model.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/rng.hpp"

namespace dlsc {

/// Time-averaged dissimilarities: shortest-path hop counts on the
/// symmetrized binary graph (unreachable pairs get the largest finite
/// distance plus one), or mean mutual ranks for rank payloads.
Eigen::MatrixXd averaged_dissimilarity(const DynamicNetwork& net);

/// Classical multidimensional scaling; returns p x n coordinates.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dissimilarity, int p);

/// Top-p eigenvectors of a symmetric matrix scaled by sqrt(max(eigenvalue, 0)); p x n.
Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& a, int p);

struct KMeansResult
{
    Eigen::VectorXi labels;
    Eigen::MatrixXd centers; // p x k
    double within = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by
/// within-cluster sum of squares. points is p x m.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng, int restarts = 10);

/// Spherical k-means on the directions of the columns of points.
KMeansResult spherical_kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng, int restarts = 10);

struct DistanceStart
{
    LatentState state;
    DistanceParams params;
};

/// Starting point for the Euclidean sampler: MDS positions rescaled to the
/// likelihood by a 1-d search, jittered per time, k-means labels and
/// moment-matched community parameters.
DistanceStart initialize_distance(const DynamicNetwork& net, int G, int p, LikelihoodKind kind,
                                  const DistanceHyperparams& hyper, RngStream& rng);

struct ProjectionStart
{
    LatentState state;
    ProjectionParams params;
};

/// Starting point for the hypersphere model from a spectral embedding of
/// the time-averaged symmetrized adjacency matrix. jitter is relative to the
/// embedding's spread.
ProjectionStart initialize_projection(const DynamicNetwork& net, int G, int p,
                                      const ProjectionHyperparams& hyper, RngStream& rng,
                                      double jitter = 0.02);

/// Community parameters that match the given positions and labels.
void fit_distance_communities(const LatentState& state, DistanceParams& params,
                              const DistanceHyperparams& hyper);
void fit_projection_communities(const LatentState& state, ProjectionParams& params,
                                const ProjectionHyperparams& hyper);

} // namespace dlsc
