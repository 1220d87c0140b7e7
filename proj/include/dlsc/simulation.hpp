#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/distance_model.hpp"
#include "dlsc/network.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/rng.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

enum class Stickiness { Sticky, Transitory };

struct SimConfig
{
    Geometry geometry = Geometry::Projection;
    int n = 100;
    int T = 10;
    int G = 6;
    int p = 0; // 0 = geometry default (2 distance, 3 projection)
    Stickiness stickiness = Stickiness::Sticky;
    std::uint64_t seed = 1;
    /// Also draw step T+1 and report its true edge probabilities.
    bool next_step = false;
    /// Overrides of the generator defaults.
    std::optional<double> transition_constant;
    std::optional<double> lambda;
    std::optional<double> alpha;
    /// Indices into the six reference communities; empty = default subset.
    std::vector<int> communities;

    void validate() const;
};

/// Row h proportional to 1 / ||mu_k - mu_h|| off the diagonal and
/// c * max_k 1 / ||mu_k - mu_h|| on it.
Eigen::MatrixXd transition_matrix_distance(const std::vector<LatentPoint>& mu, double c);

/// Row h proportional to exp(c * u_h' u_k).
Eigen::MatrixXd transition_matrix_projection(const std::vector<Eigen::VectorXd>& u, double c);

/// The six reference community locations (p = 2) and directions (p = 3).
std::vector<LatentPoint> reference_locations();
std::vector<Eigen::VectorXd> reference_directions();

/// Unit vector from azimuth and elevation in degrees.
Eigen::VectorXd direction_from_angles(double azimuth_deg, double elevation_deg);

/// Default community subset for G reference communities.
std::vector<int> default_community_subset(int G);

struct DistanceSimulation
{
    DynamicNetwork net;
    LatentState truth;
    DistanceParams params;
    std::optional<Eigen::MatrixXd> next_probs; // true P(y_ij at T+1)
    std::optional<Eigen::VectorXi> next_labels;
};

struct ProjectionSimulation
{
    DynamicNetwork net;
    LatentState truth;
    ProjectionParams params;
    std::optional<Eigen::MatrixXd> next_probs;
    std::optional<Eigen::VectorXi> next_labels;
};

DistanceSimulation simulate_distance(const SimConfig& cfg);
ProjectionSimulation simulate_projection(const SimConfig& cfg);

/// Draws one binary slice from edge probabilities (directed).
void draw_edges(DynamicNetwork& net, int t, const Eigen::MatrixXd& probs, RngStream& rng);

} // namespace dlsc
