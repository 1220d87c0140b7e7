#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/network.hpp"

namespace dlsc {

/// Mann-Whitney AUC with ties counted one half. Throws UndefinedMetric
/// unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Adjusted Rand index over all cells of two equally shaped label matrices.
double corrected_rand(const PartitionSeries& a, const PartitionSeries& b);

/// H(a | b) + H(b | a) in nats over all cells.
double variation_of_information(const PartitionSeries& a, const PartitionSeries& b);

/// Per-time CRI and VI (column t of each argument).
std::vector<double> corrected_rand_by_time(const PartitionSeries& a, const PartitionSeries& b);
std::vector<double> variation_of_information_by_time(const PartitionSeries& a, const PartitionSeries& b);

/// Modularity of one slice under labels z, on the symmetrized adjacency
/// (Y + Y') / 2 with degrees averaged over in and out, summing over i != j.
/// Throws UndefinedMetric on an empty slice.
double modularity(const Eigen::MatrixXd& y, const Eigen::VectorXi& z);

/// Pearson correlation of two equally sized sequences.
double pearson(std::span<const double> a, std::span<const double> b);

} // namespace dlsc
