#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/linalg.hpp"

namespace dlsc {

enum class Payload { Binary, Rank };

/// T slices over n actors. Binary payloads are stored as dense 0/1 matrices
/// (diagonal always 0); rank payloads as, for each (t, i), the rank of every
/// alter (1 = first choice) plus the derived choice ordering.
class DynamicNetwork
{
public:
    DynamicNetwork() = default;

    static DynamicNetwork binary(int n, int T, bool directed);
    static DynamicNetwork ranked(int n, int T);

    int n() const noexcept { return n_; }
    int T() const noexcept { return T_; }
    bool directed() const noexcept { return directed_; }
    Payload payload() const noexcept { return payload_; }
    bool is_binary() const noexcept { return payload_ == Payload::Binary; }

    // binary payload
    double y(int t, int i, int j) const { return adj_[t](i, j); }
    const Eigen::MatrixXd& adjacency(int t) const { return adj_[t]; }
    /// Sets y_ijt (and y_jit when undirected). Self loops are rejected.
    void set_edge(int t, int i, int j, bool present = true);
    /// Sum over t and i != j of y_ijt (each undirected edge counted twice).
    long edge_total() const;
    double density(int t) const;

    // rank payload
    /// Rank of alter j in actor i's row at time t (1..n-1); 0 for j == i.
    int rank(int t, int i, int j) const { return ranks_[t](i, j); }
    /// Sets row (t, i) from the ranks of the alters in index order, skipping i.
    /// Throws InvalidInput unless the values are a permutation of 1..n-1.
    void set_ranks(int t, int i, std::span<const int> alter_ranks);
    /// Alters of i in choice order (first choice first).
    std::span<const int> ordering(int t, int i) const;

    bool operator==(const DynamicNetwork& other) const;

private:
    int n_ = 0;
    int T_ = 0;
    bool directed_ = true;
    Payload payload_ = Payload::Binary;
    std::vector<Eigen::MatrixXd> adj_;
    std::vector<Eigen::MatrixXi> ranks_;
    std::vector<int> orderings_; // (t * n + i) * (n - 1) + k
};

/// Latent positions and hard cluster labels for every actor-time.
/// X[t] is p x n (column i is X_it); Z(i, t) is the label in [0, G).
struct LatentState
{
    std::vector<Eigen::MatrixXd> X;
    Eigen::MatrixXi Z;

    LatentState() = default;
    LatentState(int n, int T, int p);

    int n() const { return static_cast<int>(Z.rows()); }
    int T() const { return static_cast<int>(Z.cols()); }
    int p() const { return X.empty() ? 0 : static_cast<int>(X.front().rows()); }

    auto x(int i, int t) { return X[t].col(i); }
    auto x(int i, int t) const { return X[t].col(i); }

    std::vector<LatentPoint> positions(int t) const;
    /// One-hot encoding of Z(i, t) over G labels.
    Eigen::VectorXd one_hot(int i, int t, int G) const;
};

/// n x T integer label matrix.
using PartitionSeries = Eigen::MatrixXi;

} // namespace dlsc
