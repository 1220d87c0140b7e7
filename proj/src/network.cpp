#include "dlsc/network.hpp"

#include <algorithm>
#include <string>

#include "dlsc/errors.hpp"

namespace dlsc {

DynamicNetwork DynamicNetwork::binary(int n, int T, bool directed)
{
    if (n < 1 || T < 1) throw InvalidInput("network needs n >= 1 and T >= 1");
    DynamicNetwork net;
    net.n_ = n;
    net.T_ = T;
    net.directed_ = directed;
    net.payload_ = Payload::Binary;
    net.adj_.assign(T, Eigen::MatrixXd::Zero(n, n));
    return net;
}

DynamicNetwork DynamicNetwork::ranked(int n, int T)
{
    if (n < 2 || T < 1) throw InvalidInput("rank network needs n >= 2 and T >= 1");
    DynamicNetwork net;
    net.n_ = n;
    net.T_ = T;
    net.directed_ = true;
    net.payload_ = Payload::Rank;
    net.ranks_.assign(T, Eigen::MatrixXi::Zero(n, n));
    net.orderings_.assign(static_cast<std::size_t>(T) * n * (n - 1), -1);
    return net;
}

void DynamicNetwork::set_edge(int t, int i, int j, bool present)
{
    if (!is_binary()) throw InvalidInput("set_edge on a rank network");
    if (t < 0 || t >= T_ || i < 0 || i >= n_ || j < 0 || j >= n_) {
        throw InvalidInput("edge index out of range");
    }
    if (i == j) throw InvalidInput("self loops are not allowed");
    const double v = present ? 1.0 : 0.0;
    adj_[t](i, j) = v;
    if (!directed_) adj_[t](j, i) = v;
}

long DynamicNetwork::edge_total() const
{
    double total = 0.0;
    for (const auto& a : adj_) total += a.sum();
    return static_cast<long>(total);
}

double DynamicNetwork::density(int t) const
{
    if (n_ < 2) return 0.0;
    return adj_[t].sum() / (static_cast<double>(n_) * (n_ - 1));
}

void DynamicNetwork::set_ranks(int t, int i, std::span<const int> alter_ranks)
{
    if (payload_ != Payload::Rank) throw InvalidInput("set_ranks on a binary network");
    if (t < 0 || t >= T_ || i < 0 || i >= n_) throw InvalidInput("rank row index out of range");
    const int m = n_ - 1;
    if (static_cast<int>(alter_ranks.size()) != m) {
        throw InvalidInput("rank row must have n - 1 entries");
    }
    std::vector<int> seen(m + 1, 0);
    for (int r : alter_ranks) {
        if (r < 1 || r > m || seen[r]++) {
            throw InvalidInput("rank row is not a permutation of 1..n-1");
        }
    }
    int* order = &orderings_[(static_cast<std::size_t>(t) * n_ + i) * m];
    int k = 0;
    for (int j = 0; j < n_; ++j) {
        if (j == i) {
            ranks_[t](i, j) = 0;
            continue;
        }
        const int r = alter_ranks[k++];
        ranks_[t](i, j) = r;
        order[r - 1] = j;
    }
}

std::span<const int> DynamicNetwork::ordering(int t, int i) const
{
    const std::size_t m = n_ - 1;
    return {&orderings_[(static_cast<std::size_t>(t) * n_ + i) * m], m};
}

bool DynamicNetwork::operator==(const DynamicNetwork& other) const
{
    if (n_ != other.n_ || T_ != other.T_ || directed_ != other.directed_ ||
        payload_ != other.payload_) {
        return false;
    }
    for (int t = 0; t < T_; ++t) {
        if (is_binary() ? adj_[t] != other.adj_[t] : ranks_[t] != other.ranks_[t]) return false;
    }
    return true;
}

LatentState::LatentState(int n, int T, int p)
    : X(T, Eigen::MatrixXd::Zero(p, n)), Z(Eigen::MatrixXi::Zero(n, T))
{}

std::vector<LatentPoint> LatentState::positions(int t) const
{
    std::vector<LatentPoint> out;
    out.reserve(n());
    for (int i = 0; i < n(); ++i) out.emplace_back(X[t].col(i));
    return out;
}

Eigen::VectorXd LatentState::one_hot(int i, int t, int G) const
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(G);
    v(Z(i, t)) = 1.0;
    return v;
}

} // namespace dlsc
