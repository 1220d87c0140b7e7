#include "dlsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

struct Contingency
{
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows;
    std::map<int, double> cols;
    double total = 0.0;
};

template <typename A, typename B>
Contingency tabulate(const A& a, const B& b)
{
    Contingency c;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const int x = a(k);
        const int y = b(k);
        c.joint[{x, y}] += 1.0;
        c.rows[x] += 1.0;
        c.cols[y] += 1.0;
        c.total += 1.0;
    }
    return c;
}

void check_shapes(const PartitionSeries& a, const PartitionSeries& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("partition shapes differ");
    if (a.size() == 0) throw InvalidInput("empty partitions");
}

double choose2(double x)
{
    return 0.5 * x * (x - 1.0);
}

double ari(const Contingency& c)
{
    double index = 0.0;
    double sa = 0.0;
    double sb = 0.0;
    for (const auto& [key, v] : c.joint) index += choose2(v);
    for (const auto& [key, v] : c.rows) sa += choose2(v);
    for (const auto& [key, v] : c.cols) sb += choose2(v);
    const double pairs = choose2(c.total);
    if (pairs == 0.0) return 1.0;
    const double expected = sa * sb / pairs;
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return index == max_index ? 1.0 : 0.0;
    return (index - expected) / (max_index - expected);
}

double vi(const Contingency& c)
{
    auto entropy = [&c](const auto& counts) {
        double h = 0.0;
        for (const auto& [key, v] : counts) h -= v / c.total * std::log(v / c.total);
        return h;
    };
    const double hab = entropy(c.joint);
    return std::max(0.0, 2.0 * hab - entropy(c.rows) - entropy(c.cols));
}

} // namespace

double auc(std::span<const double> scores, std::span<const int> labels)
{
    if (scores.size() != labels.size()) throw InvalidInput("auc: scores and labels differ in length");
    const std::size_t m = scores.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
    double rank_sum = 0.0;
    double pos = 0.0;
    for (std::size_t k = 0; k < m;) {
        std::size_t e = k;
        while (e + 1 < m && scores[order[e + 1]] == scores[order[k]]) ++e;
        const double avg_rank = 0.5 * (k + e) + 1.0;
        for (std::size_t q = k; q <= e; ++q) {
            if (labels[order[q]] != 0) {
                rank_sum += avg_rank;
                pos += 1.0;
            }
        }
        k = e + 1;
    }
    const double neg = static_cast<double>(m) - pos;
    if (pos == 0.0 || neg == 0.0) throw UndefinedMetric("auc needs both classes");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double corrected_rand(const PartitionSeries& a, const PartitionSeries& b)
{
    check_shapes(a, b);
    return ari(tabulate(a.reshaped(), b.reshaped()));
}

double variation_of_information(const PartitionSeries& a, const PartitionSeries& b)
{
    check_shapes(a, b);
    return vi(tabulate(a.reshaped(), b.reshaped()));
}

std::vector<double> corrected_rand_by_time(const PartitionSeries& a, const PartitionSeries& b)
{
    check_shapes(a, b);
    std::vector<double> out;
    for (Eigen::Index t = 0; t < a.cols(); ++t) out.push_back(ari(tabulate(a.col(t), b.col(t))));
    return out;
}

std::vector<double> variation_of_information_by_time(const PartitionSeries& a, const PartitionSeries& b)
{
    check_shapes(a, b);
    std::vector<double> out;
    for (Eigen::Index t = 0; t < a.cols(); ++t) out.push_back(vi(tabulate(a.col(t), b.col(t))));
    return out;
}

double modularity(const Eigen::MatrixXd& y, const Eigen::VectorXi& z)
{
    const auto n = y.rows();
    if (y.cols() != n || z.size() != n) throw InvalidInput("modularity: shape mismatch");
    Eigen::MatrixXd ys = 0.5 * (y + y.transpose());
    ys.diagonal().setZero();
    const Eigen::VectorXd k = ys.rowwise().sum();
    const double two_s = k.sum();
    if (!(two_s > 0.0)) throw UndefinedMetric("modularity of an empty graph");
    double q = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && z(i) == z(j)) q += ys(i, j) - k(i) * k(j) / two_s;
        }
    }
    return q / two_s;
}

double pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) throw InvalidInput("pearson: need two equal-length sequences");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw UndefinedMetric("pearson: constant sequence");
    return sab / std::sqrt(saa * sbb);
}

} // namespace dlsc
