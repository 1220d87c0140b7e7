#include "dlsc/prediction.hpp"

#include <cmath>
#include <variant>

#include "dlsc/distance_model.hpp"
#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/metrics.hpp"
#include "dlsc/projection_model.hpp"

namespace dlsc {

namespace {

int draw_label(const Eigen::Ref<const Eigen::VectorXd>& probs, RngStream& rng)
{
    double u = rng.uniform() * probs.sum();
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        u -= probs(k);
        if (u <= 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size() - 1);
}

template <typename Samples>
void require_draws(const Samples& samples)
{
    if (samples.empty()) throw InvalidInput("no posterior draws");
}

void require_binary(const LikelihoodVariant& lik)
{
    if (std::holds_alternative<PlackettLuce>(lik)) {
        throw UnsupportedLikelihood("edge probabilities need a binary likelihood");
    }
}

Eigen::MatrixXd next_positions_distance(const LatentState& st, const DistanceParams& params,
                                        const std::vector<Eigen::MatrixXd>& chol, RngStream& rng)
{
    const int T = st.T();
    Eigen::MatrixXd X(st.p(), st.n());
    for (int i = 0; i < st.n(); ++i) {
        const int k = draw_label(params.beta.row(st.Z(i, T - 1)).transpose(), rng);
        const Eigen::VectorXd mean = params.lambda * params.mu[k] + (1.0 - params.lambda) * st.X[T - 1].col(i);
        X.col(i) = sample_mvn(mean, chol[k], rng);
    }
    return X;
}

Eigen::MatrixXd next_positions_projection(const std::vector<int>& last, const ProjectionParams& params,
                                          const Eigen::MatrixXd& beta, RngStream& rng)
{
    const int n = params.n();
    const int p = params.p();
    Eigen::MatrixXd X(p, n);
    for (int i = 0; i < n; ++i) {
        const int k = draw_label(beta.row(last[i]).transpose(), rng);
        const double sd = 1.0 / std::sqrt(params.tau(i));
        for (int l = 0; l < p; ++l) X(l, i) = params.r(i) * params.u[k](l) + sd * rng.normal();
    }
    return X;
}

// scores and 0/1 labels over all dyad-times of a binary network
struct DyadScores
{
    std::vector<double> scores;
    std::vector<int> labels;

    void add(const DynamicNetwork& net, int t, const Eigen::MatrixXd& P)
    {
        const int n = net.n();
        for (int i = 0; i < n; ++i) {
            for (int j = net.directed() ? 0 : i + 1; j < n; ++j) {
                if (i == j) continue;
                scores.push_back(P(i, j));
                labels.push_back(net.y(t, i, j) > 0.5 ? 1 : 0);
            }
        }
    }
};

void require_binary(const DynamicNetwork& net)
{
    if (!net.is_binary()) throw UnsupportedLikelihood("AUC needs a binary network");
}

template <typename Samples>
Eigen::MatrixXd coassign_draws(const Samples& samples, int t)
{
    require_draws(samples);
    if (t < 0 || t >= samples.draws.front().state.T()) throw InvalidInput("time index out of range");
    std::vector<Eigen::VectorXi> labels;
    labels.reserve(samples.size());
    for (const auto& d : samples.draws) labels.emplace_back(d.state.Z.col(t));
    return coassignment_probs(labels);
}

} // namespace

Eigen::MatrixXd one_step_ahead_probs(const DistanceSamples& samples, bool directed, RngStream& rng, int reps)
{
    require_draws(samples);
    if (reps < 1) throw InvalidInput("reps must be positive");
    const int n = samples.draws.front().state.n();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& d : samples.draws) {
        require_binary(d.params.lik);
        std::vector<Eigen::MatrixXd> chol;
        for (const auto& s : d.params.sigma) chol.push_back(robust_cholesky(s));
        for (int r = 0; r < reps; ++r) {
            acc += distance_edge_probs(next_positions_distance(d.state, d.params, chol, rng), d.params.lik, directed);
        }
    }
    return acc / (static_cast<double>(samples.size()) * reps);
}

Eigen::MatrixXd one_step_ahead_probs(const ProjectionSamples& samples, bool directed, RngStream& rng, int reps)
{
    require_draws(samples);
    if (reps < 1) throw InvalidInput("reps must be positive");
    const int n = samples.draws.front().state.n();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& d : samples.draws) {
        const int T = d.state.T();
        std::vector<int> last(n);
        for (int i = 0; i < n; ++i) last[i] = d.state.Z(i, T - 1);
        for (int r = 0; r < reps; ++r) {
            const Eigen::MatrixXd X = next_positions_projection(last, d.params, d.params.beta, rng);
            acc += projection_edge_probs(X, d.params.alpha, d.params.s, directed);
        }
    }
    return acc / (static_cast<double>(samples.size()) * reps);
}

Eigen::MatrixXd one_step_ahead_probs(const VBPosterior& post, RngStream& rng, int draws)
{
    if (draws < 1) throw InvalidInput("draws must be positive");
    const int n = post.n();
    const int T = post.T();
    const int G = post.G();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    ProjectionParams params;
    params.s = Eigen::VectorXd::Ones(n);
    params.r.resize(n);
    params.tau.resize(n);
    params.u.resize(G);
    Eigen::MatrixXd beta(G, G);
    std::vector<int> last(n);
    for (int m = 0; m < draws; ++m) {
        params.alpha = post.alpha_mean + std::sqrt(post.alpha_var) * rng.normal();
        for (int i = 0; i < n; ++i) {
            if (post.directed) params.s(i) = sample_truncated_normal(post.s[i].mean, post.s[i].sd, 0.0, INFINITY, rng);
            params.r(i) = sample_truncated_normal(post.r[i].mean, post.r[i].sd, 0.0, INFINITY, rng);
            params.tau(i) = rng.gamma(post.tau_shape(i)) / post.tau_rate(i);
            last[i] = draw_label(post.z[i].marginals.col(T - 1), rng);
        }
        for (int g = 0; g < G; ++g) {
            params.u[g] = sample_vmf(post.u_natural[g], rng);
            const Eigen::VectorXd row = post.beta_conc.row(g).transpose();
            beta.row(g) = sample_dirichlet({row.data(), static_cast<std::size_t>(G)}, rng).transpose();
        }
        acc += projection_edge_probs(next_positions_projection(last, params, beta, rng), params.alpha, params.s,
                                     post.directed);
    }
    return acc / static_cast<double>(draws);
}

double insample_auc(const DistanceSamples& samples, const DynamicNetwork& net)
{
    require_draws(samples);
    require_binary(net);
    const DistanceDraw& m = map_extract(samples);
    require_binary(m.params.lik);
    DyadScores ds;
    for (int t = 0; t < net.T(); ++t) ds.add(net, t, distance_edge_probs(m.state.X[t], m.params.lik, net.directed()));
    return auc(ds.scores, ds.labels);
}

double insample_auc(const ProjectionSamples& samples, const DynamicNetwork& net)
{
    require_draws(samples);
    require_binary(net);
    const ProjectionDraw& m = map_extract(samples);
    DyadScores ds;
    for (int t = 0; t < net.T(); ++t) {
        ds.add(net, t, projection_edge_probs(m.state.X[t], m.params.alpha, m.params.s, net.directed()));
    }
    return auc(ds.scores, ds.labels);
}

double insample_auc(const VBPosterior& post, const DynamicNetwork& net)
{
    require_binary(net);
    if (post.n() != net.n() || post.T() != net.T()) throw InvalidInput("fit does not match the network");
    DyadScores ds;
    const int n = net.n();
    for (int t = 0; t < net.T(); ++t) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) P(i, j) = vb_predictive_edge_prob(post, i, j, t);
            }
        }
        ds.add(net, t, P);
    }
    return auc(ds.scores, ds.labels);
}

Eigen::MatrixXd coassignment_probs(std::span<const Eigen::VectorXi> labels)
{
    if (labels.empty()) throw InvalidInput("no label vectors");
    const auto n = labels.front().size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& z : labels) {
        if (z.size() != n) throw InvalidInput("label vectors differ in length");
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (z(i) == z(j)) acc(i, j) += 1.0;
            }
        }
    }
    return acc / static_cast<double>(labels.size());
}

Eigen::MatrixXd coassignment_probs(const DistanceSamples& samples, int t)
{
    return coassign_draws(samples, t);
}

Eigen::MatrixXd coassignment_probs(const ProjectionSamples& samples, int t)
{
    return coassign_draws(samples, t);
}

Eigen::MatrixXd coassignment_probs(const VBPosterior& post, int t)
{
    if (t < 0 || t >= post.T()) throw InvalidInput("time index out of range");
    const int n = post.n();
    Eigen::MatrixXd Q(post.G(), n);
    for (int i = 0; i < n; ++i) Q.col(i) = post.z[i].marginals.col(t);
    Eigen::MatrixXd C = Q.transpose() * Q;
    C.diagonal().setOnes();
    return C;
}

} // namespace dlsc
