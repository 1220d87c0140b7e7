#include "dlsc/projection_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

bool is_simplex(const Eigen::VectorXd& v)
{
    return v.size() > 0 && (v.array() > 0.0).all() && std::abs(v.sum() - 1.0) < 1e-8;
}

void require_binary(const DynamicNetwork& net)
{
    if (!net.is_binary()) {
        throw UnsupportedLikelihood("the projection model is defined for binary payloads only");
    }
}

} // namespace

void ProjectionParams::validate() const
{
    const int g = G();
    if (g < 1) throw InvalidInput("projection params need at least one community");
    for (const auto& v : u) {
        if (v.size() != p() || std::abs(v.norm() - 1.0) > 1e-12) {
            throw InvalidInput("community directions must be unit vectors of equal length");
        }
    }
    if (s.size() != r.size() || tau.size() != r.size()) throw InvalidInput("actor parameter lengths differ");
    if (!(s.array() > 0.0).all() || !(r.array() > 0.0).all() || !(tau.array() > 0.0).all()) {
        throw InvalidInput("s, r and tau must be positive");
    }
    if (beta0.size() != g || !is_simplex(beta0)) throw InvalidInput("beta0 must be a simplex of length G");
    if (beta.rows() != g || beta.cols() != g) throw InvalidInput("beta must be G x G");
    for (int h = 0; h < g; ++h) {
        if (!is_simplex(beta.row(h).transpose())) throw InvalidInput("transition rows must be simplexes");
    }
}

void ProjectionHyperparams::validate() const
{
    if (!(c > 0.0 && a2 > 0.0 && b2 > 0.0 && b3 > 0.0 && beta_pseudo > 0.0)) {
        throw InvalidInput("projection hyperparameters must be positive");
    }
}

double eta_projection_angular(double alpha, double s_j, const Eigen::VectorXd& x_i,
                              const Eigen::VectorXd& x_j)
{
    const double ni = x_i.norm();
    const double nj = x_j.norm();
    if (ni == 0.0 || nj == 0.0) return alpha;
    const double cosine = std::clamp(x_i.dot(x_j) / (ni * nj), -1.0, 1.0);
    return alpha + ni * (s_j * nj) * cosine;
}

double loglik_projection(const DynamicNetwork& net, const LatentState& state, double alpha,
                         const Eigen::VectorXd& s)
{
    require_binary(net);
    const int n = net.n();
    const bool directed = net.directed();
    double total = 0.0;
    for (int t = 0; t < net.T(); ++t) {
        const auto& Xt = state.X[t];
        const Eigen::MatrixXd gram = Xt.transpose() * Xt;
        const auto& Y = net.adjacency(t);
        for (int i = 0; i < n; ++i) {
            for (int j = directed ? 0 : i + 1; j < n; ++j) {
                if (i == j) continue;
                const double eta = alpha + (directed ? s(j) : 1.0) * gram(i, j);
                total += Y(i, j) * eta - log1p_exp(eta);
            }
        }
    }
    return total;
}

Eigen::MatrixXd projection_edge_probs(const Eigen::MatrixXd& Xt, double alpha, const Eigen::VectorXd& s,
                                      bool directed)
{
    const auto n = Xt.cols();
    Eigen::MatrixXd P = Xt.transpose() * Xt;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            P(i, j) = i == j ? 0.0 : logistic(alpha + (directed ? s(j) : 1.0) * P(i, j));
        }
    }
    return P;
}

double joint_logdensity_xz_proj(const LatentState& state, const ProjectionParams& params)
{
    const int G = params.G();
    if (state.p() != params.p()) throw InvalidInput("latent dimension mismatch");
    for (const auto& v : params.u) {
        if (std::abs(v.norm() - 1.0) > 1e-12) throw InvalidInput("community directions must be unit vectors");
    }
    double total = 0.0;
    for (int i = 0; i < state.n(); ++i) {
        for (int t = 0; t < state.T(); ++t) {
            const int k = state.Z(i, t);
            if (k < 0 || k >= G) throw InvalidInput("label out of range");
            const double w = t == 0 ? params.beta0(k) : params.beta(state.Z(i, t - 1), k);
            if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
            total += std::log(w) + spherical_logpdf(state.x(i, t), params.r(i) * params.u[k], params.tau(i));
        }
    }
    return total;
}

double pg_augmented_logjoint(int y, double omega, double eta)
{
    return -std::numbers::ln2 + (y - 0.5) * eta - 0.5 * omega * eta * eta + polya_gamma_logpdf(omega);
}

double projection_log_prior(const ProjectionParams& params, const ProjectionHyperparams& hyper,
                            bool directed)
{
    const int G = params.G();
    double lp = -0.5 * (kLog2Pi + std::log(hyper.b3) + params.alpha * params.alpha / hyper.b3);
    for (int i = 0; i < params.n(); ++i) {
        const double tau = params.tau(i);
        if (directed) lp -= params.s(i);
        lp += std::log(tau / hyper.c) - tau * params.r(i) / hyper.c;
        lp += -std::lgamma(hyper.a2) - hyper.a2 * std::log(hyper.b2) + (hyper.a2 - 1.0) * std::log(tau) -
              tau / hyper.b2;
    }
    lp += G * log_uniform_sphere_density(params.p());
    const std::vector<double> pseudo(G, hyper.beta_pseudo);
    lp += dirichlet_logpdf({params.beta0.data(), static_cast<std::size_t>(G)}, pseudo);
    for (int h = 0; h < G; ++h) {
        const Eigen::VectorXd row = params.beta.row(h).transpose();
        lp += dirichlet_logpdf({row.data(), static_cast<std::size_t>(G)}, pseudo);
    }
    return lp;
}

int projection_lik_dim(int n, bool directed)
{
    return directed ? 1 + n : 1;
}

int projection_prior_dim(int G, int p, int n)
{
    return 3 * n + G * (p - 1) + (G - 1) + G * (G - 1);
}

} // namespace dlsc
