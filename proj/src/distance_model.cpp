#include "dlsc/distance_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_simplex(const Eigen::VectorXd& v, double tol = 1e-8)
{
    return v.size() > 0 && (v.array() > 0.0).all() && std::abs(v.sum() - 1.0) < tol;
}

void check_payload(const DynamicNetwork& net, const LikelihoodVariant& lik)
{
    const bool rank_lik = std::holds_alternative<PlackettLuce>(lik);
    if (net.is_binary() == rank_lik) {
        throw UnsupportedLikelihood(std::string("likelihood ") + to_string(kind_of(lik)) +
                                    " does not match the network payload");
    }
}

double dyad_term(double y, double eta)
{
    return y * eta - log1p_exp(eta);
}

double symmetric_eta(const LikelihoodVariant& lik, int i, int j, double d)
{
    if (const auto* dc = std::get_if<DegreeCorrected>(&lik)) {
        return 0.5 * (dc->beta_in + dc->beta_out) * (2.0 - d / dc->s(i) - d / dc->s(j));
    }
    return distance_eta(lik, i, j, d);
}

Eigen::VectorXd distances_from(const Eigen::MatrixXd& Xt, const Eigen::VectorXd& x)
{
    return (Xt.colwise() - x).colwise().norm().transpose();
}

} // namespace

LikelihoodKind kind_of(const LikelihoodVariant& lik)
{
    return static_cast<LikelihoodKind>(lik.index());
}

const char* to_string(LikelihoodKind kind)
{
    switch (kind) {
    case LikelihoodKind::Logistic: return "logistic";
    case LikelihoodKind::DegreeCorrected: return "degree-corrected";
    case LikelihoodKind::PlackettLuce: return "plackett-luce";
    }
    return "?";
}

LikelihoodKind likelihood_kind_from_string(const std::string& name)
{
    if (name == "logistic") return LikelihoodKind::Logistic;
    if (name == "degree-corrected") return LikelihoodKind::DegreeCorrected;
    if (name == "plackett-luce") return LikelihoodKind::PlackettLuce;
    throw InvalidInput("unknown likelihood '" + name + "'");
}

double edge_prob_logistic(double alpha, double d)
{
    return logistic(alpha - d);
}

double edge_prob_degree_corrected(double beta_in, double beta_out, double s_i, double s_j, double d)
{
    return logistic(beta_in * (1.0 - d / s_j) + beta_out * (1.0 - d / s_i));
}

double distance_eta(const LikelihoodVariant& lik, int i, int j, double d)
{
    if (const auto* lg = std::get_if<Logistic>(&lik)) return lg->alpha - d;
    if (const auto* dc = std::get_if<DegreeCorrected>(&lik)) {
        return dc->beta_in * (1.0 - d / dc->s(j)) + dc->beta_out * (1.0 - d / dc->s(i));
    }
    throw UnsupportedLikelihood("rank likelihood has no binary linear predictor");
}

double rank_loglik_plackett_luce(std::span<const int> ordering, const Eigen::VectorXd& s,
                                 const Eigen::VectorXd& d_row)
{
    const auto m = ordering.size();
    std::vector<char> seen(s.size(), 0);
    std::vector<double> w(m);
    for (std::size_t k = 0; k < m; ++k) {
        const int j = ordering[k];
        if (j < 0 || j >= s.size() || seen[j]++) {
            throw InvalidInput("ordering is not a permutation of the alters");
        }
        w[k] = std::log(s(j)) - d_row(j);
    }
    double out = 0.0;
    double tail = kNegInf; // log sum of weights of alters still available
    for (std::size_t k = m; k-- > 0;) {
        const double hi = std::max(tail, w[k]);
        tail = hi + std::log(std::exp(tail - hi) + std::exp(w[k] - hi));
        out += w[k] - tail;
    }
    return out;
}

double distance_loglik(const DynamicNetwork& net, const LatentState& state,
                       const LikelihoodVariant& lik)
{
    check_payload(net, lik);
    const int n = net.n();
    double total = 0.0;
    for (int t = 0; t < net.T(); ++t) {
        const auto& Xt = state.X[t];
        if (!net.is_binary()) {
            const auto& s = std::get<PlackettLuce>(lik).s;
            for (int i = 0; i < n; ++i) {
                total += rank_loglik_plackett_luce(net.ordering(t, i), s,
                                                   distances_from(Xt, Xt.col(i)));
            }
            continue;
        }
        const auto& Y = net.adjacency(t);
        for (int i = 0; i < n; ++i) {
            for (int j = net.directed() ? 0 : i + 1; j < n; ++j) {
                if (i == j) continue;
                const double d = (Xt.col(i) - Xt.col(j)).norm();
                const double eta = net.directed() ? distance_eta(lik, i, j, d)
                                                  : symmetric_eta(lik, i, j, d);
                total += dyad_term(Y(i, j), eta);
            }
        }
    }
    return total;
}

double distance_loglik_actor(const DynamicNetwork& net, const Eigen::MatrixXd& Xt, int t, int i,
                             const Eigen::VectorXd& x, const LikelihoodVariant& lik)
{
    const int n = net.n();
    const Eigen::VectorXd di = distances_from(Xt, x);
    double total = 0.0;
    if (!net.is_binary()) {
        const auto& s = std::get<PlackettLuce>(lik).s;
        Eigen::VectorXd row = di;
        total += rank_loglik_plackett_luce(net.ordering(t, i), s, row);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            Eigen::VectorXd dj = distances_from(Xt, Xt.col(j));
            dj(i) = di(j);
            total += rank_loglik_plackett_luce(net.ordering(t, j), s, dj);
        }
        return total;
    }
    const auto& Y = net.adjacency(t);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (net.directed()) {
            total += dyad_term(Y(i, j), distance_eta(lik, i, j, di(j)));
            total += dyad_term(Y(j, i), distance_eta(lik, j, i, di(j)));
        } else {
            total += dyad_term(Y(i, j), symmetric_eta(lik, i, j, di(j)));
        }
    }
    return total;
}

Eigen::MatrixXd distance_edge_probs(const Eigen::MatrixXd& Xt, const LikelihoodVariant& lik, bool directed)
{
    const auto n = Xt.cols();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = (Xt.col(i) - Xt.col(j)).norm();
            const int a = static_cast<int>(i);
            const int b = static_cast<int>(j);
            P(i, j) = logistic(directed ? distance_eta(lik, a, b, d) : symmetric_eta(lik, a, b, d));
        }
    }
    return P;
}

void DistanceParams::validate() const
{
    const int g = G();
    if (g < 1) throw InvalidInput("distance params need at least one community");
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("lambda must lie in (0, 1)");
    if (!(tau2 > 0.0)) throw InvalidInput("tau2 must be positive");
    if (static_cast<int>(sigma.size()) != g) throw InvalidInput("one shape per community required");
    if (gamma.size() != p() || !(gamma.array() > 0.0).all()) {
        throw InvalidInput("gamma must have p positive entries");
    }
    if (beta0.size() != g || !is_simplex(beta0)) throw InvalidInput("beta0 must be a simplex of length G");
    if (beta.rows() != g || beta.cols() != g) throw InvalidInput("beta must be G x G");
    for (int h = 0; h < g; ++h) {
        if (!is_simplex(beta.row(h).transpose())) throw InvalidInput("transition rows must be simplexes");
    }
    for (const auto& m : mu) {
        if (m.size() != p()) throw InvalidInput("community locations have mixed dimensions");
    }
    for (const auto& s : sigma) robust_cholesky(s);
    if (const auto* dc = std::get_if<DegreeCorrected>(&lik)) {
        if (!is_simplex(dc->s)) throw InvalidInput("degree-corrected s must be a simplex");
    }
    if (const auto* pl = std::get_if<PlackettLuce>(&lik)) {
        if (!is_simplex(pl->s)) throw InvalidInput("Plackett-Luce s must be a simplex");
    }
}

void DistanceHyperparams::validate() const
{
    if (!(xi_lambda > 0.0 && a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0 && beta_pseudo > 0.0 &&
          lik_prior_var > 0.0 && s_pseudo > 0.0)) {
        throw InvalidInput("distance hyperparameters must be positive");
    }
}

double distance_emission_logpdf(const DistanceParams& params, const GaussianFactor& fk, int k,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::VectorXd* prev)
{
    if (prev == nullptr) return fk.logpdf(x, params.mu[k]);
    return fk.logpdf(x, params.lambda * params.mu[k] + (1.0 - params.lambda) * *prev);
}

double joint_logdensity_xz(const LatentState& state, const DistanceParams& params)
{
    const int G = params.G();
    if (state.p() != params.p()) throw InvalidInput("latent dimension mismatch");
    std::vector<GaussianFactor> f;
    f.reserve(G);
    for (const auto& s : params.sigma) f.emplace_back(s);

    double total = 0.0;
    for (int i = 0; i < state.n(); ++i) {
        Eigen::VectorXd prev;
        for (int t = 0; t < state.T(); ++t) {
            const int k = state.Z(i, t);
            if (k < 0 || k >= G) throw InvalidInput("label out of range");
            const double w = t == 0 ? params.beta0(k) : params.beta(state.Z(i, t - 1), k);
            if (!(w > 0.0)) return kNegInf;
            total += std::log(w) +
                     distance_emission_logpdf(params, f[k], k, state.x(i, t), t == 0 ? nullptr : &prev);
            prev = state.x(i, t);
        }
    }
    return total;
}

double distance_log_prior(const DistanceParams& params, const DistanceHyperparams& hyper)
{
    const int G = params.G();
    const int p = params.p();
    const double sd = std::sqrt(hyper.xi_lambda);
    double lp = spherical_logpdf(Eigen::VectorXd::Constant(1, params.lambda),
                                 Eigen::VectorXd::Constant(1, hyper.nu_lambda), 1.0 / hyper.xi_lambda) -
                log_truncated_normal_mass(hyper.nu_lambda, sd, 0.0, 1.0);

    const Eigen::MatrixXd psi = params.gamma.asDiagonal();
    for (int g = 0; g < G; ++g) {
        lp += spherical_logpdf(params.mu[g], Eigen::VectorXd::Zero(p), 1.0 / params.tau2);
        lp += inverse_wishart_logpdf(params.sigma[g], p + 1.0, psi);
    }
    lp += hyper.a * std::log(hyper.b) - std::lgamma(hyper.a) - (hyper.a + 1.0) * std::log(params.tau2) -
          hyper.b / params.tau2;
    for (int l = 0; l < p; ++l) {
        const double gl = params.gamma(l);
        lp += hyper.c * std::log(hyper.d) - std::lgamma(hyper.c) + (hyper.c - 1.0) * std::log(gl) -
              hyper.d * gl;
    }
    const std::vector<double> pseudo(G, hyper.beta_pseudo);
    lp += dirichlet_logpdf({params.beta0.data(), static_cast<std::size_t>(G)}, pseudo);
    for (int h = 0; h < G; ++h) {
        const Eigen::VectorXd row = params.beta.row(h).transpose();
        lp += dirichlet_logpdf({row.data(), static_cast<std::size_t>(G)}, pseudo);
    }

    const double v = hyper.lik_prior_var;
    auto normal0 = [v](double x) { return -0.5 * (kLog2Pi + std::log(v) + x * x / v); };
    auto s_prior = [&hyper](const Eigen::VectorXd& s) {
        const std::vector<double> a(s.size(), hyper.s_pseudo);
        return dirichlet_logpdf({s.data(), static_cast<std::size_t>(s.size())}, a);
    };
    if (const auto* lg = std::get_if<Logistic>(&params.lik)) {
        lp += normal0(lg->alpha);
    } else if (const auto* dc = std::get_if<DegreeCorrected>(&params.lik)) {
        lp += normal0(dc->beta_in) + normal0(dc->beta_out) + s_prior(dc->s);
    } else {
        lp += s_prior(std::get<PlackettLuce>(params.lik).s);
    }
    return lp;
}

int distance_lik_dim(const LikelihoodVariant& lik, int n)
{
    switch (kind_of(lik)) {
    case LikelihoodKind::Logistic: return 1;
    case LikelihoodKind::DegreeCorrected: return 2 + (n - 1);
    case LikelihoodKind::PlackettLuce: return n - 1;
    }
    return 0;
}

int distance_prior_dim(int G, int p)
{
    return 1 + G * p + G * p * (p + 1) / 2 + (G - 1) + G * (G - 1);
}

} // namespace dlsc
