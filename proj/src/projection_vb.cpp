#include "dlsc/projection_vb.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dlsc/errors.hpp"
#include "dlsc/init.hpp"

namespace dlsc {

namespace {

double lgamma_sum(const Eigen::VectorXd& a)
{
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += std::lgamma(a(k));
    return s;
}

// E[log theta] under Dirichlet(a).
Eigen::VectorXd dirichlet_elog(const Eigen::VectorXd& a)
{
    const double total = digamma(a.sum());
    Eigen::VectorXd out(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) out(k) = digamma(a(k)) - total;
    return out;
}

// E[log Dir(theta | prior)] with theta ~ Dir(a), and the entropy of Dir(a).
double dirichlet_cross(const Eigen::VectorXd& a, double prior)
{
    const auto G = static_cast<double>(a.size());
    return std::lgamma(G * prior) - G * std::lgamma(prior) + (prior - 1.0) * dirichlet_elog(a).sum();
}

double dirichlet_entropy(const Eigen::VectorXd& a)
{
    const double a0 = a.sum();
    const auto G = static_cast<double>(a.size());
    double h = lgamma_sum(a) - std::lgamma(a0) + (a0 - G) * digamma(a0);
    for (Eigen::Index k = 0; k < a.size(); ++k) h -= (a(k) - 1.0) * digamma(a(k));
    return h;
}

double gamma_entropy(double shape, double rate)
{
    return shape - std::log(rate) + std::lgamma(shape) + (1.0 - shape) * digamma(shape);
}

double elog_tau(const VBPosterior& q, int i)
{
    return digamma(q.tau_shape(i)) - std::log(q.tau_rate(i));
}

// Per-time moment tables for the likelihood blocks.
struct SliceMoments
{
    Eigen::MatrixXd gram;  // m_i' m_j
    Eigen::MatrixXd trss;  // tr(S_i S_j) with S = m m' + V
};

SliceMoments slice_moments(const VBPosterior& q, int t)
{
    const auto& M = q.x_mean[t];
    const int n = q.n();
    const int p = q.p();
    SliceMoments out;
    out.gram = M.transpose() * M;
    Eigen::MatrixXd quad(n, n); // (i, j) = m_i' V_j m_i
    Eigen::MatrixXd flat(p * p, n);
    for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXd VM = q.x_cov[t][j] * M;
        quad.col(j) = M.cwiseProduct(VM).colwise().sum().transpose();
        flat.col(j) = q.x_cov[t][j].reshaped();
    }
    out.trss = out.gram.cwiseAbs2() + quad + quad.transpose() + flat.transpose() * flat;
    return out;
}

// E_q ||X_it - r_i u_k||^2 for each k.
Eigen::VectorXd expected_sq_dev(const VBPosterior& q, const std::vector<Eigen::VectorXd>& eu, int i, int t)
{
    const auto m = q.x_mean[t].col(i);
    const double base = m.squaredNorm() + q.x_cov[t][i].trace() + q.r[i].second;
    Eigen::VectorXd out(q.G());
    for (int k = 0; k < q.G(); ++k) out(k) = base - 2.0 * q.r[i].first * eu[k].dot(m);
    return out;
}

std::vector<Eigen::VectorXd> u_means(const VBPosterior& q)
{
    std::vector<Eigen::VectorXd> eu;
    for (int g = 0; g < q.G(); ++g) eu.push_back(q.u_mean(g));
    return eu;
}

template <typename F>
void for_each_dyad(int n, bool directed, F&& f)
{
    for (int i = 0; i < n; ++i) {
        for (int j = directed ? 0 : i + 1; j < n; ++j) {
            if (i != j) f(i, j);
        }
    }
}

} // namespace

void VBConfig::validate() const
{
    if (max_sweeps < 1 || restarts < 1) throw ConfigError("VB needs at least one sweep and one restart");
    if (!(tolerance >= 0.0) || !(jitter >= 0.0)) throw ConfigError("VB tolerance and jitter must be nonnegative");
}

Eigen::VectorXd VBPosterior::u_mean(int g) const
{
    const double kappa = u_natural[g].norm();
    if (kappa == 0.0) return Eigen::VectorXd::Zero(p());
    return vmf_mean_resultant(p(), kappa) * u_natural[g] / kappa;
}

double VBPosterior::expected_eta(int i, int j, int t) const
{
    return alpha_mean + s_mean(j) * x_mean[t].col(i).dot(x_mean[t].col(j));
}

double VBPosterior::expected_eta2(int i, int j, int t) const
{
    const auto mi = x_mean[t].col(i);
    const auto mj = x_mean[t].col(j);
    const auto& Vi = x_cov[t][i];
    const auto& Vj = x_cov[t][j];
    const double g = mi.dot(mj);
    const double trss = g * g + mi.dot(Vj * mi) + mj.dot(Vi * mj) + (Vi.cwiseProduct(Vj)).sum();
    return alpha_mean * alpha_mean + alpha_var + 2.0 * alpha_mean * s_mean(j) * g + s_second(j) * trss;
}

Eigen::MatrixXi VBPosterior::hard_labels() const
{
    Eigen::MatrixXi z(n(), T());
    for (int i = 0; i < n(); ++i) {
        for (int t = 0; t < T(); ++t) {
            Eigen::Index k;
            this->z[i].marginals.col(t).maxCoeff(&k);
            z(i, t) = static_cast<int>(k);
        }
    }
    return z;
}

LatentState VBPosterior::point_state() const
{
    LatentState st(n(), T(), p());
    st.X = x_mean;
    st.Z = hard_labels();
    return st;
}

ProjectionParams VBPosterior::point_params() const
{
    ProjectionParams out;
    out.alpha = alpha_mean;
    out.s.resize(n());
    out.r.resize(n());
    out.tau.resize(n());
    for (int i = 0; i < n(); ++i) {
        out.s(i) = s_mean(i);
        out.r(i) = r[i].first;
        out.tau(i) = tau_mean(i);
    }
    for (int g = 0; g < G(); ++g) {
        const double kappa = u_natural[g].norm();
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(p());
        if (kappa > 0.0) {
            dir = u_natural[g] / kappa;
        } else {
            dir(0) = 1.0;
        }
        out.u.push_back(dir);
    }
    out.beta0 = beta0_conc / beta0_conc.sum();
    out.beta = beta_conc;
    for (int h = 0; h < G(); ++h) out.beta.row(h) /= beta_conc.row(h).sum();
    return out;
}

ChainLogWeights vb_z_weights(const VBPosterior& q, int i)
{
    const int G = q.G();
    const int T = q.T();
    const int p = q.p();
    const auto eu = u_means(q);
    ChainLogWeights w;
    w.log_init = dirichlet_elog(q.beta0_conc);
    w.log_trans.resize(G, G);
    for (int h = 0; h < G; ++h) w.log_trans.row(h) = dirichlet_elog(q.beta_conc.row(h).transpose()).transpose();
    w.log_emit.resize(G, T);
    const double etau = q.tau_mean(i);
    const double norm = 0.5 * p * (elog_tau(q, i) - kLog2Pi);
    for (int t = 0; t < T; ++t) w.log_emit.col(t) = (norm - 0.5 * etau * expected_sq_dev(q, eu, i, t).array()).matrix();
    return w;
}

double vb_elbo(const DynamicNetwork& net, const VBPosterior& q, const ProjectionHyperparams& hyper)
{
    const int n = q.n();
    const int T = q.T();
    const int p = q.p();
    const int G = q.G();
    const bool directed = q.directed;
    double elbo = 0.0;

    // likelihood with the PG factors
    for (int t = 0; t < T; ++t) {
        const SliceMoments mom = slice_moments(q, t);
        const auto& Y = net.adjacency(t);
        const auto& c = q.omega_tilt[t];
        for_each_dyad(n, directed, [&](int i, int j) {
            const double sm = q.s_mean(j);
            const double eta = q.alpha_mean + sm * mom.gram(i, j);
            const double eta2 = q.alpha_mean * q.alpha_mean + q.alpha_var + 2.0 * q.alpha_mean * sm * mom.gram(i, j) +
                                q.s_second(j) * mom.trss(i, j);
            const double ci = c(i, j);
            const double ew = polya_gamma_mean(ci);
            elbo += (Y(i, j) - 0.5) * eta - 0.5 * ew * eta2 - std::numbers::ln2 - log_cosh(0.5 * ci) +
                    0.5 * ci * ci * ew;
        });
    }

    // latent positions and labels
    const auto eu = u_means(q);
    const Eigen::VectorXd el0 = dirichlet_elog(q.beta0_conc);
    Eigen::MatrixXd elb(G, G);
    for (int h = 0; h < G; ++h) elb.row(h) = dirichlet_elog(q.beta_conc.row(h).transpose()).transpose();
    for (int i = 0; i < n; ++i) {
        const auto& zi = q.z[i];
        const double etau = q.tau_mean(i);
        const double norm = 0.5 * p * (elog_tau(q, i) - kLog2Pi);
        elbo += zi.marginals.col(0).dot(el0);
        for (int t = 0; t < T; ++t) {
            elbo += zi.marginals.col(t).dot((norm - 0.5 * etau * expected_sq_dev(q, eu, i, t).array()).matrix());
            if (t + 1 < T) elbo += zi.pairwise[t].cwiseProduct(elb).sum();
            const Eigen::LLT<Eigen::MatrixXd> llt(q.x_cov[t][i]);
            elbo += llt.matrixLLT().diagonal().array().log().sum() + 0.5 * p * (kLog2Pi + 1.0);
        }
        elbo += q.z_entropy(i);
    }

    // actor parameters
    for (int i = 0; i < n; ++i) {
        const double et = q.tau_mean(i);
        const double elt = elog_tau(q, i);
        elbo += elt - std::log(hyper.c) - et * q.r[i].first / hyper.c;
        elbo += -std::lgamma(hyper.a2) - hyper.a2 * std::log(hyper.b2) + (hyper.a2 - 1.0) * elt - et / hyper.b2;
        elbo += gamma_entropy(q.tau_shape(i), q.tau_rate(i)) + q.r[i].entropy;
        if (directed) elbo += -q.s[i].first + q.s[i].entropy;
    }

    // alpha
    elbo += -0.5 * (kLog2Pi + std::log(hyper.b3)) - 0.5 * (q.alpha_mean * q.alpha_mean + q.alpha_var) / hyper.b3;
    elbo += 0.5 * (kLog2Pi + 1.0 + std::log(q.alpha_var));

    // directions: uniform prior, vMF factors
    for (int g = 0; g < G; ++g) {
        const double kappa = q.u_natural[g].norm();
        elbo += log_uniform_sphere_density(p) - vmf_log_normalizer(p, kappa) - kappa * vmf_mean_resultant(p, kappa);
    }

    // transitions
    elbo += dirichlet_cross(q.beta0_conc, hyper.beta_pseudo) + dirichlet_entropy(q.beta0_conc);
    for (int h = 0; h < G; ++h) {
        const Eigen::VectorXd row = q.beta_conc.row(h).transpose();
        elbo += dirichlet_cross(row, hyper.beta_pseudo) + dirichlet_entropy(row);
    }
    return elbo;
}

VBPosterior vb_initialize(const DynamicNetwork& net, const LatentState& state, const ProjectionParams& params,
                          const ProjectionHyperparams& hyper)
{
    const int n = state.n();
    const int T = state.T();
    const int p = state.p();
    const int G = params.G();
    VBPosterior q;
    q.directed = net.directed();
    q.omega_tilt.assign(T, Eigen::MatrixXd::Zero(n, n));
    q.x_mean = state.X;
    q.x_cov.assign(T, std::vector<Eigen::MatrixXd>(n));
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) q.x_cov[t][i] = Eigen::MatrixXd::Identity(p, p) / params.tau(i);
    }
    q.z.resize(n);
    q.z_entropy = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        // soft one-hot labels
        ChainPosterior& zi = q.z[i];
        zi.marginals = Eigen::MatrixXd::Constant(G, T, 0.05 / G);
        for (int t = 0; t < T; ++t) zi.marginals(state.Z(i, t), t) += 0.95;
        for (int t = 0; t + 1 < T; ++t) zi.pairwise.push_back(zi.marginals.col(t) * zi.marginals.col(t + 1).transpose());
    }
    q.alpha_mean = params.alpha;
    q.alpha_var = 1e-4;
    const double shape = hyper.a2 + 1.0 + 0.5 * p * T;
    q.tau_shape = Eigen::VectorXd::Constant(n, shape);
    q.tau_rate = shape / params.tau.array();
    for (int i = 0; i < n; ++i) {
        q.r.emplace_back(params.r(i), 0.01 * params.r(i));
        q.s.emplace_back(q.directed ? params.s(i) : 1.0, 0.01);
    }
    for (int g = 0; g < G; ++g) q.u_natural.push_back(100.0 * params.u[g]);
    vb_update_beta(q, hyper);
    return q;
}

void vb_update_omega(const DynamicNetwork&, VBPosterior& q)
{
    for (int t = 0; t < q.T(); ++t) {
        auto& c = q.omega_tilt[t];
        for_each_dyad(q.n(), q.directed, [&](int i, int j) {
            c(i, j) = std::sqrt(std::max(q.expected_eta2(i, j, t), 0.0));
            if (!q.directed) c(j, i) = c(i, j);
        });
    }
}

void vb_update_x(const DynamicNetwork& net, VBPosterior& q)
{
    const int n = q.n();
    const int p = q.p();
    const bool directed = q.directed;
    const auto eu = u_means(q);
    const double ea = q.alpha_mean;
    Eigen::VectorXd quad(n), lin(n);
    for (int t = 0; t < q.T(); ++t) {
        const auto& Y = net.adjacency(t);
        const auto& c = q.omega_tilt[t];
        auto& M = q.x_mean[t];
        Eigen::MatrixXd ew(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) ew(i, j) = i == j ? 0.0 : polya_gamma_mean(c(i, j));
        }
        for (int i = 0; i < n; ++i) {
            Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(p, p);
            for (int j = 0; j < n; ++j) {
                if (j == i) {
                    quad(j) = lin(j) = 0.0;
                    continue;
                }
                if (directed) {
                    quad(j) = ew(i, j) * q.s_second(j) + ew(j, i) * q.s_second(i);
                    lin(j) = (Y(i, j) - 0.5 - ew(i, j) * ea) * q.s_mean(j) + (Y(j, i) - 0.5 - ew(j, i) * ea) * q.s_mean(i);
                } else {
                    quad(j) = ew(i, j);
                    lin(j) = Y(i, j) - 0.5 - ew(i, j) * ea;
                }
                prec += quad(j) * q.x_cov[t][j];
            }
            prec += M * quad.asDiagonal() * M.transpose();
            const double etau = q.tau_mean(i);
            prec.diagonal().array() += etau;
            Eigen::VectorXd b = M * lin;
            const auto& phi = q.z[i].marginals;
            for (int k = 0; k < q.G(); ++k) b += etau * q.r[i].first * phi(k, t) * eu[k];
            const Eigen::LLT<Eigen::MatrixXd> llt(prec);
            if (llt.info() != Eigen::Success) throw NumericalError("VB position precision is not positive definite");
            q.x_cov[t][i] = llt.solve(Eigen::MatrixXd::Identity(p, p));
            M.col(i) = llt.solve(b);
        }
    }
}

void vb_update_z(VBPosterior& q)
{
    for (int i = 0; i < q.n(); ++i) {
        const ChainLogWeights w = vb_z_weights(q, i);
        q.z[i] = forward_backward(w);
        // entropy = log normalizer - E[log weights]
        const auto& zi = q.z[i];
        double ew = zi.marginals.col(0).dot(w.log_init) + zi.marginals.cwiseProduct(w.log_emit).sum();
        for (const auto& xi : zi.pairwise) ew += xi.cwiseProduct(w.log_trans).sum();
        q.z_entropy(i) = zi.log_normalizer - ew;
    }
}

void vb_update_u(VBPosterior& q)
{
    for (auto& m : q.u_natural) m.setZero();
    for (int i = 0; i < q.n(); ++i) {
        const double w = q.tau_mean(i) * q.r[i].first;
        for (int t = 0; t < q.T(); ++t) {
            for (int k = 0; k < q.G(); ++k) q.u_natural[k] += w * q.z[i].marginals(k, t) * q.x_mean[t].col(i);
        }
    }
}

void vb_update_r(VBPosterior& q, const ProjectionHyperparams& hyper)
{
    const auto eu = u_means(q);
    const double T = q.T();
    for (int i = 0; i < q.n(); ++i) {
        double proj = 0.0;
        for (int t = 0; t < q.T(); ++t) {
            for (int k = 0; k < q.G(); ++k) proj += q.z[i].marginals(k, t) * eu[k].dot(q.x_mean[t].col(i));
        }
        const double etau = q.tau_mean(i);
        q.r[i] = PositiveTruncatedNormal((proj - 1.0 / hyper.c) / T, 1.0 / std::sqrt(T * etau));
    }
}

void vb_update_tau(VBPosterior& q, const ProjectionHyperparams& hyper)
{
    const auto eu = u_means(q);
    const double shape = hyper.a2 + 1.0 + 0.5 * q.p() * q.T();
    for (int i = 0; i < q.n(); ++i) {
        double ss = 0.0;
        for (int t = 0; t < q.T(); ++t) ss += q.z[i].marginals.col(t).dot(expected_sq_dev(q, eu, i, t));
        q.tau_shape(i) = shape;
        q.tau_rate(i) = 1.0 / hyper.b2 + q.r[i].first / hyper.c + 0.5 * ss;
    }
}

void vb_update_s(const DynamicNetwork& net, VBPosterior& q)
{
    if (!q.directed) return;
    const int n = q.n();
    Eigen::VectorXd prec = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lin = Eigen::VectorXd::Constant(n, -1.0); // Exp(1) prior
    for (int t = 0; t < q.T(); ++t) {
        const SliceMoments mom = slice_moments(q, t);
        const auto& Y = net.adjacency(t);
        const auto& c = q.omega_tilt[t];
        for_each_dyad(n, true, [&](int i, int j) {
            const double ew = polya_gamma_mean(c(i, j));
            prec(j) += ew * mom.trss(i, j);
            lin(j) += (Y(i, j) - 0.5 - ew * q.alpha_mean) * mom.gram(i, j);
        });
    }
    for (int j = 0; j < n; ++j) q.s[j] = PositiveTruncatedNormal(lin(j) / prec(j), 1.0 / std::sqrt(prec(j)));
}

void vb_update_alpha(const DynamicNetwork& net, VBPosterior& q, const ProjectionHyperparams& hyper)
{
    double prec = 1.0 / hyper.b3;
    double lin = 0.0;
    for (int t = 0; t < q.T(); ++t) {
        const Eigen::MatrixXd gram = q.x_mean[t].transpose() * q.x_mean[t];
        const auto& Y = net.adjacency(t);
        const auto& c = q.omega_tilt[t];
        for_each_dyad(q.n(), q.directed, [&](int i, int j) {
            const double ew = polya_gamma_mean(c(i, j));
            prec += ew;
            lin += Y(i, j) - 0.5 - ew * q.s_mean(j) * gram(i, j);
        });
    }
    q.alpha_var = 1.0 / prec;
    q.alpha_mean = lin / prec;
}

void vb_update_beta(VBPosterior& q, const ProjectionHyperparams& hyper)
{
    const int G = q.G();
    q.beta0_conc = Eigen::VectorXd::Constant(G, hyper.beta_pseudo);
    q.beta_conc = Eigen::MatrixXd::Constant(G, G, hyper.beta_pseudo);
    for (const auto& zi : q.z) {
        q.beta0_conc += zi.marginals.col(0);
        for (const auto& xi : zi.pairwise) q.beta_conc += xi;
    }
}

void vb_run(const DynamicNetwork& net, VBPosterior& q, const ProjectionHyperparams& hyper, const VBConfig& cfg)
{
    q.elbo_trace.clear();
    q.converged = false;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        vb_update_omega(net, q);
        vb_update_x(net, q);
        vb_update_z(q);
        vb_update_u(q);
        vb_update_r(q, hyper);
        vb_update_tau(q, hyper);
        vb_update_s(net, q);
        vb_update_alpha(net, q, hyper);
        vb_update_beta(q, hyper);
        const double elbo = vb_elbo(net, q, hyper);
        if (!std::isfinite(elbo)) throw NumericalError("ELBO became non-finite");
        q.elbo_trace.push_back(elbo);
        const auto k = q.elbo_trace.size();
        if (k >= 2 && elbo - q.elbo_trace[k - 2] < cfg.tolerance * std::abs(elbo)) {
            q.converged = true;
            break;
        }
    }
}

VBPosterior vb_fit_projection(const DynamicNetwork& net, int G, int p, const ProjectionHyperparams& hyper,
                              const VBConfig& cfg, RngStream& rng)
{
    cfg.validate();
    hyper.validate();
    if (!net.is_binary()) throw UnsupportedLikelihood("the projection model is defined for binary payloads only");
    if (net.n() < 2 || net.T() < 1) throw ConfigError("network too small");
    if (net.edge_total() == 0) throw ConfigError("network has no edges");
    if (G < 1 || G > net.n()) throw ConfigError("need 1 <= G <= n");
    if (p < 2) throw ConfigError("the hypersphere model needs p >= 2");
    VBPosterior best;
    double best_elbo = -std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < cfg.restarts; ++rep) {
        ProjectionStart start = initialize_projection(net, G, p, hyper, rng, cfg.jitter);
        VBPosterior q = vb_initialize(net, start.state, start.params, hyper);
        vb_run(net, q, hyper, cfg);
        if (q.elbo_trace.back() > best_elbo) {
            best_elbo = q.elbo_trace.back();
            best = std::move(q);
        }
    }
    return best;
}

double vb_predictive_edge_prob(const VBPosterior& post, int i, int j, int t)
{
    if (i < 0 || j < 0 || i >= post.n() || j >= post.n() || t < 0 || t >= post.T()) {
        throw InvalidInput("edge index out of range");
    }
    return logistic(post.expected_eta(i, j, t));
}

} // namespace dlsc
