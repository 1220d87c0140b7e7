#include "dlsc/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd hop_counts(const Eigen::MatrixXd& y)
{
    const auto n = y.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kInf);
    std::vector<std::vector<int>> nbr(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && (y(i, j) > 0.0 || y(j, i) > 0.0)) nbr[i].push_back(static_cast<int>(j));
        }
    }
    double longest = 0.0;
    for (Eigen::Index src = 0; src < n; ++src) {
        std::queue<int> q;
        d(src, src) = 0.0;
        q.push(static_cast<int>(src));
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : nbr[v]) {
                if (d(src, w) == kInf) {
                    d(src, w) = d(src, v) + 1.0;
                    longest = std::max(longest, d(src, w));
                    q.push(w);
                }
            }
        }
    }
    return d.unaryExpr([longest](double v) { return v == kInf ? longest + 1.0 : v; });
}

Eigen::VectorXd normalized_counts(const Eigen::VectorXd& counts, double pseudo)
{
    Eigen::VectorXd v = counts.array() + pseudo;
    return v / v.sum();
}

// Newton ascent on a concave 1-d logistic objective: eta = theta * h + offset.
double newton_1d(const Eigen::MatrixXd& ysum, double T, const Eigen::MatrixXd& h, const Eigen::MatrixXd& offset,
                 double start)
{
    double theta = start;
    const auto n = ysum.rows();
    for (int iter = 0; iter < 50; ++iter) {
        double grad = 0.0;
        double hess = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double pr = logistic(theta * h(i, j) + offset(i, j));
                grad += h(i, j) * (ysum(i, j) - T * pr);
                hess += T * h(i, j) * h(i, j) * pr * (1.0 - pr);
            }
        }
        if (hess <= 1e-300) break;
        const double step = std::clamp(grad / hess, -5.0, 5.0);
        theta += step;
        if (std::abs(step) < 1e-10 * (1.0 + std::abs(theta))) break;
    }
    return theta;
}

double aggregated_loglik(const Eigen::MatrixXd& ysum, double T, const Eigen::MatrixXd& eta)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < ysum.rows(); ++i) {
        for (Eigen::Index j = 0; j < ysum.cols(); ++j) {
            if (i != j) total += ysum(i, j) * eta(i, j) - T * log1p_exp(eta(i, j));
        }
    }
    return total;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& pts)
{
    const auto n = pts.cols();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (pts.col(i) - pts.col(j)).norm();
    }
    return d;
}

double median_offdiag(const Eigen::MatrixXd& d)
{
    std::vector<double> v;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) v.push_back(d(i, j));
    }
    if (v.empty()) return 1.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2] > 0.0 ? v[v.size() / 2] : 1.0;
}

template <typename Assign, typename Update>
KMeansResult lloyd(const Eigen::MatrixXd& points, int k, RngStream& rng, int restarts, Assign assign,
                   Update update)
{
    const auto m = points.cols();
    if (k < 1 || k > m) throw ConfigError("k-means needs 1 <= k <= number of points");
    KMeansResult best;
    best.within = kInf;
    for (int rep = 0; rep < std::max(1, restarts); ++rep) {
        // k-means++ seeding
        Eigen::MatrixXd centers(points.rows(), k);
        centers.col(0) = points.col(static_cast<Eigen::Index>(rng.index(m)));
        Eigen::VectorXd d2(m);
        for (Eigen::Index c = 1; c < k; ++c) {
            for (Eigen::Index a = 0; a < m; ++a) {
                double best_d = kInf;
                for (Eigen::Index b = 0; b < c; ++b) {
                    best_d = std::min(best_d, (points.col(a) - centers.col(b)).squaredNorm());
                }
                d2(a) = best_d;
            }
            const double total = d2.sum();
            Eigen::Index pick = static_cast<Eigen::Index>(rng.index(m));
            if (total > 0.0) {
                double u = rng.uniform() * total;
                for (Eigen::Index a = 0; a < m; ++a) {
                    u -= d2(a);
                    if (u <= 0.0) {
                        pick = a;
                        break;
                    }
                }
            }
            centers.col(c) = points.col(pick);
        }
        update(centers, Eigen::VectorXi(), true);

        Eigen::VectorXi labels = Eigen::VectorXi::Constant(m, -1);
        double within = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            bool changed = false;
            within = 0.0;
            for (Eigen::Index a = 0; a < m; ++a) {
                auto [lab, cost] = assign(points.col(a), centers);
                within += cost;
                if (lab != labels(a)) {
                    labels(a) = lab;
                    changed = true;
                }
            }
            // reseed empty clusters at the worst-fit point
            for (int c = 0; c < k; ++c) {
                if ((labels.array() == c).any()) continue;
                Eigen::Index worst = 0;
                double worst_cost = -1.0;
                for (Eigen::Index a = 0; a < m; ++a) {
                    const double cost = assign(points.col(a), centers).second;
                    if (cost > worst_cost && (labels.array() == labels(a)).count() > 1) {
                        worst_cost = cost;
                        worst = a;
                    }
                }
                labels(worst) = c;
                changed = true;
            }
            update(centers, labels, false);
            if (!changed) break;
        }
        if (within < best.within) {
            best.within = within;
            best.labels = labels;
            best.centers = centers;
        }
    }
    return best;
}

} // namespace

Eigen::MatrixXd averaged_dissimilarity(const DynamicNetwork& net)
{
    const int n = net.n();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < net.T(); ++t) {
        if (net.is_binary()) {
            acc += hop_counts(net.adjacency(t));
        } else {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i != j) acc(i, j) += 0.5 * (net.rank(t, i, j) + net.rank(t, j, i));
                }
            }
        }
    }
    return acc / net.T();
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dissimilarity, int p)
{
    const auto n = dissimilarity.rows();
    if (dissimilarity.cols() != n || p < 1) throw InvalidInput("classical_mds: bad arguments");
    const Eigen::MatrixXd d2 = dissimilarity.array().square();
    const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd b = -0.5 * j * d2 * j;
    return spectral_embedding(symmetrize(b), p);
}

Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& a, int p)
{
    const auto n = a.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, n);
    for (int k = 0; k < p && k < n; ++k) {
        const Eigen::Index idx = n - 1 - k; // eigenvalues ascend
        const double ev = std::max(es.eigenvalues()(idx), 0.0);
        out.row(k) = std::sqrt(ev) * es.eigenvectors().col(idx).transpose();
    }
    return out;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng, int restarts)
{
    auto assign = [](const auto& x, const Eigen::MatrixXd& centers) {
        int lab = 0;
        double cost = kInf;
        for (Eigen::Index c = 0; c < centers.cols(); ++c) {
            const double v = (x - centers.col(c)).squaredNorm();
            if (v < cost) {
                cost = v;
                lab = static_cast<int>(c);
            }
        }
        return std::pair<int, double>{lab, cost};
    };
    auto update = [&points](Eigen::MatrixXd& centers, const Eigen::VectorXi& labels, bool seeding) {
        if (seeding) return;
        for (Eigen::Index c = 0; c < centers.cols(); ++c) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.rows());
            int count = 0;
            for (Eigen::Index a = 0; a < points.cols(); ++a) {
                if (labels(a) == c) {
                    sum += points.col(a);
                    ++count;
                }
            }
            if (count > 0) centers.col(c) = sum / count;
        }
    };
    return lloyd(points, k, rng, restarts, assign, update);
}

KMeansResult spherical_kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng, int restarts)
{
    Eigen::MatrixXd dirs = points;
    for (Eigen::Index a = 0; a < dirs.cols(); ++a) {
        const double nrm = dirs.col(a).norm();
        if (nrm > 0.0) dirs.col(a) /= nrm;
    }
    auto assign = [](const auto& x, const Eigen::MatrixXd& centers) {
        int lab = 0;
        double cost = kInf;
        for (Eigen::Index c = 0; c < centers.cols(); ++c) {
            const double v = 1.0 - x.dot(centers.col(c));
            if (v < cost) {
                cost = v;
                lab = static_cast<int>(c);
            }
        }
        return std::pair<int, double>{lab, cost};
    };
    auto update = [&dirs](Eigen::MatrixXd& centers, const Eigen::VectorXi& labels, bool seeding) {
        if (seeding) return;
        for (Eigen::Index c = 0; c < centers.cols(); ++c) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(dirs.rows());
            for (Eigen::Index a = 0; a < dirs.cols(); ++a) {
                if (labels(a) == c) sum += dirs.col(a);
            }
            if (sum.norm() > 0.0) centers.col(c) = sum / sum.norm();
        }
    };
    return lloyd(dirs, k, rng, restarts, assign, update);
}

void fit_distance_communities(const LatentState& state, DistanceParams& params,
                              const DistanceHyperparams& hyper)
{
    const int n = state.n();
    const int T = state.T();
    const int p = state.p();
    const int G = static_cast<int>(params.beta0.size() > 0 ? params.beta0.size() : params.mu.size());

    Eigen::VectorXd grand = Eigen::VectorXd::Zero(p);
    for (int t = 0; t < T; ++t) grand += state.X[t].rowwise().sum();
    grand /= static_cast<double>(n) * T;
    Eigen::MatrixXd overall = Eigen::MatrixXd::Zero(p, p);
    for (int t = 0; t < T; ++t) {
        const Eigen::MatrixXd c = state.X[t].colwise() - grand;
        overall += c * c.transpose();
    }
    overall /= static_cast<double>(n) * T;
    const double spread = std::max(overall.trace() / p, 1e-12);

    params.mu.assign(G, grand);
    params.sigma.assign(G, Eigen::MatrixXd::Identity(p, p) * spread / std::max(1, G * G));
    for (int g = 0; g < G; ++g) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
        int count = 0;
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < n; ++i) {
                if (state.Z(i, t) == g) {
                    sum += state.x(i, t);
                    ++count;
                }
            }
        }
        if (count == 0) continue;
        params.mu[g] = sum / count;
        if (count <= p) continue;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < n; ++i) {
                if (state.Z(i, t) == g) {
                    const Eigen::VectorXd r = state.x(i, t) - params.mu[g];
                    cov += r * r.transpose();
                }
            }
        }
        params.sigma[g] = cov / count + 1e-3 * spread * Eigen::MatrixXd::Identity(p, p);
    }

    params.lambda = std::clamp(hyper.nu_lambda, 0.01, 0.99);
    double msq = 0.0;
    for (const auto& m : params.mu) msq += m.squaredNorm();
    params.tau2 = std::max(msq / (G * p), 1e-3 * spread);
    params.gamma = Eigen::VectorXd::Zero(p);
    for (const auto& s : params.sigma) params.gamma += s.diagonal();
    params.gamma *= (2.0 * p + 2.0) / G;

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(G);
    Eigen::MatrixXd ct = Eigen::MatrixXd::Zero(G, G);
    for (int i = 0; i < n; ++i) {
        c0(state.Z(i, 0)) += 1.0;
        for (int t = 1; t < T; ++t) ct(state.Z(i, t - 1), state.Z(i, t)) += 1.0;
    }
    params.beta0 = normalized_counts(c0, hyper.beta_pseudo);
    params.beta.resize(G, G);
    for (int h = 0; h < G; ++h) {
        params.beta.row(h) = normalized_counts(ct.row(h).transpose(), hyper.beta_pseudo).transpose();
    }
}

DistanceStart initialize_distance(const DynamicNetwork& net, int G, int p, LikelihoodKind kind,
                                  const DistanceHyperparams& hyper, RngStream& rng)
{
    const int n = net.n();
    const int T = net.T();
    if (G < 1 || G > n) throw ConfigError("need 1 <= G <= n");
    if (net.is_binary() == (kind == LikelihoodKind::PlackettLuce)) {
        throw UnsupportedLikelihood("likelihood does not match the network payload");
    }

    const Eigen::MatrixXd coords = classical_mds(averaged_dissimilarity(net), p);
    const Eigen::MatrixXd dm = pairwise_distances(coords);
    const double med = median_offdiag(dm);
    Eigen::MatrixXd ysum = Eigen::MatrixXd::Zero(n, n);
    if (net.is_binary()) {
        for (int t = 0; t < T; ++t) ysum += net.adjacency(t);
    }
    const Eigen::VectorXd s_flat = Eigen::VectorXd::Constant(n, 1.0 / n);
    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(n, n);

    // Profile log-likelihood of the scale with the intercept-like parameter
    // maximized out. Returns (loglik, intercept).
    auto profile = [&](double scale) -> std::pair<double, double> {
        const Eigen::MatrixXd d = scale * dm;
        switch (kind) {
        case LikelihoodKind::Logistic: {
            const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
            const double a = newton_1d(ysum, T, ones, -d, 0.0);
            return {aggregated_loglik(ysum, T, (a - d.array()).matrix()), a};
        }
        case LikelihoodKind::DegreeCorrected: {
            // beta_in = beta_out = b with s = 1/n: eta = 2 b (1 - n d)
            const Eigen::MatrixXd h = (2.0 * (1.0 - n * d.array())).matrix();
            const double b = newton_1d(ysum, T, h, zeros, 0.1);
            return {aggregated_loglik(ysum, T, b * h), b};
        }
        case LikelihoodKind::PlackettLuce: {
            double total = 0.0;
            for (int t = 0; t < T; ++t) {
                for (int i = 0; i < n; ++i) {
                    total += rank_loglik_plackett_luce(net.ordering(t, i), s_flat, d.col(i));
                }
            }
            return {total, 0.0};
        }
        }
        return {0.0, 0.0};
    };

    // coarse log-grid, then golden-section refinement around the best point
    const double lo = std::log(1e-4 / (n * med));
    const double hi = std::log(1e2 / med);
    const int grid = 41;
    double best_x = lo;
    double best_f = -kInf;
    for (int g = 0; g < grid; ++g) {
        const double x = lo + (hi - lo) * g / (grid - 1);
        const double f = profile(std::exp(x)).first;
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    const double step = (hi - lo) / (grid - 1);
    double a = best_x - step;
    double b = best_x + step;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = profile(std::exp(x1)).first;
    double f2 = profile(std::exp(x2)).first;
    for (int iter = 0; iter < 40; ++iter) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = profile(std::exp(x1)).first;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = profile(std::exp(x2)).first;
        }
    }
    const double scale = std::exp(0.5 * (a + b));
    const double intercept = profile(scale).second;

    DistanceStart start;
    start.state = LatentState(n, T, p);
    const double jitter = 0.02 * scale * med;
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < p; ++l) start.state.X[t](l, i) = scale * coords(l, i) + jitter * rng.normal();
        }
    }
    Eigen::MatrixXd pooled(p, static_cast<Eigen::Index>(n) * T);
    for (int t = 0; t < T; ++t) pooled.middleCols(static_cast<Eigen::Index>(t) * n, n) = start.state.X[t];
    const KMeansResult km = kmeans(pooled, G, rng);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) start.state.Z(i, t) = km.labels(static_cast<Eigen::Index>(t) * n + i);
    }

    switch (kind) {
    case LikelihoodKind::Logistic: start.params.lik = Logistic{intercept}; break;
    case LikelihoodKind::DegreeCorrected:
        start.params.lik = DegreeCorrected{intercept, intercept, s_flat};
        break;
    case LikelihoodKind::PlackettLuce: start.params.lik = PlackettLuce{s_flat}; break;
    }
    start.params.beta0 = Eigen::VectorXd::Constant(G, 1.0 / G);
    fit_distance_communities(start.state, start.params, hyper);
    return start;
}

void fit_projection_communities(const LatentState& state, ProjectionParams& params,
                                const ProjectionHyperparams& hyper)
{
    const int n = state.n();
    const int T = state.T();
    const int p = state.p();
    const int G = static_cast<int>(params.u.size());

    for (int g = 0; g < G; ++g) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < n; ++i) {
                if (state.Z(i, t) == g) sum += state.x(i, t);
            }
        }
        if (sum.norm() > 0.0) params.u[g] = sum / sum.norm();
    }
    params.r.resize(n);
    params.tau.resize(n);
    double rms = 0.0;
    for (int t = 0; t < T; ++t) rms += state.X[t].squaredNorm();
    rms = std::sqrt(rms / (static_cast<double>(n) * T));
    for (int i = 0; i < n; ++i) {
        double proj = 0.0;
        for (int t = 0; t < T; ++t) proj += params.u[state.Z(i, t)].dot(state.x(i, t));
        params.r(i) = std::max(proj / T, 0.05 * rms + 1e-12);
        double ss = 0.0;
        for (int t = 0; t < T; ++t) ss += (state.x(i, t) - params.r(i) * params.u[state.Z(i, t)]).squaredNorm();
        params.tau(i) = std::clamp(p * T / std::max(ss, 1e-12), 1e-2, 1e6);
    }

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(G);
    Eigen::MatrixXd ct = Eigen::MatrixXd::Zero(G, G);
    for (int i = 0; i < n; ++i) {
        c0(state.Z(i, 0)) += 1.0;
        for (int t = 1; t < T; ++t) ct(state.Z(i, t - 1), state.Z(i, t)) += 1.0;
    }
    params.beta0 = normalized_counts(c0, hyper.beta_pseudo);
    params.beta.resize(G, G);
    for (int h = 0; h < G; ++h) {
        params.beta.row(h) = normalized_counts(ct.row(h).transpose(), hyper.beta_pseudo).transpose();
    }
}

ProjectionStart initialize_projection(const DynamicNetwork& net, int G, int p,
                                      const ProjectionHyperparams& hyper, RngStream& rng, double jitter)
{
    if (!net.is_binary()) throw UnsupportedLikelihood("the projection model needs a binary payload");
    const int n = net.n();
    const int T = net.T();
    if (G < 1 || G > n) throw ConfigError("need 1 <= G <= n");

    Eigen::MatrixXd ysum = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < T; ++t) ysum += net.adjacency(t);
    const Eigen::MatrixXd avg = symmetrize(ysum) / T;
    const Eigen::MatrixXd emb = spectral_embedding(avg, p);
    const Eigen::MatrixXd gram = emb.transpose() * emb;

    // 2-d Newton for eta = alpha + b * gram
    double alpha = 0.0;
    double b = 1.0;
    {
        const double dens = std::clamp(ysum.sum() / (static_cast<double>(n) * (n - 1) * T), 1e-4, 1 - 1e-4);
        alpha = std::log(dens / (1.0 - dens));
        for (int iter = 0; iter < 100; ++iter) {
            Eigen::Vector2d grad = Eigen::Vector2d::Zero();
            Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const Eigen::Vector2d z(1.0, gram(i, j));
                    const double pr = logistic(alpha + b * gram(i, j));
                    grad += z * (ysum(i, j) - T * pr);
                    hess += T * pr * (1.0 - pr) * z * z.transpose();
                }
            }
            hess += 1e-9 * Eigen::Matrix2d::Identity();
            Eigen::Vector2d step = hess.ldlt().solve(grad);
            if (!step.allFinite()) break;
            const double len = step.norm();
            if (len > 5.0) step *= 5.0 / len;
            alpha += step(0);
            b += step(1);
            if (len < 1e-10) break;
        }
    }
    b = std::max(b, 1e-3);
    const Eigen::MatrixXd base = std::sqrt(b) * emb;
    const double rms = std::sqrt(base.squaredNorm() / n);

    ProjectionStart start;
    start.state = LatentState(n, T, p);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < p; ++l) start.state.X[t](l, i) = base(l, i) + jitter * rms * rng.normal();
        }
    }
    Eigen::MatrixXd pooled(p, static_cast<Eigen::Index>(n) * T);
    for (int t = 0; t < T; ++t) pooled.middleCols(static_cast<Eigen::Index>(t) * n, n) = start.state.X[t];
    const KMeansResult km = spherical_kmeans(pooled, G, rng);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) start.state.Z(i, t) = km.labels(static_cast<Eigen::Index>(t) * n + i);
    }

    auto& params = start.params;
    params.alpha = alpha;
    params.s = Eigen::VectorXd::Ones(n);
    params.u.resize(G);
    for (int g = 0; g < G; ++g) params.u[g] = km.centers.col(g);
    fit_projection_communities(start.state, params, hyper);
    return start;
}

} // namespace dlsc
