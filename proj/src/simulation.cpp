#include "dlsc/simulation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dlsc/distributions.hpp"
#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

// Reference geometry is laid out for n = 100 actors; other sizes rescale
// locations and shapes so the distance-to-s ratios stay the same.
constexpr double kReferenceN = 100.0;

int draw_index(const Eigen::VectorXd& probs, RngStream& rng)
{
    double u = rng.uniform();
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        u -= probs(k);
        if (u <= 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size() - 1);
}

std::vector<int> subset_for(const SimConfig& cfg)
{
    std::vector<int> idx = cfg.communities.empty() ? default_community_subset(cfg.G) : cfg.communities;
    if (static_cast<int>(idx.size()) != cfg.G) throw InvalidInput("community subset must have G entries");
    for (int k : idx) {
        if (k < 0 || k >= 6) throw InvalidInput("community index must be in 0..5");
    }
    return idx;
}

} // namespace

void SimConfig::validate() const
{
    if (G < 1 || n < G) throw InvalidInput("simulation needs n >= G >= 1");
    if (T < 1) throw InvalidInput("simulation needs T >= 1");
    if (G > 6 && communities.empty()) throw InvalidInput("at most six reference communities");
    if (transition_constant && !(*transition_constant >= 0.0)) {
        throw InvalidInput("transition constant must be nonnegative");
    }
    const int dim = p == 0 ? (geometry == Geometry::Distance ? 2 : 3) : p;
    if ((geometry == Geometry::Distance && dim != 2) || (geometry == Geometry::Projection && dim != 3)) {
        throw InvalidInput("reference layouts exist for p = 2 (distance) and p = 3 (projection)");
    }
}

Eigen::MatrixXd transition_matrix_distance(const std::vector<LatentPoint>& mu, double c)
{
    const auto G = static_cast<Eigen::Index>(mu.size());
    if (G == 1) return Eigen::MatrixXd::Ones(1, 1);
    Eigen::MatrixXd B(G, G);
    for (Eigen::Index h = 0; h < G; ++h) {
        double best = 0.0;
        for (Eigen::Index k = 0; k < G; ++k) {
            if (k == h) continue;
            const double d = (mu[k] - mu[h]).norm();
            if (!(d > 0.0)) throw InvalidInput("community locations must be distinct");
            B(h, k) = 1.0 / d;
            best = std::max(best, B(h, k));
        }
        B(h, h) = c * best;
        B.row(h) /= B.row(h).sum();
    }
    return B;
}

Eigen::MatrixXd transition_matrix_projection(const std::vector<Eigen::VectorXd>& u, double c)
{
    const auto G = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd B(G, G);
    for (Eigen::Index h = 0; h < G; ++h) {
        for (Eigen::Index k = 0; k < G; ++k) B(h, k) = c * u[h].dot(u[k]);
        const double m = B.row(h).maxCoeff();
        B.row(h) = (B.row(h).array() - m).exp();
        B.row(h) /= B.row(h).sum();
    }
    return B;
}

std::vector<LatentPoint> reference_locations()
{
    const double xy[6][2] = {{-0.03, 0.0}, {-0.01, 0.0}, {0.01, 0.0}, {0.03, 0.0}, {0.0, 0.02}, {0.0, -0.02}};
    std::vector<LatentPoint> out;
    for (const auto& v : xy) out.push_back(Eigen::Vector2d(v[0], v[1]));
    return out;
}

Eigen::VectorXd direction_from_angles(double azimuth_deg, double elevation_deg)
{
    const double az = azimuth_deg * std::numbers::pi / 180.0;
    const double el = elevation_deg * std::numbers::pi / 180.0;
    Eigen::VectorXd u(3);
    u << std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el);
    return u / u.norm();
}

std::vector<Eigen::VectorXd> reference_directions()
{
    const double angles[6][2] = {{-15, 0}, {30, 0}, {60, 0}, {105, 0}, {45, 60}, {45, -60}};
    std::vector<Eigen::VectorXd> out;
    for (const auto& a : angles) out.push_back(direction_from_angles(a[0], a[1]));
    return out;
}

std::vector<int> default_community_subset(int G)
{
    if (G == 4) return {0, 3, 4, 5}; // outermost four: well separated in both layouts
    std::vector<int> idx;
    for (int k = 0; k < std::min(G, 6); ++k) idx.push_back(k);
    return idx;
}

void draw_edges(DynamicNetwork& net, int t, const Eigen::MatrixXd& probs, RngStream& rng)
{
    for (int i = 0; i < net.n(); ++i) {
        for (int j = 0; j < net.n(); ++j) {
            if (i != j && rng.uniform() < probs(i, j)) net.set_edge(t, i, j);
        }
    }
}

DistanceSimulation simulate_distance(const SimConfig& cfg)
{
    SimConfig c = cfg;
    c.geometry = Geometry::Distance;
    c.validate();
    RngStream rng(c.seed, 0);
    const int n = c.n;
    const int T = c.T;
    const int G = c.G;
    const int p = 2;
    const double scale = kReferenceN / n;
    const auto idx = subset_for(c);
    const auto ref = reference_locations();

    DistanceParams params;
    params.lambda = c.lambda.value_or(0.8);
    for (int k : idx) params.mu.push_back(scale * ref[k]);
    const Eigen::MatrixXd psi = 1e-5 * scale * scale * Eigen::MatrixXd::Identity(p, p);
    for (int g = 0; g < G; ++g) params.sigma.push_back(sample_inverse_wishart(13.0, psi, rng));
    params.tau2 = 1.0;
    params.gamma = Eigen::VectorXd::Constant(p, 1e-5 * scale * scale);
    params.beta0 = sample_dirichlet(std::vector<double>(G, 10.0), rng);
    const double konst = c.transition_constant.value_or(c.stickiness == Stickiness::Sticky ? 20.0 : 10.0);
    params.beta = transition_matrix_distance(params.mu, konst);

    const int steps = T + (c.next_step ? 1 : 0);
    LatentState full(n, steps, p);
    std::vector<Eigen::MatrixXd> chol;
    for (const auto& s : params.sigma) chol.push_back(robust_cholesky(s));
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < steps; ++t) {
            const int k = t == 0 ? draw_index(params.beta0, rng)
                                 : draw_index(params.beta.row(full.Z(i, t - 1)).transpose(), rng);
            full.Z(i, t) = k;
            const Eigen::VectorXd mean = t == 0 ? params.mu[k]
                                                : Eigen::VectorXd(params.lambda * params.mu[k] +
                                                                  (1.0 - params.lambda) * full.x(i, t - 1));
            full.x(i, t) = sample_mvn(mean, chol[k], rng);
        }
    }

    // s ~ Dir(100 (1/||X_i1||) / max_j (1/||X_j1||))
    Eigen::VectorXd inv(n);
    for (int i = 0; i < n; ++i) inv(i) = 1.0 / full.x(i, 0).norm();
    const double top = inv.maxCoeff();
    std::vector<double> conc(n);
    for (int i = 0; i < n; ++i) conc[i] = 100.0 * inv(i) / top;
    DegreeCorrected dc{0.3, 0.7, sample_dirichlet(conc, rng)};
    params.lik = dc;

    DistanceSimulation out;
    out.net = DynamicNetwork::binary(n, T, true);
    out.truth = LatentState(n, T, p);
    for (int t = 0; t < T; ++t) {
        out.truth.X[t] = full.X[t];
        out.truth.Z.col(t) = full.Z.col(t);
        draw_edges(out.net, t, distance_edge_probs(full.X[t], params.lik), rng);
    }
    if (c.next_step) {
        out.next_probs = distance_edge_probs(full.X[T], params.lik);
        out.next_labels = full.Z.col(T);
    }
    out.params = std::move(params);
    return out;
}

ProjectionSimulation simulate_projection(const SimConfig& cfg)
{
    SimConfig c = cfg;
    c.geometry = Geometry::Projection;
    c.validate();
    RngStream rng(c.seed, 0);
    const int n = c.n;
    const int T = c.T;
    const int G = c.G;
    const int p = 3;
    const auto idx = subset_for(c);
    const auto ref = reference_directions();

    ProjectionParams params;
    params.alpha = c.alpha.value_or(-5.0);
    for (int k : idx) params.u.push_back(ref[k]);
    params.beta0 = Eigen::VectorXd::Constant(G, 1.0 / G);
    const double konst = c.transition_constant.value_or(c.stickiness == Stickiness::Sticky ? 8.0 : 5.0);
    params.beta = transition_matrix_projection(params.u, konst);
    params.s.resize(n);
    params.r.resize(n);
    params.tau.resize(n);
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        params.s(i) = sample_truncated_normal(1.0, 0.15, 0.0, inf, rng);
        params.r(i) = sample_truncated_normal(2.3, 0.05, 0.0, inf, rng);
        params.tau(i) = 175.0 / (params.r(i) * params.r(i));
    }

    const int steps = T + (c.next_step ? 1 : 0);
    LatentState full(n, steps, p);
    for (int i = 0; i < n; ++i) {
        const double sd = 1.0 / std::sqrt(params.tau(i));
        for (int t = 0; t < steps; ++t) {
            const int k = t == 0 ? draw_index(params.beta0, rng)
                                 : draw_index(params.beta.row(full.Z(i, t - 1)).transpose(), rng);
            full.Z(i, t) = k;
            for (int l = 0; l < p; ++l) full.X[t](l, i) = params.r(i) * params.u[k](l) + sd * rng.normal();
        }
    }

    ProjectionSimulation out;
    out.net = DynamicNetwork::binary(n, T, true);
    out.truth = LatentState(n, T, p);
    for (int t = 0; t < T; ++t) {
        out.truth.X[t] = full.X[t];
        out.truth.Z.col(t) = full.Z.col(t);
        draw_edges(out.net, t, projection_edge_probs(full.X[t], params.alpha, params.s, true), rng);
    }
    if (c.next_step) {
        out.next_probs = projection_edge_probs(full.X[T], params.alpha, params.s, true);
        out.next_labels = full.Z.col(T);
    }
    out.params = std::move(params);
    return out;
}

} // namespace dlsc
