#include "dlsc/archive.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "dlsc/errors.hpp"
#include "dlsc/netio.hpp"

namespace dlsc {

using nlohmann::json;

namespace {

// non-finite doubles travel as strings; JSON has no literal for them
json num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double get_num(const json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw InvalidInput("archive: bad number '" + s + "'");
    }
    return j.get<double>();
}

json mat(const Eigen::MatrixXd& m)
{
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(num(m(i, k)));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd get_mat(const json& j)
{
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r * c) throw InvalidInput("archive: matrix size mismatch");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = get_num(data[static_cast<std::size_t>(i * c + k)]);
    }
    return m;
}

json vec(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(num(v(k)));
    return out;
}

Eigen::VectorXd get_vec(const json& j)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = get_num(j[k]);
    return v;
}

json imat(const Eigen::MatrixXi& m)
{
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXi get_imat(const json& j)
{
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r * c) throw InvalidInput("archive: matrix size mismatch");
    Eigen::MatrixXi m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = data[static_cast<std::size_t>(i * c + k)].get<int>();
    }
    return m;
}

template <typename T, typename F>
json list(const std::vector<T>& xs, F f)
{
    json out = json::array();
    for (const auto& x : xs) out.push_back(f(x));
    return out;
}

template <typename T, typename F>
std::vector<T> get_list(const json& j, F f)
{
    std::vector<T> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(f(x));
    return out;
}

json state_json(const LatentState& s)
{
    return {{"X", list(s.X, mat)}, {"Z", imat(s.Z)}};
}

LatentState get_state(const json& j)
{
    LatentState s;
    s.X = get_list<Eigen::MatrixXd>(j.at("X"), get_mat);
    s.Z = get_imat(j.at("Z"));
    return s;
}

json lik_json(const LikelihoodVariant& lik)
{
    if (const auto* l = std::get_if<Logistic>(&lik)) return {{"kind", "logistic"}, {"alpha", num(l->alpha)}};
    if (const auto* d = std::get_if<DegreeCorrected>(&lik)) {
        return {{"kind", "degree-corrected"},
                {"beta_in", num(d->beta_in)},
                {"beta_out", num(d->beta_out)},
                {"s", vec(d->s)}};
    }
    return {{"kind", "plackett-luce"}, {"s", vec(std::get<PlackettLuce>(lik).s)}};
}

LikelihoodVariant get_lik(const json& j)
{
    switch (likelihood_kind_from_string(j.at("kind").get<std::string>())) {
    case LikelihoodKind::Logistic: return Logistic{get_num(j.at("alpha"))};
    case LikelihoodKind::DegreeCorrected:
        return DegreeCorrected{get_num(j.at("beta_in")), get_num(j.at("beta_out")), get_vec(j.at("s"))};
    case LikelihoodKind::PlackettLuce: return PlackettLuce{get_vec(j.at("s"))};
    }
    throw InvalidInput("archive: unknown likelihood");
}

json dparams_json(const DistanceParams& p)
{
    return {{"lambda", num(p.lambda)}, {"mu", list(p.mu, vec)},     {"sigma", list(p.sigma, mat)},
            {"tau2", num(p.tau2)},     {"gamma", vec(p.gamma)},     {"beta0", vec(p.beta0)},
            {"beta", mat(p.beta)},     {"lik", lik_json(p.lik)}};
}

DistanceParams get_dparams(const json& j)
{
    DistanceParams p;
    p.lambda = get_num(j.at("lambda"));
    p.mu = get_list<LatentPoint>(j.at("mu"), get_vec);
    p.sigma = get_list<CovMatrix>(j.at("sigma"), get_mat);
    p.tau2 = get_num(j.at("tau2"));
    p.gamma = get_vec(j.at("gamma"));
    p.beta0 = get_vec(j.at("beta0"));
    p.beta = get_mat(j.at("beta"));
    p.lik = get_lik(j.at("lik"));
    return p;
}

json pparams_json(const ProjectionParams& p)
{
    return {{"alpha", num(p.alpha)}, {"s", vec(p.s)},         {"r", vec(p.r)},      {"tau", vec(p.tau)},
            {"u", list(p.u, vec)},   {"beta0", vec(p.beta0)}, {"beta", mat(p.beta)}};
}

ProjectionParams get_pparams(const json& j)
{
    ProjectionParams p;
    p.alpha = get_num(j.at("alpha"));
    p.s = get_vec(j.at("s"));
    p.r = get_vec(j.at("r"));
    p.tau = get_vec(j.at("tau"));
    p.u = get_list<Eigen::VectorXd>(j.at("u"), get_vec);
    p.beta0 = get_vec(j.at("beta0"));
    p.beta = get_mat(j.at("beta"));
    return p;
}

json ddraw_json(const DistanceDraw& d)
{
    return {{"iteration", d.iteration},
            {"state", state_json(d.state)},
            {"params", dparams_json(d.params)},
            {"log_posterior", num(d.log_posterior)},
            {"loglik", num(d.loglik)}};
}

DistanceDraw get_ddraw(const json& j)
{
    DistanceDraw d;
    d.iteration = j.at("iteration").get<int>();
    d.state = get_state(j.at("state"));
    d.params = get_dparams(j.at("params"));
    d.log_posterior = get_num(j.at("log_posterior"));
    d.loglik = get_num(j.at("loglik"));
    return d;
}

json pdraw_json(const ProjectionDraw& d)
{
    return {{"iteration", d.iteration},
            {"state", state_json(d.state)},
            {"params", pparams_json(d.params)},
            {"omega", list(d.omega, mat)},
            {"log_posterior", num(d.log_posterior)},
            {"loglik", num(d.loglik)}};
}

ProjectionDraw get_pdraw(const json& j)
{
    ProjectionDraw d;
    d.iteration = j.at("iteration").get<int>();
    d.state = get_state(j.at("state"));
    d.params = get_pparams(j.at("params"));
    d.omega = get_list<Eigen::MatrixXd>(j.at("omega"), get_mat);
    d.log_posterior = get_num(j.at("log_posterior"));
    d.loglik = get_num(j.at("loglik"));
    return d;
}

template <typename Draw, typename F>
json samples_json(const PosteriorSamples<Draw>& s, F draw_json)
{
    json acc = json::object();
    for (const auto& [k, v] : s.acceptance) acc[k] = num(v);
    json out = {{"draws", list(s.draws, draw_json)},
                {"log_posterior_trace", list(s.log_posterior_trace, num)},
                {"acceptance", acc},
                {"seed", s.seed}};
    if (s.map_draw) out["map_draw"] = draw_json(*s.map_draw);
    return out;
}

template <typename Draw, typename F>
PosteriorSamples<Draw> get_samples(const json& j, F get_draw)
{
    PosteriorSamples<Draw> s;
    s.draws = get_list<Draw>(j.at("draws"), get_draw);
    s.log_posterior_trace = get_list<double>(j.at("log_posterior_trace"), get_num);
    for (const auto& [k, v] : j.at("acceptance").items()) s.acceptance[k] = get_num(v);
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("map_draw")) s.map_draw = get_draw(j.at("map_draw"));
    return s;
}

json ptn_json(const PositiveTruncatedNormal& q)
{
    return json::array({num(q.mean), num(q.sd)});
}

PositiveTruncatedNormal get_ptn(const json& j)
{
    return PositiveTruncatedNormal(get_num(j.at(0)), get_num(j.at(1)));
}

json chain_post_json(const ChainPosterior& c)
{
    return {{"marginals", mat(c.marginals)}, {"pairwise", list(c.pairwise, mat)},
            {"log_normalizer", num(c.log_normalizer)}};
}

ChainPosterior get_chain_post(const json& j)
{
    ChainPosterior c;
    c.marginals = get_mat(j.at("marginals"));
    c.pairwise = get_list<Eigen::MatrixXd>(j.at("pairwise"), get_mat);
    c.log_normalizer = get_num(j.at("log_normalizer"));
    return c;
}

json vb_json(const VBPosterior& q)
{
    json cov = json::array();
    for (const auto& per_t : q.x_cov) cov.push_back(list(per_t, mat));
    return {{"directed", q.directed},
            {"omega_tilt", list(q.omega_tilt, mat)},
            {"x_mean", list(q.x_mean, mat)},
            {"x_cov", cov},
            {"z", list(q.z, chain_post_json)},
            {"z_entropy", vec(q.z_entropy)},
            {"alpha_mean", num(q.alpha_mean)},
            {"alpha_var", num(q.alpha_var)},
            {"s", list(q.s, ptn_json)},
            {"r", list(q.r, ptn_json)},
            {"tau_shape", vec(q.tau_shape)},
            {"tau_rate", vec(q.tau_rate)},
            {"u_natural", list(q.u_natural, vec)},
            {"beta0_conc", vec(q.beta0_conc)},
            {"beta_conc", mat(q.beta_conc)},
            {"elbo_trace", list(q.elbo_trace, num)},
            {"converged", q.converged}};
}

VBPosterior get_vb(const json& j)
{
    VBPosterior q;
    q.directed = j.at("directed").get<bool>();
    q.omega_tilt = get_list<Eigen::MatrixXd>(j.at("omega_tilt"), get_mat);
    q.x_mean = get_list<Eigen::MatrixXd>(j.at("x_mean"), get_mat);
    for (const auto& per_t : j.at("x_cov")) q.x_cov.push_back(get_list<Eigen::MatrixXd>(per_t, get_mat));
    q.z = get_list<ChainPosterior>(j.at("z"), get_chain_post);
    q.z_entropy = get_vec(j.at("z_entropy"));
    q.alpha_mean = get_num(j.at("alpha_mean"));
    q.alpha_var = get_num(j.at("alpha_var"));
    q.s = get_list<PositiveTruncatedNormal>(j.at("s"), get_ptn);
    q.r = get_list<PositiveTruncatedNormal>(j.at("r"), get_ptn);
    q.tau_shape = get_vec(j.at("tau_shape"));
    q.tau_rate = get_vec(j.at("tau_rate"));
    q.u_natural = get_list<Eigen::VectorXd>(j.at("u_natural"), get_vec);
    q.beta0_conc = get_vec(j.at("beta0_conc"));
    q.beta_conc = get_mat(j.at("beta_conc"));
    q.elbo_trace = get_list<double>(j.at("elbo_trace"), get_num);
    q.converged = j.at("converged").get<bool>();
    return q;
}

} // namespace

LatentState FitArchive::point_state() const
{
    if (distance) return map_extract(*distance).state;
    if (projection) return map_extract(*projection).state;
    if (vb_posterior) return vb_posterior->point_state();
    throw InvalidInput("archive holds no fit");
}

std::string archive_to_string(const FitArchive& a)
{
    const auto& dh = a.distance_hyper;
    const auto& ph = a.projection_hyper;
    json j = {
        {"version", a.version},
        {"geometry", to_string(a.geometry)},
        {"engine", a.engine},
        {"likelihood", to_string(a.likelihood)},
        {"G", a.G},
        {"p", a.p},
        {"n", a.n},
        {"T", a.T},
        {"directed", a.directed},
        {"seed", a.seed},
        {"distance_hyper",
         {{"nu_lambda", dh.nu_lambda}, {"xi_lambda", dh.xi_lambda}, {"a", dh.a}, {"b", dh.b}, {"c", dh.c},
          {"d", dh.d}, {"beta_pseudo", dh.beta_pseudo}, {"lik_prior_var", dh.lik_prior_var},
          {"s_pseudo", dh.s_pseudo}}},
        {"projection_hyper",
         {{"c", ph.c}, {"a2", ph.a2}, {"b2", ph.b2}, {"b3", ph.b3}, {"beta_pseudo", ph.beta_pseudo}}},
        {"chain",
         {{"iterations", a.chain.iterations}, {"burn_in", a.chain.burn_in}, {"thin", a.chain.thin},
          {"x_step", a.chain.x_step}, {"lik_step", a.chain.lik_step},
          {"s_concentration", a.chain.s_concentration}, {"adapt", a.chain.adapt},
          {"keep_aux", a.chain.keep_aux}}},
        {"vb",
         {{"max_sweeps", a.vb.max_sweeps}, {"tolerance", a.vb.tolerance}, {"restarts", a.vb.restarts},
          {"jitter", a.vb.jitter}}},
    };
    if (a.distance) j["distance_samples"] = samples_json(*a.distance, ddraw_json);
    if (a.projection) j["projection_samples"] = samples_json(*a.projection, pdraw_json);
    if (a.vb_posterior) j["vb_posterior"] = vb_json(*a.vb_posterior);
    return j.dump() + '\n';
}

FitArchive archive_from_string(const std::string& text)
{
    FitArchive a;
    try {
        const json j = json::parse(text);
        if (!j.contains("version")) throw InvalidInput("archive: missing version");
        a.version = j.at("version").get<int>();
        if (a.version != kArchiveVersion) {
            throw InvalidInput("archive: unsupported version " + std::to_string(a.version));
        }
        a.geometry = geometry_from_string(j.at("geometry").get<std::string>());
        a.engine = j.at("engine").get<std::string>();
        a.likelihood = likelihood_kind_from_string(j.at("likelihood").get<std::string>());
        a.G = j.at("G").get<int>();
        a.p = j.at("p").get<int>();
        a.n = j.at("n").get<int>();
        a.T = j.at("T").get<int>();
        a.directed = j.at("directed").get<bool>();
        a.seed = j.at("seed").get<std::uint64_t>();
        const auto& dh = j.at("distance_hyper");
        a.distance_hyper = {dh.at("nu_lambda"), dh.at("xi_lambda"), dh.at("a"),
                            dh.at("b"),         dh.at("c"),         dh.at("d"),
                            dh.at("beta_pseudo"), dh.at("lik_prior_var"), dh.at("s_pseudo")};
        const auto& ph = j.at("projection_hyper");
        a.projection_hyper = {ph.at("c"), ph.at("a2"), ph.at("b2"), ph.at("b3"), ph.at("beta_pseudo")};
        const auto& ch = j.at("chain");
        a.chain.iterations = ch.at("iterations");
        a.chain.burn_in = ch.at("burn_in");
        a.chain.thin = ch.at("thin");
        a.chain.x_step = ch.at("x_step");
        a.chain.lik_step = ch.at("lik_step");
        a.chain.s_concentration = ch.at("s_concentration");
        a.chain.adapt = ch.at("adapt");
        a.chain.keep_aux = ch.at("keep_aux");
        const auto& vb = j.at("vb");
        a.vb.max_sweeps = vb.at("max_sweeps");
        a.vb.tolerance = vb.at("tolerance");
        a.vb.restarts = vb.at("restarts");
        a.vb.jitter = vb.at("jitter");
        if (j.contains("distance_samples")) {
            a.distance = get_samples<DistanceDraw>(j.at("distance_samples"), get_ddraw);
        }
        if (j.contains("projection_samples")) {
            a.projection = get_samples<ProjectionDraw>(j.at("projection_samples"), get_pdraw);
        }
        if (j.contains("vb_posterior")) a.vb_posterior = get_vb(j.at("vb_posterior"));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("archive: ") + e.what());
    }
    return a;
}

void save_archive(const std::filesystem::path& path, const FitArchive& a)
{
    write_file_atomic(path, archive_to_string(a));
}

FitArchive load_archive(const std::filesystem::path& path)
{
    return archive_from_string(read_file(path));
}

} // namespace dlsc
