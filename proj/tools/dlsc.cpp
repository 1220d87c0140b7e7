// Command-line front end: simulate, fit, select, predict, evaluate, coassign, bench.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlsc/archive.hpp"
#include "dlsc/benchmark.hpp"
#include "dlsc/distance_sampler.hpp"
#include "dlsc/errors.hpp"
#include "dlsc/metrics.hpp"
#include "dlsc/netio.hpp"
#include "dlsc/prediction.hpp"
#include "dlsc/projection_gibbs.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/selection.hpp"
#include "dlsc/simulation.hpp"

namespace fs = std::filesystem;
using namespace dlsc;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

void emit(const std::string& out, const std::string& content)
{
    if (out.empty() || out == "-") {
        std::cout << content;
    } else {
        write_file_atomic(out, content);
    }
}

std::string ctx_int(long v)
{
    return std::to_string(v);
}

// ---------------------------------------------------------------------------

struct SimulateOpts
{
    std::string geometry = "projection";
    bool sticky = false;
    bool transitory = false;
    int n = 100;
    int T = 10;
    int G = 6;
    std::uint64_t seed = 0;
    bool next_step = false;
    std::string out;
};

int run_simulate(const SimulateOpts& o)
{
    if (o.sticky && o.transitory) throw UsageError("--sticky and --transitory are exclusive");
    SimConfig c;
    c.geometry = geometry_from_string(o.geometry);
    c.n = o.n;
    c.T = o.T;
    c.G = o.G;
    c.seed = o.seed;
    c.stickiness = o.transitory ? Stickiness::Transitory : Stickiness::Sticky;
    c.next_step = o.next_step;
    try {
        c.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    DynamicNetwork net;
    LatentState truth;
    std::optional<Eigen::MatrixXd> next;
    if (c.geometry == Geometry::Distance) {
        auto sim = simulate_distance(c);
        net = std::move(sim.net);
        truth = std::move(sim.truth);
        next = std::move(sim.next_probs);
    } else {
        auto sim = simulate_projection(c);
        net = std::move(sim.net);
        truth = std::move(sim.truth);
        next = std::move(sim.next_probs);
    }
    fs::create_directories(o.out);
    const fs::path dir = o.out;
    write_network(dir / "network.txt", net);
    write_file_atomic(dir / "truth_labels.tsv", format_labels(truth.Z));
    if (next) write_file_atomic(dir / "next_probs.tsv", format_matrix(*next));
    return kOk;
}

// ---------------------------------------------------------------------------

struct ChainOpts
{
    int iterations = 4000;
    int burn_in = 2000;
    int thin = 10;
};

ChainConfig chain_from(const ChainOpts& o)
{
    ChainConfig c;
    c.iterations = o.iterations;
    c.burn_in = o.burn_in;
    c.thin = o.thin;
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return c;
}

struct FitOpts
{
    std::string network;
    std::string geometry = "projection";
    std::string engine = "mcmc";
    std::string likelihood;
    int G = 0;
    int p = 0;
    ChainOpts chain;
    double xi_lambda = DistanceHyperparams{}.xi_lambda;
    int restarts = VBConfig{}.restarts;
    int max_sweeps = VBConfig{}.max_sweeps;
    std::uint64_t seed = 0;
    std::string out;
    std::string report;
};

std::vector<Record> diagnostics(const FitArchive& a, const DynamicNetwork& net)
{
    std::vector<Record> recs;
    FitSummary s;
    if (a.distance) {
        const auto& smp = *a.distance;
        for (std::size_t k = 0; k < smp.log_posterior_trace.size(); ++k) {
            recs.push_back({"log_posterior", smp.log_posterior_trace[k], {{"iteration", ctx_int(static_cast<long>(k))}}});
        }
        for (const auto& [block, rate] : smp.acceptance) recs.push_back({"acceptance_rate", rate, {{"block", block}}});
        s = summarize_fit(net, smp, smp.size() >= kMinDicDraws);
    } else if (a.projection) {
        const auto& smp = *a.projection;
        for (std::size_t k = 0; k < smp.log_posterior_trace.size(); ++k) {
            recs.push_back({"log_posterior", smp.log_posterior_trace[k], {{"iteration", ctx_int(static_cast<long>(k))}}});
        }
        s = summarize_fit(net, smp, smp.size() >= kMinDicDraws);
    } else {
        const auto& q = *a.vb_posterior;
        for (std::size_t k = 0; k < q.elbo_trace.size(); ++k) {
            recs.push_back({"elbo", q.elbo_trace[k], {{"sweep", ctx_int(static_cast<long>(k))}}});
        }
        recs.push_back({"converged", q.converged ? 1.0 : 0.0, {}});
        s = summarize_fit(net, q);
    }
    const std::vector<std::pair<std::string, std::string>> ctx{{"geometry", to_string(a.geometry)},
                                                               {"G", ctx_int(a.G)}};
    recs.push_back({"loglik_at_map", s.loglik_at_map, ctx});
    recs.push_back({"latent_marginal_loglik", s.latent_marginal_loglik, ctx});
    recs.push_back({"bic1", s.bic1, ctx});
    recs.push_back({"bic2", s.bic2, ctx});
    recs.push_back({"bic", s.bic, ctx});
    if (!std::isnan(s.dic)) recs.push_back({"dic", s.dic, ctx});
    return recs;
}

int run_fit(const FitOpts& o)
{
    FitArchive a;
    a.geometry = geometry_from_string(o.geometry);
    a.engine = o.engine;
    if (a.engine != "mcmc" && a.engine != "vb") throw UsageError("--engine must be mcmc or vb");
    if (a.engine == "vb" && a.geometry == Geometry::Distance) {
        throw UsageError("variational inference is available for the projection geometry only");
    }
    if (a.geometry == Geometry::Projection && !o.likelihood.empty()) {
        throw UsageError("--likelihood applies to the distance geometry only");
    }
    const DynamicNetwork net = read_network(o.network);
    a.G = o.G;
    a.p = o.p > 0 ? o.p : (a.geometry == Geometry::Distance ? 2 : 3);
    a.n = net.n();
    a.T = net.T();
    a.directed = net.directed();
    a.seed = o.seed;
    a.chain = chain_from(o.chain);
    a.vb.restarts = o.restarts;
    a.vb.max_sweeps = o.max_sweeps;
    a.distance_hyper.xi_lambda = o.xi_lambda;
    try {
        a.vb.validate();
        a.distance_hyper.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (a.geometry == Geometry::Distance) {
        a.likelihood = o.likelihood.empty()
                           ? (net.is_binary() ? LikelihoodKind::DegreeCorrected : LikelihoodKind::PlackettLuce)
                           : likelihood_kind_from_string(o.likelihood);
    }

    RngStream rng(o.seed, 0);
    if (a.geometry == Geometry::Distance) {
        a.distance = mh_within_gibbs_fit(net, a.G, a.p, a.likelihood, a.distance_hyper, a.chain, rng);
    } else if (a.engine == "mcmc") {
        a.projection = gibbs_fit_projection(net, a.G, a.p, a.projection_hyper, a.chain, rng);
    } else {
        a.vb_posterior = vb_fit_projection(net, a.G, a.p, a.projection_hyper, a.vb, rng);
    }
    save_archive(o.out, a);
    if (!o.report.empty()) write_file_atomic(o.report, format_records(diagnostics(a, net)));
    return kOk;
}

// ---------------------------------------------------------------------------

struct SelectOpts
{
    std::string network;
    std::string g_range = "2..6";
    std::vector<std::string> geometries{"distance", "projection"};
    std::string likelihood;
    ChainOpts distance_chain;
    ChainOpts projection_chain{1500, 500, 10};
    int restarts = VBConfig{}.restarts;
    int threads = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string table;
};

std::pair<int, int> parse_range(const std::string& s)
{
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const int g = std::stoi(s);
            return {g, g};
        }
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw UsageError("--G-range must look like a..b");
    }
}

int run_select(const SelectOpts& o)
{
    const auto [lo, hi] = parse_range(o.g_range);
    if (lo < 1 || hi < lo) throw UsageError("--G-range must satisfy 1 <= a <= b");
    const DynamicNetwork net = read_network(o.network);
    SelectionBudget b;
    b.geometries.clear();
    for (const auto& g : o.geometries) b.geometries.push_back(geometry_from_string(g));
    b.distance_kind = o.likelihood.empty()
                          ? (net.is_binary() ? LikelihoodKind::DegreeCorrected : LikelihoodKind::PlackettLuce)
                          : likelihood_kind_from_string(o.likelihood);
    b.distance_chain = chain_from(o.distance_chain);
    b.projection_chain = chain_from(o.projection_chain);
    b.projection_vb.restarts = o.restarts;
    b.threads = o.threads;
    const SelectionResult r = select_model(net, lo, hi, b, o.seed);
    emit(o.out, format_summary_table(r.winners));
    if (!o.table.empty()) write_file_atomic(o.table, format_summary_table(r.table));
    return kOk;
}

// ---------------------------------------------------------------------------

int run_predict(const std::string& archive, std::uint64_t seed, int reps, const std::string& out)
{
    if (reps < 1) throw UsageError("--reps must be positive");
    const FitArchive a = load_archive(archive);
    RngStream rng(seed, 0);
    Eigen::MatrixXd P;
    if (a.distance) {
        P = one_step_ahead_probs(*a.distance, a.directed, rng, reps);
    } else if (a.projection) {
        P = one_step_ahead_probs(*a.projection, a.directed, rng, reps);
    } else if (a.vb_posterior) {
        P = one_step_ahead_probs(*a.vb_posterior, rng, 200 * reps);
    } else {
        throw InvalidInput("archive holds no fit");
    }
    emit(out, format_matrix(P));
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateOpts
{
    std::string archive;
    std::string network;
    std::string truth;
    std::string predicted;
    std::string next_probs;
    std::string out;
};

Eigen::MatrixXd read_matrix(const std::string& path)
{
    std::istringstream in(read_file(path));
    return parse_matrix(in);
}

int run_evaluate(const EvaluateOpts& o)
{
    if (o.predicted.empty() != o.next_probs.empty()) {
        throw UsageError("--predicted and --next-probs go together");
    }
    std::vector<Record> recs;
    if (!o.archive.empty()) {
        if (o.network.empty()) throw UsageError("--archive needs --network");
        const FitArchive a = load_archive(o.archive);
        const DynamicNetwork net = read_network(o.network);
        if (a.n != net.n() || a.T != net.T()) throw InvalidInput("archive does not match the network");
        const PartitionSeries est = a.point_state().Z;
        if (net.is_binary()) {
            double v = 0.0;
            if (a.distance) v = insample_auc(*a.distance, net);
            else if (a.projection) v = insample_auc(*a.projection, net);
            else v = insample_auc(*a.vb_posterior, net);
            recs.push_back({"auc", v, {{"scope", "in-sample"}}});
        }
        std::optional<PartitionSeries> truth;
        if (!o.truth.empty()) {
            std::istringstream in(read_file(o.truth));
            truth = parse_labels(in);
            if (truth->rows() != est.rows() || truth->cols() != est.cols()) {
                throw InvalidInput("truth labels do not match the fit's shape");
            }
            recs.push_back({"cri", corrected_rand(*truth, est), {{"scope", "pooled"}}});
            recs.push_back({"vi", variation_of_information(*truth, est), {{"scope", "pooled"}, {"log", "natural"}}});
            const auto cri_t = corrected_rand_by_time(*truth, est);
            const auto vi_t = variation_of_information_by_time(*truth, est);
            for (std::size_t t = 0; t < cri_t.size(); ++t) {
                recs.push_back({"cri", cri_t[t], {{"t", ctx_int(static_cast<long>(t + 1))}}});
                recs.push_back({"vi", vi_t[t], {{"t", ctx_int(static_cast<long>(t + 1))}, {"log", "natural"}}});
            }
        }
        if (net.is_binary()) {
            for (int t = 0; t < net.T(); ++t) {
                if (net.adjacency(t).sum() == 0.0) continue;
                const std::string tt = ctx_int(t + 1);
                recs.push_back({"modularity", modularity(net.adjacency(t), est.col(t)), {{"t", tt}, {"labels", "estimated"}}});
                if (truth) {
                    recs.push_back({"modularity", modularity(net.adjacency(t), truth->col(t)), {{"t", tt}, {"labels", "truth"}}});
                }
            }
        }
    }
    if (!o.predicted.empty()) {
        const Eigen::MatrixXd P = read_matrix(o.predicted);
        const Eigen::MatrixXd Q = read_matrix(o.next_probs);
        if (P.rows() != Q.rows() || P.cols() != Q.cols() || P.rows() != P.cols()) {
            throw InvalidInput("probability matrices must be square and equally sized");
        }
        std::vector<double> a, b;
        for (Eigen::Index i = 0; i < P.rows(); ++i) {
            for (Eigen::Index j = 0; j < P.cols(); ++j) {
                if (i == j) continue;
                a.push_back(P(i, j));
                b.push_back(Q(i, j));
            }
        }
        recs.push_back({"next_step_correlation", pearson(a, b), {}});
    }
    if (recs.empty()) throw UsageError("nothing to evaluate: give --archive/--network and/or --predicted/--next-probs");
    emit(o.out, format_records(recs));
    return kOk;
}

// ---------------------------------------------------------------------------

int run_coassign(const std::string& archive, int t, const std::string& out)
{
    const FitArchive a = load_archive(archive);
    if (t < 1 || t > a.T) throw UsageError("--t must lie in 1..T");
    Eigen::MatrixXd C;
    if (a.distance) {
        C = coassignment_probs(*a.distance, t - 1);
    } else if (a.projection) {
        C = coassignment_probs(*a.projection, t - 1);
    } else if (a.vb_posterior) {
        C = coassignment_probs(*a.vb_posterior, t - 1);
    } else {
        throw InvalidInput("archive holds no fit");
    }
    emit(out, format_matrix(C));
    return kOk;
}

// ---------------------------------------------------------------------------

int run_bench(BenchConfig cfg, const std::string& out)
{
    const auto rows = runtime_benchmark(cfg);
    std::string s = "n\tengine\tbudget\tmeasured\tseconds_measured\tseconds_total\tprojected\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line.precision(6);
        line << r.n << '\t' << r.engine << '\t' << r.budget << '\t' << r.measured << '\t' << r.seconds_measured
             << '\t' << r.seconds_total << '\t' << (r.projected ? 1 : 0) << '\n';
        s += line.str();
    }
    emit(out, s);
    return kOk;
}

void add_chain_opts(CLI::App* cmd, ChainOpts& c, const std::string& prefix = "")
{
    cmd->add_option("--" + prefix + "iterations", c.iterations, "sweeps including burn-in")->capture_default_str();
    cmd->add_option("--" + prefix + "burn-in", c.burn_in, "burn-in sweeps")->capture_default_str();
    cmd->add_option("--" + prefix + "thin", c.thin, "keep every k-th sweep")->capture_default_str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Community detection in dynamic networks with latent space models"};
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "draw a network and its ground truth");
    simulate->add_option("--geometry", sim.geometry)->check(CLI::IsMember({"distance", "projection"}))->capture_default_str();
    simulate->add_flag("--sticky", sim.sticky, "sticky transitions (default)");
    simulate->add_flag("--transitory", sim.transitory, "transitory transitions");
    simulate->add_option("--n", sim.n)->capture_default_str();
    simulate->add_option("--T", sim.T)->capture_default_str();
    simulate->add_option("--G", sim.G)->capture_default_str();
    simulate->add_flag("--next-step", sim.next_step, "also write true edge probabilities for T+1");
    simulate->add_option("--seed", sim.seed)->required();
    simulate->add_option("--out", sim.out, "output directory")->required();

    FitOpts fit;
    auto* fitc = app.add_subcommand("fit", "fit one model and write a fit archive");
    fitc->add_option("--network", fit.network)->required()->check(CLI::ExistingFile);
    fitc->add_option("--geometry", fit.geometry)->check(CLI::IsMember({"distance", "projection"}))->capture_default_str();
    fitc->add_option("--engine", fit.engine)->check(CLI::IsMember({"mcmc", "vb"}))->capture_default_str();
    fitc->add_option("--likelihood", fit.likelihood, "distance only: logistic, degree-corrected, plackett-luce")
        ->check(CLI::IsMember({"logistic", "degree-corrected", "plackett-luce"}));
    fitc->add_option("--G", fit.G)->required()->check(CLI::PositiveNumber);
    fitc->add_option("--p", fit.p, "latent dimension (default 2 distance, 3 projection)");
    add_chain_opts(fitc, fit.chain);
    fitc->add_option("--xi-lambda", fit.xi_lambda, "prior variance of lambda")->capture_default_str();
    fitc->add_option("--restarts", fit.restarts, "VB restarts")->capture_default_str();
    fitc->add_option("--max-sweeps", fit.max_sweeps, "VB sweep limit")->capture_default_str();
    fitc->add_option("--seed", fit.seed)->required();
    fitc->add_option("--out", fit.out, "fit archive (JSON)")->required();
    fitc->add_option("--report", fit.report, "diagnostics records");

    SelectOpts sel;
    auto* select = app.add_subcommand("select", "choose G by BIC and the geometry by DIC");
    select->add_option("--network", sel.network)->required()->check(CLI::ExistingFile);
    select->add_option("--G-range", sel.g_range)->capture_default_str();
    select->add_option("--geometries", sel.geometries)->delimiter(',')->check(CLI::IsMember({"distance", "projection"}));
    select->add_option("--likelihood", sel.likelihood)->check(CLI::IsMember({"logistic", "degree-corrected", "plackett-luce"}));
    add_chain_opts(select, sel.distance_chain, "distance-");
    add_chain_opts(select, sel.projection_chain, "projection-");
    select->add_option("--restarts", sel.restarts, "VB restarts per G")->capture_default_str();
    select->add_option("--threads", sel.threads, "0 = DLSC_THREADS or all cores")->capture_default_str();
    select->add_option("--seed", sel.seed)->required();
    select->add_option("--out", sel.out, "ranked winners table (default stdout)");
    select->add_option("--table", sel.table, "full per-cell table");

    std::string pred_archive, pred_out;
    std::uint64_t pred_seed = 0;
    int pred_reps = 1;
    auto* predict = app.add_subcommand("predict", "one-step-ahead edge probabilities");
    predict->add_option("--archive", pred_archive)->required()->check(CLI::ExistingFile);
    predict->add_option("--reps", pred_reps, "propagations per draw")->capture_default_str();
    predict->add_option("--seed", pred_seed)->required();
    predict->add_option("--out", pred_out);

    EvaluateOpts ev;
    auto* evaluate = app.add_subcommand("evaluate", "AUC, CRI, VI and modularity records");
    evaluate->add_option("--archive", ev.archive)->check(CLI::ExistingFile);
    evaluate->add_option("--network", ev.network)->check(CLI::ExistingFile);
    evaluate->add_option("--truth", ev.truth, "true labels (n rows, T columns)")->check(CLI::ExistingFile);
    evaluate->add_option("--predicted", ev.predicted)->check(CLI::ExistingFile);
    evaluate->add_option("--next-probs", ev.next_probs)->check(CLI::ExistingFile);
    evaluate->add_option("--out", ev.out);

    std::string co_archive, co_out;
    int co_t = 1;
    auto* coassign = app.add_subcommand("coassign", "pairwise co-assignment probabilities at one time");
    coassign->add_option("--archive", co_archive)->required()->check(CLI::ExistingFile);
    coassign->add_option("--t", co_t, "time, 1-based")->required();
    coassign->add_option("--out", co_out);

    BenchConfig bc;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Gibbs vs VB wall-clock on simulated data");
    bench->add_option("--n", bc.n_values)->delimiter(',')->capture_default_str();
    bench->add_option("--T", bc.T)->capture_default_str();
    bench->add_option("--gibbs-draws", bc.gibbs_budget)->capture_default_str();
    bench->add_option("--measure-draws", bc.gibbs_measured, "Gibbs draws actually timed")->capture_default_str();
    bench->add_option("--vb-sweeps", bc.vb_budget)->capture_default_str();
    bench->add_option("--seed", bc.seed)->required();
    bench->add_option("--out", bench_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*fitc) return run_fit(fit);
        if (*select) return run_select(sel);
        if (*predict) return run_predict(pred_archive, pred_seed, pred_reps, pred_out);
        if (*evaluate) return run_evaluate(ev);
        if (*coassign) return run_coassign(co_archive, co_t, co_out);
        if (*bench) return run_bench(bc, bench_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
