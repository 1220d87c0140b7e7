#include "dlsc/benchmark.hpp"

#include <chrono>

#include "dlsc/errors.hpp"
#include "dlsc/init.hpp"
#include "dlsc/projection_gibbs.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/simulation.hpp"

namespace dlsc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::vector<BenchRow> runtime_benchmark(const BenchConfig& cfg)
{
    if (cfg.n_values.empty()) throw InvalidInput("benchmark needs at least one n");
    if (cfg.gibbs_budget < 1 || cfg.vb_budget < 1 || cfg.gibbs_measured < 1) {
        throw InvalidInput("benchmark budgets must be positive");
    }
    std::vector<BenchRow> rows;
    for (int n : cfg.n_values) {
        SimConfig sc;
        sc.geometry = Geometry::Projection;
        sc.n = n;
        sc.T = cfg.T;
        sc.G = cfg.G;
        sc.p = cfg.p;
        sc.seed = cfg.seed;
        const DynamicNetwork net = simulate_projection(sc).net;
        const ProjectionHyperparams hyper;

        RngStream rng(cfg.seed, static_cast<std::uint64_t>(n));
        ProjectionStart start = initialize_projection(net, cfg.G, cfg.p, hyper, rng);

        BenchRow g;
        g.n = n;
        g.engine = "gibbs";
        g.budget = cfg.gibbs_budget;
        g.measured = std::min(cfg.gibbs_measured, cfg.gibbs_budget);
        {
            ProjectionSampler sampler(net, hyper, start.state, start.params, rng);
            const auto t0 = std::chrono::steady_clock::now();
            for (long k = 0; k < g.measured; ++k) sampler.sweep();
            g.seconds_measured = seconds_since(t0);
        }
        g.projected = g.measured < g.budget;
        g.seconds_total = g.seconds_measured * static_cast<double>(g.budget) / static_cast<double>(g.measured);
        rows.push_back(g);

        BenchRow v;
        v.n = n;
        v.engine = "vb";
        v.budget = cfg.vb_budget;
        VBConfig vc;
        vc.max_sweeps = cfg.vb_budget;
        vc.tolerance = 0.0;
        VBPosterior q = vb_initialize(net, start.state, start.params, hyper);
        const auto t0 = std::chrono::steady_clock::now();
        vb_run(net, q, hyper, vc);
        v.seconds_measured = seconds_since(t0);
        v.measured = static_cast<long>(q.elbo_trace.size());
        v.projected = v.measured < v.budget;
        v.seconds_total = v.seconds_measured * static_cast<double>(v.budget) / static_cast<double>(v.measured);
        rows.push_back(v);
    }
    return rows;
}

} // namespace dlsc
