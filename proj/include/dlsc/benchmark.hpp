#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dlsc {

struct BenchConfig
{
    std::vector<int> n_values{100, 200, 400};
    int T = 10;
    int G = 6;
    int p = 3;
    long gibbs_budget = 50000; // draws the timing refers to
    int vb_budget = 500;       // sweeps the timing refers to
    /// Gibbs draws actually timed; the total is extrapolated linearly when
    /// this is below gibbs_budget.
    long gibbs_measured = 50;
    std::uint64_t seed = 1;
};

struct BenchRow
{
    int n = 0;
    std::string engine; // "gibbs" or "vb"
    long budget = 0;
    long measured = 0;
    double seconds_measured = 0.0;
    double seconds_total = 0.0; // for the full budget
    bool projected = false;
};

/// Wall-clock of the projection-model Gibbs sampler and VB on simulated
/// projection data, one pair of rows per n.
std::vector<BenchRow> runtime_benchmark(const BenchConfig& cfg);

} // namespace dlsc
