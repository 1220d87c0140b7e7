#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dlsc/distance_model.hpp"
#include "dlsc/projection_model.hpp"
#include "dlsc/projection_vb.hpp"
#include "dlsc/samples.hpp"

namespace dlsc {

inline constexpr int kArchiveVersion = 1;

/// Everything needed to reload a fit and regenerate its reports: metadata,
/// the full hyperparameter set, the seed, and the draws or VB factors.
struct FitArchive
{
    int version = kArchiveVersion;
    Geometry geometry = Geometry::Projection;
    std::string engine = "mcmc"; // "mcmc" or "vb"
    LikelihoodKind likelihood = LikelihoodKind::Logistic; // distance fits only
    int G = 0;
    int p = 0;
    int n = 0;
    int T = 0;
    bool directed = true;
    std::uint64_t seed = 0;

    DistanceHyperparams distance_hyper;
    ProjectionHyperparams projection_hyper;
    ChainConfig chain;
    VBConfig vb;

    std::optional<DistanceSamples> distance;
    std::optional<ProjectionSamples> projection;
    std::optional<VBPosterior> vb_posterior;

    /// Point estimate: the MAP draw (MCMC) or the variational means (VB).
    LatentState point_state() const;
};

std::string archive_to_string(const FitArchive& a);
/// Throws InvalidInput on a missing or unsupported version or a malformed body.
FitArchive archive_from_string(const std::string& text);

void save_archive(const std::filesystem::path& path, const FitArchive& a);
FitArchive load_archive(const std::filesystem::path& path);

} // namespace dlsc
