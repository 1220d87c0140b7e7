#include "dlsc/samples.hpp"

#include "dlsc/errors.hpp"

namespace dlsc {

const char* to_string(Geometry g)
{
    return g == Geometry::Distance ? "distance" : "projection";
}

Geometry geometry_from_string(const std::string& name)
{
    if (name == "distance") return Geometry::Distance;
    if (name == "projection") return Geometry::Projection;
    throw InvalidInput("unknown geometry '" + name + "'");
}

void ChainConfig::validate() const
{
    if (iterations < 1 || burn_in < 0 || iterations <= burn_in) {
        throw ConfigError("chain needs iterations > burn-in >= 0");
    }
    if (thin < 1) throw ConfigError("thin must be at least 1");
    if (!(x_step > 0.0) || !(lik_step > 0.0) || s_concentration < 0.0) {
        throw ConfigError("proposal scales must be positive");
    }
}

const DistanceDraw& map_extract(const DistanceSamples& samples)
{
    if (samples.map_draw) return *samples.map_draw;
    if (samples.empty()) throw InvalidInput("map_extract: no draws");
    return samples.draws[map_index(samples)];
}

const ProjectionDraw& map_extract(const ProjectionSamples& samples)
{
    if (samples.map_draw) return *samples.map_draw;
    if (samples.empty()) throw InvalidInput("map_extract: no draws");
    return samples.draws[map_index(samples)];
}

} // namespace dlsc
