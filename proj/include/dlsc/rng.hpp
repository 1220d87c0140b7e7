#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace dlsc {

/// Seedable xoshiro256** stream. Stream k of a seed starts k long-jumps
/// (2^192 steps each) past stream 0, so streams never overlap.
///
/// Satisfies UniformRandomBitGenerator, so the std:: distributions can draw
/// from it directly. A stream is single-owner; copy it to fork the sequence.
class RngStream
{
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Exponential with unit rate.
    double exponential();
    /// Gamma with the given shape and unit scale.
    double gamma(double shape);
    double beta(double a, double b);
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);

private:
    void long_jump();

    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace dlsc
