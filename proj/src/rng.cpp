#include "dlsc/rng.hpp"

#include <cmath>

namespace dlsc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_{seed}, stream_id_{stream_id}
{
    std::uint64_t x = seed;
    for (auto& word : s_) word = splitmix64(x);
    for (std::uint64_t k = 0; k < stream_id; ++k) long_jump();
}

RngStream::result_type RngStream::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

void RngStream::long_jump()
{
    static constexpr std::uint64_t kJump[] = {0x76e15d3efefdcbbfULL, 0xc5004e441c522fb3ULL,
                                              0x77710069854ee241ULL, 0x39109bb02acbe635ULL};
    std::array<std::uint64_t, 4> acc{};
    for (auto word : kJump) {
        for (int b = 0; b < 64; ++b) {
            if (word & (std::uint64_t{1} << b)) {
                for (int k = 0; k < 4; ++k) acc[k] ^= s_[k];
            }
            (*this)();
        }
    }
    s_ = acc;
}

double RngStream::uniform()
{
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal()
{
    return normal_(*this);
}

double RngStream::exponential()
{
    return -std::log(uniform());
}

double RngStream::gamma(double shape)
{
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(*this);
}

double RngStream::beta(double a, double b)
{
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

std::size_t RngStream::index(std::size_t n)
{
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

} // namespace dlsc
