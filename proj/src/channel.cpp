#include "wbe/channel.hpp"

#include <cmath>
#include <numbers>

namespace wbe {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t point_index,
                     std::uint64_t frame_index) {
    std::uint64_t s = mix64(master_seed + kGolden);
    s = mix64(s + kGolden * (point_index + 1));
    s = mix64(s + kGolden * (frame_index + 1));
    base_ = s;
}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGolden);
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

double RngStream::pm1() { return (next_u64() >> 63) ? 1.0 : -1.0; }

double ebn0_to_sigma(double ebn0_db) {
    if (std::isinf(ebn0_db) && ebn0_db > 0.0) return 0.0;
    if (!std::isfinite(ebn0_db)) throw std::invalid_argument("ebn0_to_sigma: invalid Eb/N0");
    return std::sqrt(1.0 / (2.0 * std::pow(10.0, ebn0_db / 10.0)));
}

std::vector<double> random_bits(int k, RngStream& rng) {
    if (k < 1) throw std::invalid_argument("random_bits: k must be >= 1");
    std::vector<double> x(k);
    for (auto& v : x) v = rng.pm1();
    return x;
}

std::vector<double> transmit(const CodeMatrix& c, const std::vector<double>& x, double sigma,
                             RngStream& rng) {
    if (x.size() != static_cast<std::size_t>(c.users))
        throw std::invalid_argument("transmit: data length does not match user count");
    if (!(sigma >= 0.0)) throw std::invalid_argument("transmit: sigma must be >= 0");
    std::vector<double> y = c.times(x);
    if (sigma > 0.0)
        for (auto& v : y) v += sigma * rng.gaussian();
    return y;
}

}  // namespace wbe
