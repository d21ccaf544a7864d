// Synchronous AWGN CDMA channel: Y = C X + N with N ~ N(0, sigma^2 I).
// All randomness comes from counter-based streams keyed by
// (master_seed, point_index, frame_index) so any frame can be regenerated
// independently of worker count or scheduling.

#pragma once

#include <cstdint>
#include <vector>

#include "wbe/codebook.hpp"

namespace wbe {

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t point_index, std::uint64_t frame_index);

    std::uint64_t next_u64();
    double uniform01();  // [0, 1)
    double gaussian();   // standard normal, fixed Box-Muller transform
    double pm1();        // +-1, uniform

private:
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// sigma = sqrt(1 / (2 * 10^(dB/10))): unit-energy signature per bit,
// N0 = 2 sigma^2. +inf maps to sigma = 0 (noiseless sentinel).
double ebn0_to_sigma(double ebn0_db);

std::vector<double> random_bits(int k, RngStream& rng);

// y = C x + sigma * g with g i.i.d. standard normal.
std::vector<double> transmit(const CodeMatrix& c, const std::vector<double>& x,
                             double sigma, RngStream& rng);

}  // namespace wbe
