#pragma once

#include <cstdint>

namespace nashvar {

// Philox4x32-10 counter-based generator (canonical constants). Each stream is
// keyed by (seed, stream) so parallel paths draw identical numbers regardless
// of the thread schedule.
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform draw in the open interval (0,1), 53-bit resolution.
    double next_uniform();

    // Standard normal via the inverse CDF (deterministic across platforms up to
    // libm's exp/log).
    double next_normal();

private:
    void refill();

    std::uint32_t key_[2];
    std::uint32_t counter_[4];
    std::uint32_t out_[4];
    int pos_ = 4;
};

} // namespace nashvar
