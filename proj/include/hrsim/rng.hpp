#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hrsim {

/// One independent pseudo-random stream per stochastic entity. The stream is
/// fully determined by (global seed, stream name), so adding or removing an
/// entity never perturbs another entity's draws. mt19937_64 output is fixed
/// by the standard, which keeps runs identical across platforms.
class RngStream {
  public:
    RngStream(std::uint64_t global_seed, std::string_view stream_id);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) built from the top 53 bits of one draw.
    double next_unit();

    /// True with probability p.
    bool bernoulli(double p);

    std::uint64_t draws() const { return draws_; }

  private:
    std::mt19937_64 gen_;
    std::uint64_t draws_{0};
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

} // namespace hrsim
