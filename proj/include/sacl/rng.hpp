#pragma once

#include <array>
#include <cstdint>

namespace sacl {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// The key is the master seed; the high half of the counter is the stream
/// index, so every (seed, stream) pair is an independent, reproducible stream.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller (second variate cached).
    double normal();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// One Philox4x32-10 block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int position_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sacl
