#pragma once

#include <cstdint>

namespace imblab {

/// Counter-based pseudorandom stream. Output i is a pure function of
/// (seed, stream, i), so identical seeds reproduce identical sequences and
/// independent substreams can be split off without sharing state. Distinct
/// RngStream instances are safe to use from different threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double next_uniform();

    /// Standard normal via Box-Muller; two uniforms per pair, second value cached.
    double next_normal();

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    /// Derived independent stream; deterministic in (seed, stream, id).
    RngStream substream(std::uint64_t id) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t base_ = 0;   // mixed (seed, stream) origin
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stable stream id from a short ASCII tag, so modules can claim
/// non-colliding streams by purpose ("taskgen", "shuffle", ...).
std::uint64_t stream_tag(const char* tag);

}  // namespace imblab
