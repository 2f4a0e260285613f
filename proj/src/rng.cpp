#include "imblab/rng.hpp"

#include <cmath>
#include <numbers>

namespace imblab {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed) {
    base_ = mix64(seed + kGamma) ^ mix64(stream * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
}

std::uint64_t RngStream::next_u64() {
    return mix64(base_ + (++counter_) * kGamma);
}

double RngStream::next_uniform() {
    // 53-bit mantissa, offset keeps the value strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    // modulo bias is ~2^-64 * n; irrelevant at the sizes used here
    return next_u64() % n;
}

RngStream RngStream::substream(std::uint64_t id) const {
    RngStream s(0, 0);
    s.seed_ = seed_;
    s.base_ = mix64(base_ ^ (id * 0xDA942042E4DD58B5ULL + 0x9FB21C651E98DF25ULL));
    return s;
}

std::uint64_t stream_tag(const char* tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (const char* p = tag; *p; ++p) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*p));
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace imblab
