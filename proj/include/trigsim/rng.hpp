#pragma once

#include <cstdint>

#include "trigsim/errors.hpp"

namespace trigsim {

// Deterministic PRNG handle. The generator is PCG XSH RR 64/32 (setseq
// variant): 64-bit LCG state advanced with a per-stream odd increment,
// output permuted by xorshift + rotate. Chosen because the algorithm is
// small enough to freeze here, produces identical sequences on every
// platform, and supports independent streams, which the simulator leans
// on heavily: every subsystem draws from its own split handle so adding
// a draw in one place never perturbs another.
//
// Draw discipline: handles are value types. Never share one handle across
// subsystems; derive children with split(). Unrelated sequences stay
// decoupled that way, which is what makes run reports byte-stable under
// code evolution.
class RngHandle {
public:
    explicit RngHandle(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id) {
        inc_ = (stream_id << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // High 32 bits are drawn first.
    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0, 1) with 53 random mantissa bits. Exact dyadic rational,
    // so downstream arithmetic is bit-identical everywhere.
    double unit_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound), unbiased via rejection. bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw ConfigError("below() needs bound >= 1");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t uniform_in(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ConfigError("uniform_in() needs lo <= hi");
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        return lo + static_cast<std::int64_t>(below(span));
    }

    // Standard gaussian approximated as sum of 12 unit uniforms minus 6.
    // Mean 0, variance exactly 1, support clipped to [-6, 6]. Uses only
    // IEEE add/sub of dyadic rationals, so results are bit-exact across
    // platforms, unlike transcendental-based methods. Callers that clamp
    // below 6 sigma see no difference from a true gaussian tail.
    double gaussian() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += unit_double();
        return s - 6.0;
    }

    // Child handle decorrelated from this one and from other children.
    // splitmix64 mixing; same (seed, stream, child) always yields the same
    // child handle. The parent is not advanced.
    RngHandle split(std::uint64_t child) const {
        const std::uint64_t s =
            mix64(seed_ ^ mix64(stream_ + 0x9E3779B97F4A7C15ull * (child + 1)));
        const std::uint64_t t = mix64(s ^ child);
        return RngHandle(s, t);
    }

private:
    static std::uint64_t mix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

} // namespace trigsim
