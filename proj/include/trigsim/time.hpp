#pragma once

#include <cstdint>
#include <compare>

#include "trigsim/errors.hpp"

namespace trigsim {

// All simulation time is integer femtoseconds. 1 fs resolution keeps every
// delay, jitter draw and clock edge exact; int64 overflows after ~106 days
// of simulated time, far beyond any run this library models.

// Signed span of time. Negative values are legal (jitter offsets); call
// sites that need non-negative spans validate at the boundary.
class Duration {
public:
    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t fs) : fs_(fs) {}

    constexpr std::int64_t count() const { return fs_; }

    constexpr Duration operator+(Duration o) const { return Duration(fs_ + o.fs_); }
    constexpr Duration operator-(Duration o) const { return Duration(fs_ - o.fs_); }
    constexpr Duration operator-() const { return Duration(-fs_); }
    constexpr Duration operator*(std::int64_t k) const { return Duration(fs_ * k); }
    constexpr Duration& operator+=(Duration o) { fs_ += o.fs_; return *this; }
    constexpr Duration& operator-=(Duration o) { fs_ -= o.fs_; return *this; }
    constexpr auto operator<=>(const Duration&) const = default;

private:
    std::int64_t fs_ = 0;
};

constexpr Duration operator*(std::int64_t k, Duration d) { return d * k; }

// Absolute simulation time, femtoseconds since run start. Never negative.
class TimeStamp {
public:
    constexpr TimeStamp() = default;
    constexpr explicit TimeStamp(std::int64_t fs) : fs_(fs) {
        if (fs < 0) throw ConfigError("TimeStamp must be non-negative");
    }

    constexpr std::int64_t count() const { return fs_; }

    constexpr TimeStamp operator+(Duration d) const { return TimeStamp(fs_ + d.count()); }
    constexpr TimeStamp operator-(Duration d) const { return TimeStamp(fs_ - d.count()); }
    constexpr Duration operator-(TimeStamp o) const { return Duration(fs_ - o.fs_); }
    constexpr auto operator<=>(const TimeStamp&) const = default;

private:
    std::int64_t fs_ = 0;
};

constexpr Duration femtoseconds(std::int64_t v) { return Duration(v); }
constexpr Duration picoseconds(std::int64_t v)  { return Duration(v * 1'000); }
constexpr Duration nanoseconds(std::int64_t v)  { return Duration(v * 1'000'000); }
constexpr Duration microseconds(std::int64_t v) { return Duration(v * 1'000'000'000); }

inline namespace literals {
constexpr Duration operator""_fs(unsigned long long v) { return femtoseconds(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_ps(unsigned long long v) { return picoseconds(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_ns(unsigned long long v) { return nanoseconds(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_us(unsigned long long v) { return microseconds(static_cast<std::int64_t>(v)); }
} // namespace literals

// Ideal sampling clock: edges at phase + k * period for every integer k >= 0.
struct ClockDomain {
    Duration period = nanoseconds(4); // 250 MHz default
    Duration phase  = Duration(0);    // offset of edge 0, in [0, period)

    void validate() const {
        if (period.count() <= 0) throw ConfigError("clock period must be positive");
        if (phase.count() < 0 || phase.count() >= period.count())
            throw ConfigError("clock phase must lie in [0, period)");
    }
};

// First edge at or after t. With period p and phase f this is
// f + ceil((t - f) / p) * p, clamped to edge 0 for t <= f.
inline TimeStamp next_edge_at_or_after(const ClockDomain& clock, TimeStamp t) {
    const std::int64_t p = clock.period.count();
    const std::int64_t f = clock.phase.count();
    if (t.count() <= f) return TimeStamp(f);
    const std::int64_t k = (t.count() - f + p - 1) / p;
    return TimeStamp(f + k * p);
}

} // namespace trigsim
