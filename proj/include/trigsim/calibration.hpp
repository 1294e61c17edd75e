#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trigsim/metastability.hpp"
#include "trigsim/topology.hpp"

namespace trigsim {

// Probe burst parameters. The interval must be an exact multiple of the
// sampling period so every probe pulse meets the clock at the same phase.
struct ProbeConfig {
    std::uint32_t pulse_count = 50'000;
    Duration interval = nanoseconds(40);

    void validate(const ClockDomain& clock) const {
        if (pulse_count < 2)
            throw ConfigError("probe burst needs at least 2 pulses");
        if (interval.count() <= 0)
            throw ConfigError("probe interval must be positive");
        if (interval.count() % clock.period.count() != 0)
            throw ConfigError("probe interval must be a whole number of clock periods");
    }
};

// What the master observed for one burst at one delay setting.
struct ProbeRecord {
    std::uint32_t received_count = 0;
    std::vector<Duration> measured_intervals; // between consecutive captured edges
    std::uint32_t error_count = 0;            // intervals != the configured one
};

// Per-tap burst results across the whole chain range.
struct TapScan {
    std::array<bool, DelayChain::kTapsPerElement> error_flags{};
    std::array<std::uint32_t, DelayChain::kTapsPerElement> error_counts{};
};

// Contiguous run of flagged taps (a metastability cluster).
struct TapCluster {
    int first;
    int last;
    int width() const { return last - first + 1; }
    double center() const { return (first + last) / 2.0; }
};

std::vector<TapCluster> flagged_clusters(const TapScan& scan);

struct StableRegion {
    int start;
    int end;
    int mid;
};

struct CalibrationResult {
    TapScan scan;
    StableRegion region;
    int committed_tap;
};

// Emits pulse_count pulses from the master on the configured cadence,
// walks each through the chain and the loopback route, samples the return
// with the master clock, and checks intervals between the captured edges.
// Captured edges are deduplicated (two pulses resolving onto one edge
// register once), so received_count can fall below pulse_count.
ProbeRecord run_probe_burst(const Topology& topo, const ClockDomain& clock,
                            const DelayChain& chain, const MetastabilityModel& model,
                            const ProbeConfig& config, RngHandle& rng);

// One probe burst at every tap, from 0 upward, recording which settings
// produce interval errors. Each tap draws from its own child stream, so
// the per-tap results do not depend on scan order. The chain argument
// supplies step size and cap; its entry tap is ignored.
TapScan scan_all_taps(const Topology& topo, const ClockDomain& clock,
                      const DelayChain& chain, const MetastabilityModel& model,
                      const ProbeConfig& config, RngHandle& rng);

// Longest run of unflagged taps; ties resolve to the lowest start. mid is
// the floor midpoint. Throws CalibrationError when every tap is flagged.
StableRegion find_stable_region(const TapScan& scan);

// Full automatic sequence: scan every tap, pick the stable region, park
// the chain on its midpoint. The chain is left at the committed tap.
CalibrationResult run_self_adaptation(const Topology& topo, const ClockDomain& clock,
                                      DelayChain& chain, const MetastabilityModel& model,
                                      const ProbeConfig& config, RngHandle& rng);

// True when consecutive edges all sit exactly `expected` apart. Needs at
// least two edges. This is the steady-state jitter monitor: any deviation
// from the programmed cadence flags the run.
bool monitor_intervals(Duration expected, std::span<const TimeStamp> edges);

} // namespace trigsim
