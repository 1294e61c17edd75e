#include "trigsim/calibration.hpp"

#include <algorithm>

namespace trigsim {

ProbeRecord run_probe_burst(const Topology& topo, const ClockDomain& clock,
                            const DelayChain& chain, const MetastabilityModel& model,
                            const ProbeConfig& config, RngHandle& rng) {
    clock.validate();
    model.validate();
    config.validate(clock);

    const auto path = topo.return_path();
    const Duration chain_delay = chain.total_delay();

    std::vector<TimeStamp> edges;
    edges.reserve(config.pulse_count);
    for (std::uint32_t k = 0; k < config.pulse_count; ++k) {
        const TimeStamp emit = TimeStamp(0) + config.interval * k;
        const TimeStamp arrival =
            emit + chain_delay + propagation_delay(topo, path, rng);
        edges.push_back(latch_trigger(arrival, clock, model, rng).captured_edge);
    }

    // Metastable resolutions can reorder or merge captures.
    if (!std::is_sorted(edges.begin(), edges.end()))
        std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    ProbeRecord record;
    record.received_count = static_cast<std::uint32_t>(edges.size());
    record.measured_intervals.reserve(edges.size() > 0 ? edges.size() - 1 : 0);
    for (std::size_t i = 1; i < edges.size(); ++i) {
        const Duration gap = edges[i] - edges[i - 1];
        record.measured_intervals.push_back(gap);
        if (gap != config.interval) ++record.error_count;
    }
    return record;
}

TapScan scan_all_taps(const Topology& topo, const ClockDomain& clock,
                      const DelayChain& chain, const MetastabilityModel& model,
                      const ProbeConfig& config, RngHandle& rng) {
    TapScan scan;
    DelayChain probe_chain(chain.tap_step(), chain.per_element_max());
    for (int tap = 0; tap < DelayChain::kTapsPerElement; ++tap) {
        probe_chain.set_tap(tap);
        RngHandle tap_rng = rng.split(static_cast<std::uint64_t>(tap));
        const ProbeRecord record =
            run_probe_burst(topo, clock, probe_chain, model, config, tap_rng);
        scan.error_counts[tap] = record.error_count;
        scan.error_flags[tap] = record.error_count > 0;
    }
    return scan;
}

std::vector<TapCluster> flagged_clusters(const TapScan& scan) {
    std::vector<TapCluster> clusters;
    int start = -1;
    for (int tap = 0; tap < DelayChain::kTapsPerElement; ++tap) {
        if (scan.error_flags[tap]) {
            if (start < 0) start = tap;
        } else if (start >= 0) {
            clusters.push_back({start, tap - 1});
            start = -1;
        }
    }
    if (start >= 0) clusters.push_back({start, DelayChain::kTapsPerElement - 1});
    return clusters;
}

StableRegion find_stable_region(const TapScan& scan) {
    int best_start = -1, best_len = 0;
    int start = -1;
    for (int tap = 0; tap < DelayChain::kTapsPerElement; ++tap) {
        if (!scan.error_flags[tap]) {
            if (start < 0) start = tap;
            const int len = tap - start + 1;
            if (len > best_len) { // strict: ties keep the earliest run
                best_len = len;
                best_start = start;
            }
        } else {
            start = -1;
        }
    }
    if (best_len == 0)
        throw CalibrationError("every tap shows interval errors; no stable region");
    const int end = best_start + best_len - 1;
    return {best_start, end, best_start + (end - best_start) / 2};
}

CalibrationResult run_self_adaptation(const Topology& topo, const ClockDomain& clock,
                                      DelayChain& chain, const MetastabilityModel& model,
                                      const ProbeConfig& config, RngHandle& rng) {
    CalibrationResult result;
    result.scan = scan_all_taps(topo, clock, chain, model, config, rng);
    result.region = find_stable_region(result.scan);
    result.committed_tap = result.region.mid;
    chain.set_tap(result.committed_tap);
    return result;
}

bool monitor_intervals(Duration expected, std::span<const TimeStamp> edges) {
    if (edges.size() < 2)
        throw DataError("interval monitoring needs at least 2 edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i] - edges[i - 1] != expected) return false;
    return true;
}

} // namespace trigsim
