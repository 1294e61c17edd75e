#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trigsim/calibration.hpp"
#include "trigsim/metastability.hpp"
#include "trigsim/topology.hpp"

namespace trigsim {

// Alternating duty of consecutive pulses inside a level-1 block: a readout
// strobe, then the conditional feedback strobe acting on its result.
enum class TriggerRole : std::uint8_t { measure, conditional_reset };

// Two-level pulse pattern. Level 1 packs level1_count pulses spaced
// level1_interval apart; level 2 repeats that block level2_count times
// every level2_interval. Blocks must not overlap:
// level1_interval * (level1_count - 1) < level2_interval.
struct TriggerConfig {
    Duration output_delay = Duration(0);
    Duration pulse_width = nanoseconds(20);
    Duration level1_interval = nanoseconds(500);
    std::uint32_t level1_count = 2;
    Duration level2_interval = microseconds(5);
    std::uint32_t level2_count = 1;

    void validate() const;
};

struct ScheduledPulse {
    std::uint64_t index;
    TimeStamp emit_time;
    TriggerRole role;
};

// Emission list in time order:
//   emit(j, i) = output_delay + j * level2_interval + i * level1_interval
// with roles alternating measure, conditional_reset, measure, ... inside
// each block.
std::vector<ScheduledPulse> generate_schedule(const TriggerConfig& config);

// Placeholder qubit: each readout finds it excited with this probability,
// independently per block and per AWG channel.
struct QubitStateModel {
    double excited_probability = 0.5;

    void validate() const {
        if (excited_probability < 0.0 || excited_probability > 1.0)
            throw ConfigError("excited probability must lie in [0, 1]");
    }
};

struct PulseOutput {
    std::uint64_t pulse_index;
    TimeStamp output_time;          // analog emission instant
    std::optional<bool> emitted_pi; // reset pulses: fired a correction or not
    bool was_metastable;
};

struct AwgRunRecord {
    NodeId awg;
    std::vector<PulseOutput> outputs; // one per scheduled pulse, in order
    std::uint64_t metastable_events = 0;
    // Raised when the captured-edge cadence deviated from the schedule.
    bool jitter_flag = false;
};

struct RunReport {
    std::vector<ScheduledPulse> schedule;
    std::vector<AwgRunRecord> awgs; // slaves, ascending node id
};

// Plays one schedule through the rack: every pulse leaves the master,
// passes the committed delay chain and the trigger tree, and is sampled by
// each slave against its own clock (base clock shifted by that slave's
// clock-path delay). Captured edges then get the per-event output jitter
// added to form the analog emission instant. Readout pulses sample the
// qubit model; the following conditional_reset emits a correction pulse
// only if that readout saw the excited state.
//
// Each slave draws from its own split stream; per pulse the order is link
// draws along the path, latch draws, output jitter draw, then the qubit
// draw on measure pulses.
RunReport simulate_run(const Topology& topo, const ClockDomain& clock,
                       const DelayChain& chain, const MetastabilityModel& model,
                       const TriggerConfig& config, const QubitStateModel& qubits,
                       const JitterSpec& output_jitter, RngHandle& rng);

struct SkewSummary {
    Duration max_skew;
    std::vector<Duration> per_pulse; // max-min output spread per pulse index
};

// Spread of analog output instants across AWGs, per pulse. Needs at least
// two AWGs in the report.
SkewSummary measure_skew(const RunReport& report);

// Nearest-rank percentile of the per-pulse skew, q in (0, 1].
Duration skew_percentile(const SkewSummary& summary, double q);

// Feedback deadline check: a level-1 block must complete within the 1 us
// state-decay budget. Span is measured from the first pulse start to the
// last pulse end; exactly 1 us still passes.
struct BudgetCheck {
    bool within_budget;
    Duration block_span;
};

BudgetCheck validate_reset_budget(const TriggerConfig& config);

} // namespace trigsim
