#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trigsim/calibration.hpp"
#include "trigsim/protocol.hpp"
#include "trigsim/topology.hpp"
#include "trigsim/trigger.hpp"

namespace trigsim {

struct TopologySettings {
    std::uint32_t n_slaves = 10;
    std::uint32_t fanout_width = 28;
    Duration trigger_link_delay = nanoseconds(1);
    // When set, overrides the delay of every trigger and return link, in
    // the builder's link order. Size must match that link count exactly.
    std::optional<std::vector<Duration>> per_trigger_link_delays;
    JitterSpec trigger_link_jitter = JitterSpec::none();
    Duration clock_link_delay = Duration(0);
    JitterSpec clock_link_jitter = JitterSpec::none();
};

struct ChainSettings {
    Duration tap_step = femtoseconds(4444);
    int initial_tap = 0;
    std::optional<Duration> per_element_max;
};

// One complete simulation setup. Field defaults form the reference
// scenario: ten slaves behind a 28-way fanout, 250 MHz sampling, 90 ps
// hazard window, 10^4-pulse probe bursts and a 10^4-pulse run.
struct Scenario {
    std::uint64_t seed = 1;
    TopologySettings topology;
    ClockDomain clock;
    MetastabilityModel model;
    ChainSettings chain;
    ProbeConfig probe{.pulse_count = 10'000};
    TriggerConfig trigger{.level2_count = 5'000};
    QubitStateModel qubit;
    JitterSpec output_jitter = JitterSpec::none();
};

// Strict parser: unknown or mistyped keys are errors naming the offending
// key, absent keys take the defaults above. Throws ConfigError.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Builders. build_topology applies the per-link delay override and
// re-validates.
Topology build_topology(const Scenario& scenario);
DelayChain build_chain(const Scenario& scenario);

// Scenario-level root streams. Calibration and runs never share draws, so
// a calibrate-then-run sees the same burst results as a bare calibrate.
inline constexpr std::uint64_t kCalibrationStream = 1;
inline constexpr std::uint64_t kRunStream = 2;

struct CalibrationOutcome {
    CalibrationResult result;
    DeviceStatus master; // calibrated idle, completion_flag set
};

// Drives the full master sequence: start_self_adapt, tap scan, commit,
// completion. Throws CalibrationError when no stable region exists.
CalibrationOutcome calibrate_scenario(const Scenario& scenario);

struct RunOutcome {
    std::optional<CalibrationResult> calibration; // absent for uncalibrated
    int run_tap;                                  // chain tap the run used
    RunReport report;
};

// Calibrates (unless uncalibrated is set, which runs at the scenario's
// initial tap), arms every device over the wire format, and plays the
// trigger schedule. Slave statuses pick up jitter flags from the run.
RunOutcome run_scenario(const Scenario& scenario, bool uncalibrated = false);

// Tap scan without committing anything.
TapScan sweep_scenario(const Scenario& scenario);

} // namespace trigsim
