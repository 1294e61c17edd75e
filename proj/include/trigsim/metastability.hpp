#pragma once

#include <cstdint>
#include <optional>

#include "trigsim/rng.hpp"
#include "trigsim/time.hpp"

namespace trigsim {

// How capture probability behaves inside the metastability window.
enum class MetastabilityProfile : std::uint8_t {
    // Every arrival inside the window is a metastable event.
    hard_window,
    // Event probability falls linearly from 1 at the sampling edge to 0 at
    // the window boundary.
    linear_ramp,
};

// Setup/hold hazard model for a flip-flop sampling an asynchronous trigger.
// The window is the open interval of width window_width centered on each
// clock edge; arrivals outside it capture deterministically. window_width
// of 0 disables the hazard entirely.
struct MetastabilityModel {
    Duration window_width = picoseconds(90);
    double resolve_probability = 0.5; // chance the late edge wins an event
    MetastabilityProfile profile = MetastabilityProfile::hard_window;

    void validate() const {
        if (window_width.count() < 0)
            throw ConfigError("metastability window must be >= 0");
        if (resolve_probability < 0.0 || resolve_probability > 1.0)
            throw ConfigError("resolve probability must lie in [0, 1]");
    }
};

struct LatchOutcome {
    TimeStamp captured_edge;
    bool was_metastable;
};

// Samples one asynchronous arrival with the clock. Outside the window the
// captured edge is the next edge at or after the arrival. Inside it, the
// capture resolves randomly to one of the two edges adjacent to the
// arrival's nearest edge position: the later with probability
// resolve_probability, else the earlier. The two candidates always differ
// by exactly one clock period.
//
// Draw order per call is fixed: the ramp acceptance draw (linear_ramp
// only, and only inside the window), then the resolve draw.
LatchOutcome latch_trigger(TimeStamp arrival, const ClockDomain& clock,
                           const MetastabilityModel& model, RngHandle& rng);

// Programmable delay line: four cascaded elements stepped together, 512
// taps each. Total delay is elements * taps * tap_step, optionally capped
// per element to model lines whose datasheet range is shorter than
// taps * tap_step.
class DelayChain {
public:
    static constexpr int kElements = 4;
    static constexpr int kTapsPerElement = 512;

    explicit DelayChain(Duration tap_step = femtoseconds(4444),
                        std::optional<Duration> per_element_max = std::nullopt);

    int current_tap() const { return tap_; }
    Duration tap_step() const { return tap_step_; }
    std::optional<Duration> per_element_max() const { return per_element_max_; }

    // Delay contributed by one element at the current tap.
    Duration element_delay() const;
    // Delay of the whole chain. One tap increment moves this by
    // kElements * tap_step while below any cap.
    Duration total_delay() const;

    void set_tap(int tap);
    // Advances one tap. Throws ConfigError at the last tap; calibration
    // never walks past the end silently.
    void increment();
    void reset() { tap_ = 0; }

private:
    Duration tap_step_;
    std::optional<Duration> per_element_max_;
    int tap_ = 0;
};

} // namespace trigsim
