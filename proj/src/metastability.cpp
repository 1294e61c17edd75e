#include "trigsim/metastability.hpp"

#include <limits>

namespace trigsim {

LatchOutcome latch_trigger(TimeStamp arrival, const ClockDomain& clock,
                           const MetastabilityModel& model, RngHandle& rng) {
    const std::int64_t period = clock.period.count();
    const TimeStamp e_next = next_edge_at_or_after(clock, arrival);
    const std::int64_t d_next = (e_next - arrival).count(); // in [0, period)

    // Distance back to the previous edge, when one exists (edge index >= 0).
    const bool has_prev = e_next.count() - period >= clock.phase.count();
    const std::int64_t d_prev = has_prev ? period - d_next
                                         : std::numeric_limits<std::int64_t>::max();

    std::int64_t dist;
    TimeStamp nearest;
    if (d_next <= d_prev) {
        dist = d_next;
        nearest = e_next;
    } else {
        dist = d_prev;
        nearest = TimeStamp(e_next.count() - period);
    }

    // Open-interval window test: 2*dist < width. A zero-width window never
    // fires, and an arrival exactly on the boundary is deterministic.
    const std::int64_t width = model.window_width.count();
    bool event = 2 * dist < width;
    if (event && model.profile == MetastabilityProfile::linear_ramp) {
        const double p = static_cast<double>(width - 2 * dist) / static_cast<double>(width);
        event = rng.unit_double() < p;
    }
    if (!event) return {e_next, false};

    // The capture races between the nearest edge and the one after it.
    const bool late = rng.unit_double() < model.resolve_probability;
    const TimeStamp captured = late ? nearest + clock.period : nearest;
    return {captured, true};
}

DelayChain::DelayChain(Duration tap_step, std::optional<Duration> per_element_max)
    : tap_step_(tap_step), per_element_max_(per_element_max) {
    if (tap_step.count() <= 0) throw ConfigError("tap step must be positive");
    if (per_element_max && per_element_max->count() < 0)
        throw ConfigError("per-element delay cap must be >= 0");
}

Duration DelayChain::element_delay() const {
    Duration d = tap_step_ * tap_;
    if (per_element_max_ && d > *per_element_max_) d = *per_element_max_;
    return d;
}

Duration DelayChain::total_delay() const {
    return element_delay() * kElements;
}

void DelayChain::set_tap(int tap) {
    if (tap < 0 || tap >= kTapsPerElement)
        throw ConfigError("tap index out of range");
    tap_ = tap;
}

void DelayChain::increment() {
    if (tap_ + 1 >= kTapsPerElement)
        throw ConfigError("delay chain is at its last tap");
    ++tap_;
}

} // namespace trigsim
