#include "trigsim/trigger.hpp"

#include <algorithm>
#include <cmath>

namespace trigsim {

namespace {
constexpr Duration kResetBudget = microseconds(1);
} // namespace

void TriggerConfig::validate() const {
    if (output_delay.count() < 0)
        throw ConfigError("output delay must be >= 0");
    if (pulse_width.count() <= 0)
        throw ConfigError("pulse width must be positive");
    if (level1_count == 0 || level2_count == 0)
        throw ConfigError("pulse counts must be >= 1");
    if (level1_count > 1 && level1_interval.count() <= 0)
        throw ConfigError("level-1 interval must be positive");
    if (level2_interval.count() <= 0)
        throw ConfigError("level-2 interval must be positive");
    // Strict: a block must finish its emissions before the next one starts.
    if (level1_interval.count() * (static_cast<std::int64_t>(level1_count) - 1) >=
        level2_interval.count())
        throw ConfigError("level-1 block overlaps the next level-2 repetition");
}

std::vector<ScheduledPulse> generate_schedule(const TriggerConfig& config) {
    config.validate();
    std::vector<ScheduledPulse> schedule;
    schedule.reserve(static_cast<std::size_t>(config.level1_count) * config.level2_count);
    std::uint64_t index = 0;
    for (std::uint32_t j = 0; j < config.level2_count; ++j) {
        const TimeStamp block_start =
            TimeStamp(0) + config.output_delay + config.level2_interval * j;
        for (std::uint32_t i = 0; i < config.level1_count; ++i) {
            schedule.push_back({index++,
                                block_start + config.level1_interval * i,
                                i % 2 == 0 ? TriggerRole::measure
                                           : TriggerRole::conditional_reset});
        }
    }
    return schedule;
}

RunReport simulate_run(const Topology& topo, const ClockDomain& clock,
                       const DelayChain& chain, const MetastabilityModel& model,
                       const TriggerConfig& config, const QubitStateModel& qubits,
                       const JitterSpec& output_jitter, RngHandle& rng) {
    clock.validate();
    model.validate();
    qubits.validate();
    output_jitter.validate();

    RunReport report;
    report.schedule = generate_schedule(config);
    const Duration chain_delay = chain.total_delay();
    const std::int64_t period = clock.period.count();

    // Expected captured-edge cadence: the schedule cadence rounded to whole
    // periods. Off-grid schedule gaps cannot be reproduced by a sampled
    // output and will raise the jitter flag.
    std::vector<Duration> expected_gaps;
    expected_gaps.reserve(report.schedule.size() > 0 ? report.schedule.size() - 1 : 0);
    for (std::size_t k = 1; k < report.schedule.size(); ++k) {
        const std::int64_t gap =
            (report.schedule[k].emit_time - report.schedule[k - 1].emit_time).count();
        expected_gaps.push_back(Duration((gap + period / 2) / period * period));
    }

    const std::vector<NodeId>& slaves = topo.slaves();
    report.awgs.reserve(slaves.size());
    std::vector<TimeStamp> captured;
    for (std::size_t ordinal = 0; ordinal < slaves.size(); ++ordinal) {
        const NodeId slave = slaves[ordinal];
        RngHandle slave_rng = rng.split(ordinal);
        const auto trig_path = topo.trigger_path(slave);

        // The clock tree shifts this AWG's sampling grid by a static
        // offset, drawn once per run.
        const Duration clock_shift =
            propagation_delay(topo, topo.clock_path(slave), slave_rng);
        ClockDomain local = clock;
        const std::int64_t ph =
            (clock.phase.count() + clock_shift.count()) % period;
        local.phase = Duration(ph < 0 ? ph + period : ph);

        AwgRunRecord record;
        record.awg = slave;
        record.outputs.reserve(report.schedule.size());
        captured.clear();
        captured.reserve(report.schedule.size());

        std::optional<bool> last_excited;
        for (const ScheduledPulse& pulse : report.schedule) {
            const TimeStamp arrival = pulse.emit_time + chain_delay +
                                      propagation_delay(topo, trig_path, slave_rng);
            const LatchOutcome outcome = latch_trigger(arrival, local, model, slave_rng);
            const TimeStamp analog =
                outcome.captured_edge + sample_jitter(output_jitter, slave_rng);
            captured.push_back(outcome.captured_edge);
            if (outcome.was_metastable) ++record.metastable_events;

            std::optional<bool> emitted_pi;
            if (pulse.role == TriggerRole::measure) {
                last_excited = slave_rng.unit_double() < qubits.excited_probability;
            } else {
                emitted_pi = last_excited.value_or(false);
            }
            record.outputs.push_back(
                {pulse.index, analog, emitted_pi, outcome.was_metastable});
        }

        for (std::size_t k = 1; k < captured.size(); ++k) {
            if (captured[k] - captured[k - 1] != expected_gaps[k - 1]) {
                record.jitter_flag = true;
                break;
            }
        }
        report.awgs.push_back(std::move(record));
    }
    return report;
}

SkewSummary measure_skew(const RunReport& report) {
    if (report.awgs.size() < 2)
        throw DataError("skew needs outputs from at least 2 AWGs");
    SkewSummary summary{Duration(0), {}};
    const std::size_t pulses = report.schedule.size();
    summary.per_pulse.reserve(pulses);
    for (std::size_t k = 0; k < pulses; ++k) {
        TimeStamp lo = report.awgs[0].outputs[k].output_time;
        TimeStamp hi = lo;
        for (const AwgRunRecord& awg : report.awgs) {
            const TimeStamp t = awg.outputs[k].output_time;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        const Duration skew = hi - lo;
        summary.per_pulse.push_back(skew);
        summary.max_skew = std::max(summary.max_skew, skew);
    }
    return summary;
}

Duration skew_percentile(const SkewSummary& summary, double q) {
    if (q <= 0.0 || q > 1.0) throw ConfigError("percentile must lie in (0, 1]");
    if (summary.per_pulse.empty()) throw DataError("no skew samples");
    std::vector<Duration> sorted = summary.per_pulse;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
}

BudgetCheck validate_reset_budget(const TriggerConfig& config) {
    const Duration span =
        config.level1_interval * (static_cast<std::int64_t>(config.level1_count) - 1) +
        config.pulse_width;
    return {span <= kResetBudget, span};
}

} // namespace trigsim
