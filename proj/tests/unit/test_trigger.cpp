#include <doctest.h>

#include <cstdlib>
#include <set>

#include "trigsim/scenario.hpp"
#include "trigsim/trigger.hpp"

using namespace trigsim;

TEST_CASE("trigger config validation") {
    TriggerConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("block overlap is strict") {
        cfg.level1_interval = 500_ns;
        cfg.level1_count = 3;
        cfg.level2_interval = 1_us; // span 1 us == interval: too tight
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.level2_interval = microseconds(1) + femtoseconds(1);
        CHECK_NOTHROW(cfg.validate());
    }

    SUBCASE("degenerate values") {
        cfg.level1_count = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.level1_count = 2;
        cfg.level1_interval = Duration(0);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.level1_interval = 500_ns;
        cfg.pulse_width = Duration(0);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.pulse_width = 20_ns;
        cfg.output_delay = femtoseconds(-1);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("schedule layout and roles") {
    TriggerConfig cfg;
    cfg.output_delay = 100_ns;
    cfg.level1_interval = 500_ns;
    cfg.level1_count = 2;
    cfg.level2_interval = 5_us;
    cfg.level2_count = 2;

    const auto schedule = generate_schedule(cfg);
    REQUIRE(schedule.size() == 4);
    CHECK(schedule[0].emit_time.count() == 100'000'000);
    CHECK(schedule[1].emit_time.count() == 600'000'000);
    CHECK(schedule[2].emit_time.count() == 5'100'000'000);
    CHECK(schedule[3].emit_time.count() == 5'600'000'000);
    CHECK(schedule[0].role == TriggerRole::measure);
    CHECK(schedule[1].role == TriggerRole::conditional_reset);
    CHECK(schedule[2].role == TriggerRole::measure);
    CHECK(schedule[3].role == TriggerRole::conditional_reset);
    for (std::size_t i = 0; i < schedule.size(); ++i)
        CHECK(schedule[i].index == i);

    cfg.level1_count = 3;
    const auto triple = generate_schedule(cfg);
    CHECK(triple[0].role == TriggerRole::measure);
    CHECK(triple[1].role == TriggerRole::conditional_reset);
    CHECK(triple[2].role == TriggerRole::measure);

    cfg.level1_count = 1;
    for (const auto& p : generate_schedule(cfg))
        CHECK(p.role == TriggerRole::measure);
}

TEST_CASE("schedules are time ordered for random valid configs") {
    RngHandle rng(88);
    for (int round = 0; round < 300; ++round) {
        TriggerConfig cfg;
        cfg.output_delay = femtoseconds(rng.uniform_in(0, 1'000'000));
        cfg.level1_count = static_cast<std::uint32_t>(rng.uniform_in(1, 6));
        cfg.level1_interval = femtoseconds(rng.uniform_in(1, 100'000));
        cfg.level2_count = static_cast<std::uint32_t>(rng.uniform_in(1, 6));
        cfg.level2_interval =
            femtoseconds(cfg.level1_interval.count() * (cfg.level1_count - 1) +
                         rng.uniform_in(1, 100'000));
        const auto schedule = generate_schedule(cfg);
        REQUIRE(schedule.size() ==
                static_cast<std::size_t>(cfg.level1_count) * cfg.level2_count);
        for (std::size_t i = 1; i < schedule.size(); ++i)
            REQUIRE(schedule[i - 1].emit_time < schedule[i].emit_time);
    }
}

TEST_CASE("reset budget check") {
    TriggerConfig cfg;
    cfg.pulse_width = 20_ns;
    cfg.level1_interval = 490_ns;
    cfg.level1_count = 3;
    cfg.level2_interval = 100_us;

    // Span 980 ns + 20 ns = exactly 1 us: inside the budget.
    BudgetCheck check = validate_reset_budget(cfg);
    CHECK(check.within_budget);
    CHECK(check.block_span.count() == 1'000'000'000);

    cfg.pulse_width = nanoseconds(20) + femtoseconds(1);
    check = validate_reset_budget(cfg);
    CHECK_FALSE(check.within_budget);

    cfg.level1_count = 1; // span collapses to the pulse width
    check = validate_reset_budget(cfg);
    CHECK(check.within_budget);
    CHECK(check.block_span == cfg.pulse_width);
}

namespace {

Scenario small_run_scenario(std::uint32_t n_slaves, Duration link_delay) {
    Scenario s;
    s.topology.n_slaves = n_slaves;
    s.topology.trigger_link_delay = link_delay;
    s.trigger.level2_count = 100;
    s.probe.pulse_count = 500;
    return s;
}

} // namespace

TEST_CASE("calibrated symmetric rack outputs are identical") {
    const Scenario s = small_run_scenario(4, 1_ns);
    const RunOutcome outcome = run_scenario(s);
    REQUIRE(outcome.report.awgs.size() == 4);
    REQUIRE(outcome.calibration.has_value());
    CHECK(outcome.run_tap == 225);

    const std::size_t pulses = outcome.report.schedule.size();
    REQUIRE(pulses == 200);
    for (const auto& awg : outcome.report.awgs) {
        REQUIRE(awg.outputs.size() == pulses);
        CHECK(awg.metastable_events == 0);
        CHECK_FALSE(awg.jitter_flag);
        for (std::size_t k = 0; k < pulses; ++k)
            REQUIRE(awg.outputs[k].output_time ==
                    outcome.report.awgs[0].outputs[k].output_time);
    }

    const SkewSummary skew = measure_skew(outcome.report);
    CHECK(skew.max_skew.count() == 0);

    // Role bookkeeping: measure pulses carry no pi record, resets do.
    for (const auto& awg : outcome.report.awgs)
        for (std::size_t k = 0; k < pulses; ++k) {
            const bool is_measure =
                outcome.report.schedule[k].role == TriggerRole::measure;
            REQUIRE(awg.outputs[k].emitted_pi.has_value() == !is_measure);
        }
}

TEST_CASE("qubit model drives conditional resets") {
    Scenario s = small_run_scenario(1, 1_ns);
    s.trigger.level2_count = 2'000;

    SUBCASE("never excited, never corrected") {
        s.qubit.excited_probability = 0.0;
        const RunOutcome outcome = run_scenario(s);
        for (const auto& out : outcome.report.awgs[0].outputs)
            if (out.emitted_pi) REQUIRE_FALSE(*out.emitted_pi);
    }

    SUBCASE("always excited, always corrected") {
        s.qubit.excited_probability = 1.0;
        const RunOutcome outcome = run_scenario(s);
        for (const auto& out : outcome.report.awgs[0].outputs)
            if (out.emitted_pi) REQUIRE(*out.emitted_pi);
    }

    SUBCASE("correction rate tracks the excited probability") {
        s.qubit.excited_probability = 0.3;
        const RunOutcome outcome = run_scenario(s);
        int fired = 0, resets = 0;
        for (const auto& out : outcome.report.awgs[0].outputs)
            if (out.emitted_pi) {
                ++resets;
                fired += *out.emitted_pi ? 1 : 0;
            }
        REQUIRE(resets == 2'000);
        CHECK(std::abs(fired - 600) < 100); // ~5 sigma for p=0.3, n=2000
    }
}

TEST_CASE("edge-aligned uncalibrated run shows the one-period dichotomy") {
    Scenario s = small_run_scenario(2, 2_ns); // round path 4 ns: on the edge
    s.trigger.level2_count = 5'000;
    const RunOutcome outcome = run_scenario(s, true);
    REQUIRE_FALSE(outcome.calibration.has_value());
    CHECK(outcome.run_tap == 0);

    const auto& a = outcome.report.awgs[0].outputs;
    const auto& b = outcome.report.awgs[1].outputs;
    REQUIRE(a.size() == 10'000);
    bool saw_zero = false, saw_period = false;
    int bad = 0, not_meta = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const std::int64_t diff =
            std::llabs((a[k].output_time - b[k].output_time).count());
        if (diff == 0) saw_zero = true;
        else if (diff == 4'000'000) saw_period = true;
        else ++bad;
        not_meta += a[k].was_metastable && b[k].was_metastable ? 0 : 1;
    }
    CHECK(saw_zero);
    CHECK(saw_period);
    CHECK(bad == 0);
    CHECK(not_meta == 0);
    CHECK(outcome.report.awgs[0].metastable_events == 10'000);
}

TEST_CASE("runs are deterministic per seed") {
    const Scenario s = [] {
        Scenario base = small_run_scenario(3, 1_ns);
        base.topology.trigger_link_jitter = JitterSpec::uniform(picoseconds(800));
        base.output_jitter = JitterSpec::gaussian(picoseconds(5), picoseconds(25));
        return base;
    }();

    const RunOutcome first = run_scenario(s);
    const RunOutcome second = run_scenario(s);
    REQUIRE(first.report.awgs.size() == second.report.awgs.size());
    for (std::size_t i = 0; i < first.report.awgs.size(); ++i) {
        const auto& fa = first.report.awgs[i];
        const auto& sa = second.report.awgs[i];
        REQUIRE(fa.metastable_events == sa.metastable_events);
        REQUIRE(fa.jitter_flag == sa.jitter_flag);
        REQUIRE(fa.outputs.size() == sa.outputs.size());
        for (std::size_t k = 0; k < fa.outputs.size(); ++k) {
            REQUIRE(fa.outputs[k].output_time == sa.outputs[k].output_time);
            REQUIRE(fa.outputs[k].emitted_pi == sa.outputs[k].emitted_pi);
        }
    }

    Scenario other = s;
    other.seed = 9'999;
    const RunOutcome third = run_scenario(other);
    bool any_difference = false;
    for (std::size_t k = 0; k < first.report.awgs[0].outputs.size(); ++k)
        any_difference |= first.report.awgs[0].outputs[k].output_time !=
                          third.report.awgs[0].outputs[k].output_time;
    CHECK(any_difference);
}

TEST_CASE("heavy link jitter raises the jitter flag") {
    Scenario s = small_run_scenario(2, 1_ns);
    s.trigger.level2_count = 2'000;
    // Lead larger than the total jitter bound keeps arrivals positive.
    s.trigger.output_delay = 100_ns;
    // Half-width larger than the distance to the nearest window: captured
    // edges wander across cycles, so the cadence check must trip.
    s.topology.trigger_link_jitter = JitterSpec::uniform(nanoseconds(3));
    const RunOutcome outcome = run_scenario(s, true);
    bool any_flag = false;
    for (const auto& awg : outcome.report.awgs) any_flag |= awg.jitter_flag;
    CHECK(any_flag);
}

TEST_CASE("off-grid schedule cadence cannot be reproduced") {
    // Path of 0.5 ns: pulse phases sit at 0.5 and 2.5 ns, far from any
    // edge, yet the captured gap (4 ns) can never equal the quantized
    // 6 ns cadence (8 ns). Monitoring must flag without any hazard.
    Scenario s = small_run_scenario(1, femtoseconds(250'000));
    s.trigger.level1_interval = 6_ns; // not a multiple of the 4 ns period
    s.trigger.level1_count = 2;
    s.trigger.level2_interval = 80_ns;
    s.trigger.level2_count = 50;
    const RunOutcome outcome = run_scenario(s, true);
    CHECK(outcome.report.awgs[0].jitter_flag);
    CHECK(outcome.report.awgs[0].metastable_events == 0);
}

TEST_CASE("three-pulse run matches hand enumeration") {
    Scenario s;
    s.topology.n_slaves = 2;
    s.topology.trigger_link_delay = 1_ns;
    s.model.window_width = Duration(0);
    s.trigger.output_delay = 100_ns;
    s.trigger.level1_count = 1;
    s.trigger.level2_interval = 800_ns;
    s.trigger.level2_count = 3;
    s.qubit.excited_probability = 0.0;

    const RunOutcome outcome = run_scenario(s, true);
    // Emissions at 100/900/1700 ns, +2 ns of path, captured at the next
    // 4 ns grid point: 104, 904, 1704 ns.
    const std::int64_t expected[3] = {104'000'000, 904'000'000, 1'704'000'000};
    REQUIRE(outcome.report.schedule.size() == 3);
    for (const auto& awg : outcome.report.awgs) {
        REQUIRE(awg.outputs.size() == 3);
        CHECK(awg.metastable_events == 0);
        CHECK_FALSE(awg.jitter_flag);
        for (int k = 0; k < 3; ++k) {
            CHECK(awg.outputs[k].output_time.count() == expected[k]);
            CHECK_FALSE(awg.outputs[k].was_metastable);
            CHECK_FALSE(awg.outputs[k].emitted_pi.has_value());
        }
    }
}

TEST_CASE("skew measurement") {
    SUBCASE("needs two awgs") {
        RunReport report;
        report.awgs.push_back({});
        CHECK_THROWS_AS(measure_skew(report), DataError);
    }

    SUBCASE("hand-built spread") {
        RunReport report;
        report.schedule = {{0, TimeStamp(0), TriggerRole::measure},
                           {1, TimeStamp(100), TriggerRole::measure}};
        AwgRunRecord a{3, {}, 0, false};
        a.outputs = {{0, TimeStamp(1'000), std::nullopt, false},
                     {1, TimeStamp(2'000), std::nullopt, false}};
        AwgRunRecord b{4, {}, 0, false};
        b.outputs = {{0, TimeStamp(1'250), std::nullopt, false},
                     {1, TimeStamp(1'990), std::nullopt, false}};
        report.awgs = {a, b};

        const SkewSummary skew = measure_skew(report);
        REQUIRE(skew.per_pulse.size() == 2);
        CHECK(skew.per_pulse[0].count() == 250);
        CHECK(skew.per_pulse[1].count() == 10);
        CHECK(skew.max_skew.count() == 250);
        CHECK(skew_percentile(skew, 0.5).count() == 10);
        CHECK(skew_percentile(skew, 1.0).count() == 250);
    }

    SUBCASE("percentile ranks") {
        SkewSummary s;
        for (int i = 1; i <= 100; ++i) s.per_pulse.push_back(femtoseconds(i));
        s.max_skew = femtoseconds(100);
        CHECK(skew_percentile(s, 0.50).count() == 50);
        CHECK(skew_percentile(s, 0.90).count() == 90);
        CHECK(skew_percentile(s, 0.99).count() == 99);
        CHECK(skew_percentile(s, 1.00).count() == 100);
        CHECK_THROWS_AS(skew_percentile(s, 0.0), ConfigError);
        CHECK_THROWS_AS(skew_percentile(s, 1.5), ConfigError);
        CHECK_THROWS_AS(skew_percentile(SkewSummary{}, 0.5), DataError);
    }
}

TEST_CASE("interval monitor agrees with a recount of the report") {
    // Uncalibrated at tap 0 the arrival phase sits dead center, 2 ns from
    // either edge. 1.5 ns of jitter per hop crosses edges on a share of
    // the pulses; 100 ps never does. The two runs exercise both flag
    // polarities against an independent recount. Schedule gaps here are
    // whole periods, so the raw gap doubles as the expected cadence, and
    // analog output jitter is off, so output_time is the captured edge.
    auto recount_matches = [](const RunOutcome& outcome) {
        const auto& schedule = outcome.report.schedule;
        for (const auto& awg : outcome.report.awgs) {
            bool mismatch = false;
            for (std::size_t k = 1; k < awg.outputs.size(); ++k) {
                const std::int64_t want =
                    (schedule[k].emit_time - schedule[k - 1].emit_time).count();
                const std::int64_t got =
                    (awg.outputs[k].output_time - awg.outputs[k - 1].output_time)
                        .count();
                if (got != want) mismatch = true;
            }
            REQUIRE(awg.jitter_flag == mismatch);
        }
    };

    Scenario s = small_run_scenario(2, 1_ns);
    s.trigger.level2_count = 500;
    s.trigger.output_delay = 100_ns; // keeps jittered arrivals positive

    SUBCASE("crossing jitter raises flags") {
        s.topology.trigger_link_jitter = JitterSpec::uniform(picoseconds(1'500));
        const RunOutcome outcome = run_scenario(s, true);
        recount_matches(outcome);
        bool any_flag = false;
        for (const auto& awg : outcome.report.awgs) any_flag |= awg.jitter_flag;
        CHECK(any_flag);
    }

    SUBCASE("bounded jitter stays clean") {
        s.topology.trigger_link_jitter = JitterSpec::uniform(picoseconds(100));
        const RunOutcome outcome = run_scenario(s, true);
        recount_matches(outcome);
        for (const auto& awg : outcome.report.awgs) CHECK_FALSE(awg.jitter_flag);
    }
}
