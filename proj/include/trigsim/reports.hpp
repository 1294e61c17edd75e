#pragma once

#include <iosfwd>

#include "trigsim/calibration.hpp"
#include "trigsim/trigger.hpp"

namespace trigsim {

// CSV writers. Output is byte-stable for a given input: fixed headers,
// fixed row order, LF line endings, fixed numeric formatting. Open file
// streams in binary mode so platform newline translation cannot creep in.

// tap,total_delay_fs,error_count,error_flag,metastable_probability
// One row per tap. metastable_probability is the fraction of measured
// intervals that were wrong, against interval_count = pulse_count - 1.
void write_tap_scan_csv(std::ostream& out, const TapScan& scan,
                        const DelayChain& chain, std::uint32_t pulse_count);

// pulse_index,awg_id,output_time_fs,role,emitted_pi,metastable
// Pulse-major order, AWGs ascending inside a pulse. emitted_pi is empty
// for measure pulses.
void write_run_report_csv(std::ostream& out, const RunReport& report);

// statistic,value_fs rows: pulses, p50, p90, p99, max.
void write_skew_summary_csv(std::ostream& out, const SkewSummary& summary);

} // namespace trigsim
