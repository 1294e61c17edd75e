#include "trigsim/reports.hpp"

#include <cstdio>
#include <ostream>

namespace trigsim {

void write_tap_scan_csv(std::ostream& out, const TapScan& scan,
                        const DelayChain& chain, std::uint32_t pulse_count) {
    if (pulse_count < 2) throw DataError("tap scan CSV needs pulse_count >= 2");
    out << "tap,total_delay_fs,error_count,error_flag,metastable_probability\n";
    DelayChain c(chain.tap_step(), chain.per_element_max());
    const auto intervals = static_cast<double>(pulse_count - 1);
    char prob[32];
    for (int tap = 0; tap < DelayChain::kTapsPerElement; ++tap) {
        c.set_tap(tap);
        std::snprintf(prob, sizeof prob, "%.6f",
                      static_cast<double>(scan.error_counts[tap]) / intervals);
        out << tap << ',' << c.total_delay().count() << ','
            << scan.error_counts[tap] << ',' << (scan.error_flags[tap] ? 1 : 0)
            << ',' << prob << '\n';
    }
}

void write_run_report_csv(std::ostream& out, const RunReport& report) {
    out << "pulse_index,awg_id,output_time_fs,role,emitted_pi,metastable\n";
    for (std::size_t k = 0; k < report.schedule.size(); ++k) {
        const char* role = report.schedule[k].role == TriggerRole::measure
                               ? "measure"
                               : "conditional_reset";
        for (const AwgRunRecord& awg : report.awgs) {
            const PulseOutput& p = awg.outputs[k];
            out << p.pulse_index << ',' << awg.awg << ','
                << p.output_time.count() << ',' << role << ',';
            if (p.emitted_pi) out << (*p.emitted_pi ? 1 : 0);
            out << ',' << (p.was_metastable ? 1 : 0) << '\n';
        }
    }
}

void write_skew_summary_csv(std::ostream& out, const SkewSummary& summary) {
    out << "statistic,value_fs\n";
    out << "pulses," << summary.per_pulse.size() << '\n';
    out << "p50," << skew_percentile(summary, 0.50).count() << '\n';
    out << "p90," << skew_percentile(summary, 0.90).count() << '\n';
    out << "p99," << skew_percentile(summary, 0.99).count() << '\n';
    out << "max," << summary.max_skew.count() << '\n';
}

} // namespace trigsim
