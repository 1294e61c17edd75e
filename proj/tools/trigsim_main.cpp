// trigsim: deterministic simulator for self-adaptive trigger distribution
// across an AWG rack. Same scenario file and seed produce byte-identical
// CSV outputs on every platform.
//
// Exit codes: 0 success, 1 usage or scenario error, 2 calibration found no
// stable region, 3 internal failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trigsim/reports.hpp"
#include "trigsim/scenario.hpp"

namespace fs = std::filesystem;

namespace {

fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TRIGSIM_OUTPUT_DIR"); env && *env)
        return env;
    return ".";
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw trigsim::ConfigError("cannot write " + path.string());
    return out;
}

int cmd_calibrate(const std::string& scenario_path, const std::string& out_flag) {
    const trigsim::Scenario scenario = trigsim::load_scenario(scenario_path);
    const trigsim::CalibrationOutcome outcome = trigsim::calibrate_scenario(scenario);

    const fs::path dir = resolve_out_dir(out_flag);
    fs::create_directories(dir);
    const fs::path csv = dir / "taps.csv";
    {
        auto out = open_csv(csv);
        write_tap_scan_csv(out, outcome.result.scan, build_chain(scenario),
                           scenario.probe.pulse_count);
    }

    int flagged = 0;
    for (const bool f : outcome.result.scan.error_flags) flagged += f ? 1 : 0;
    std::cout << "committed_tap=" << outcome.result.committed_tap << '\n'
              << "stable_region_start=" << outcome.result.region.start << '\n'
              << "stable_region_end=" << outcome.result.region.end << '\n'
              << "flagged_taps=" << flagged << '\n'
              << "completion_flag=" << (outcome.master.completion_flag ? 1 : 0) << '\n'
              << "taps_csv=" << csv.string() << '\n';
    return 0;
}

int cmd_run(const std::string& scenario_path, bool uncalibrated,
            const std::string& out_flag) {
    const trigsim::Scenario scenario = trigsim::load_scenario(scenario_path);
    const trigsim::RunOutcome outcome = trigsim::run_scenario(scenario, uncalibrated);

    const fs::path dir = resolve_out_dir(out_flag);
    fs::create_directories(dir);
    const fs::path report_csv = dir / "run_report.csv";
    {
        auto out = open_csv(report_csv);
        write_run_report_csv(out, outcome.report);
    }

    std::uint64_t metastable = 0;
    int jitter_flags = 0;
    for (const auto& awg : outcome.report.awgs) {
        metastable += awg.metastable_events;
        jitter_flags += awg.jitter_flag ? 1 : 0;
    }
    std::cout << "pulses=" << outcome.report.schedule.size() << '\n'
              << "awgs=" << outcome.report.awgs.size() << '\n'
              << "run_tap=" << outcome.run_tap << '\n'
              << "calibrated=" << (outcome.calibration ? 1 : 0) << '\n'
              << "metastable_events=" << metastable << '\n'
              << "jitter_flags=" << jitter_flags << '\n';

    if (outcome.report.awgs.size() >= 2) {
        const trigsim::SkewSummary skew = trigsim::measure_skew(outcome.report);
        const fs::path skew_csv = dir / "skew_summary.csv";
        {
            auto out = open_csv(skew_csv);
            write_skew_summary_csv(out, skew);
        }
        std::cout << "skew_p50_fs=" << skew_percentile(skew, 0.50).count() << '\n'
                  << "skew_p99_fs=" << skew_percentile(skew, 0.99).count() << '\n'
                  << "skew_max_fs=" << skew.max_skew.count() << '\n'
                  << "skew_summary_csv=" << skew_csv.string() << '\n';
    } else {
        std::cout << "skew=insufficient-data (need at least 2 AWGs)\n";
    }
    std::cout << "run_report_csv=" << report_csv.string() << '\n';
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& out_flag) {
    const trigsim::Scenario scenario = trigsim::load_scenario(scenario_path);
    const trigsim::TapScan scan = trigsim::sweep_scenario(scenario);

    const fs::path dir = resolve_out_dir(out_flag);
    fs::create_directories(dir);
    const fs::path csv = dir / "taps.csv";
    {
        auto out = open_csv(csv);
        write_tap_scan_csv(out, scan, build_chain(scenario),
                           scenario.probe.pulse_count);
    }

    const auto clusters = trigsim::flagged_clusters(scan);
    std::cout << "cluster_count=" << clusters.size() << '\n';
    char buf[64];
    for (const auto& c : clusters) {
        std::snprintf(buf, sizeof buf, "cluster=%d..%d width=%d center=%.1f",
                      c.first, c.last, c.width(), c.center());
        std::cout << buf << '\n';
    }
    if (!clusters.empty()) {
        double width_sum = 0;
        for (const auto& c : clusters) width_sum += c.width();
        std::snprintf(buf, sizeof buf, "width_mean=%.3f",
                      width_sum / static_cast<double>(clusters.size()));
        std::cout << buf << '\n';
    }
    if (clusters.size() >= 2) {
        double spacing_sum = 0;
        for (std::size_t i = 1; i < clusters.size(); ++i)
            spacing_sum += clusters[i].center() - clusters[i - 1].center();
        std::snprintf(buf, sizeof buf, "center_spacing_mean=%.3f",
                      spacing_sum / static_cast<double>(clusters.size() - 1));
        std::cout << buf << '\n';
    }
    std::cout << "taps_csv=" << csv.string() << '\n';
    return 0;
}

int cmd_topology(std::uint32_t fanout, std::uint32_t levels, std::int64_t qubits) {
    std::cout << "fanout_width=" << fanout << '\n'
              << "levels=" << levels << '\n'
              << "max_awgs=" << trigsim::max_supported_awgs(fanout, levels) << '\n';
    if (qubits >= 0) {
        const auto res =
            trigsim::resources_for_qubits(static_cast<std::uint64_t>(qubits));
        std::cout << "qubits=" << qubits << '\n'
                  << "awg_channels=" << res.awg_channels << '\n'
                  << "adc_units=" << res.adc_units << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic trigger-distribution rack simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    bool uncalibrated = false;
    std::uint32_t fanout = 28, levels = 1;
    std::int64_t qubits = -1;

    auto* cal = app.add_subcommand(
        "calibrate", "run the self-adaptation sequence, write taps.csv");
    cal->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cal->add_option("--out", out_dir,
                    "output directory (default: $TRIGSIM_OUTPUT_DIR or .)");

    auto* run = app.add_subcommand(
        "run", "calibrate then play the trigger schedule, write run_report.csv");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_flag("--uncalibrated", uncalibrated,
                  "skip calibration and run at the scenario's initial tap");
    run->add_option("--out", out_dir,
                    "output directory (default: $TRIGSIM_OUTPUT_DIR or .)");

    auto* sweep = app.add_subcommand(
        "sweep", "scan all taps without committing, write taps.csv");
    sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sweep->add_option("--out", out_dir,
                      "output directory (default: $TRIGSIM_OUTPUT_DIR or .)");

    auto* topo = app.add_subcommand(
        "topology", "print fanout capacity and per-qubit resource counts");
    topo->add_option("--fanout", fanout, "fanout outputs per unit")
        ->default_val(28);
    topo->add_option("--levels", levels, "cascade stages after the first unit")
        ->default_val(1);
    topo->add_option("--qubits", qubits, "also print resources for this many qubits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*cal) return cmd_calibrate(scenario_path, out_dir);
        if (*run) return cmd_run(scenario_path, uncalibrated, out_dir);
        if (*sweep) return cmd_sweep(scenario_path, out_dir);
        return cmd_topology(fanout, levels, qubits);
    } catch (const trigsim::CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return 2;
    } catch (const trigsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const trigsim::TopologyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
