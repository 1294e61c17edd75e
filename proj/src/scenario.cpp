#include "trigsim/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace trigsim {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known)
            throw ConfigError("scenario: unknown key \"" + key + "\" in " + where);
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("scenario: " + where + " must be an integer");
    return v.get<std::int64_t>();
}

double as_double(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ConfigError("scenario: " + where + " must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string())
        throw ConfigError("scenario: " + where + " must be a string");
    return v.get<std::string>();
}

const json& as_object(const json& v, const std::string& where) {
    if (!v.is_object())
        throw ConfigError("scenario: " + where + " must be an object");
    return v;
}

Duration dur_field(const json& obj, const char* key, Duration fallback,
                   const std::string& where) {
    const json* v = find(obj, key);
    return v ? Duration(as_int(*v, where + "." + key)) : fallback;
}

JitterSpec parse_jitter(const json& v, const std::string& where) {
    const json& obj = as_object(v, where);
    check_keys(obj, where, {"kind", "half_width_fs", "sigma_fs", "clamp_fs"});
    const json* kind = find(obj, "kind");
    if (!kind) throw ConfigError("scenario: " + where + " needs a \"kind\"");
    const std::string k = as_string(*kind, where + ".kind");
    if (k == "none") {
        check_keys(obj, where + " (kind none)", {"kind"});
        return JitterSpec::none();
    }
    if (k == "uniform") {
        check_keys(obj, where + " (kind uniform)", {"kind", "half_width_fs"});
        return JitterSpec::uniform(dur_field(obj, "half_width_fs", Duration(0), where));
    }
    if (k == "gaussian") {
        check_keys(obj, where + " (kind gaussian)", {"kind", "sigma_fs", "clamp_fs"});
        return JitterSpec::gaussian(dur_field(obj, "sigma_fs", Duration(0), where),
                                    dur_field(obj, "clamp_fs", Duration(0), where));
    }
    throw ConfigError("scenario: " + where + ".kind must be none, uniform or gaussian");
}

void parse_topology(const json& v, TopologySettings& out) {
    const json& obj = as_object(v, "topology");
    check_keys(obj, "topology",
               {"n_slaves", "fanout_width", "trigger_link_delay_fs",
                "per_trigger_link_delays_fs", "trigger_link_jitter",
                "clock_link_delay_fs", "clock_link_jitter"});
    if (const json* n = find(obj, "n_slaves")) {
        const std::int64_t val = as_int(*n, "topology.n_slaves");
        if (val < 0) throw ConfigError("scenario: topology.n_slaves must be >= 0");
        out.n_slaves = static_cast<std::uint32_t>(val);
    }
    if (const json* w = find(obj, "fanout_width")) {
        const std::int64_t val = as_int(*w, "topology.fanout_width");
        if (val < 1) throw ConfigError("scenario: topology.fanout_width must be >= 1");
        out.fanout_width = static_cast<std::uint32_t>(val);
    }
    out.trigger_link_delay =
        dur_field(obj, "trigger_link_delay_fs", out.trigger_link_delay, "topology");
    if (const json* list = find(obj, "per_trigger_link_delays_fs")) {
        if (!list->is_array())
            throw ConfigError("scenario: topology.per_trigger_link_delays_fs "
                              "must be an array");
        std::vector<Duration> delays;
        delays.reserve(list->size());
        for (const json& item : *list)
            delays.push_back(Duration(as_int(item, "topology.per_trigger_link_delays_fs[]")));
        out.per_trigger_link_delays = std::move(delays);
    }
    if (const json* jit = find(obj, "trigger_link_jitter"))
        out.trigger_link_jitter = parse_jitter(*jit, "topology.trigger_link_jitter");
    out.clock_link_delay =
        dur_field(obj, "clock_link_delay_fs", out.clock_link_delay, "topology");
    if (const json* jit = find(obj, "clock_link_jitter"))
        out.clock_link_jitter = parse_jitter(*jit, "topology.clock_link_jitter");
}

void parse_clock(const json& v, ClockDomain& out) {
    const json& obj = as_object(v, "clock");
    check_keys(obj, "clock", {"period_fs", "phase_fs"});
    out.period = dur_field(obj, "period_fs", out.period, "clock");
    out.phase = dur_field(obj, "phase_fs", out.phase, "clock");
}

void parse_metastability(const json& v, MetastabilityModel& out) {
    const json& obj = as_object(v, "metastability");
    check_keys(obj, "metastability",
               {"window_width_fs", "resolve_probability", "profile"});
    out.window_width = dur_field(obj, "window_width_fs", out.window_width, "metastability");
    if (const json* p = find(obj, "resolve_probability"))
        out.resolve_probability = as_double(*p, "metastability.resolve_probability");
    if (const json* p = find(obj, "profile")) {
        const std::string name = as_string(*p, "metastability.profile");
        if (name == "hard_window") out.profile = MetastabilityProfile::hard_window;
        else if (name == "linear_ramp") out.profile = MetastabilityProfile::linear_ramp;
        else throw ConfigError("scenario: metastability.profile must be "
                               "hard_window or linear_ramp");
    }
}

void parse_chain(const json& v, ChainSettings& out) {
    const json& obj = as_object(v, "delay_chain");
    check_keys(obj, "delay_chain", {"tap_step_fs", "initial_tap", "per_element_max_fs"});
    out.tap_step = dur_field(obj, "tap_step_fs", out.tap_step, "delay_chain");
    if (const json* t = find(obj, "initial_tap"))
        out.initial_tap = static_cast<int>(as_int(*t, "delay_chain.initial_tap"));
    if (const json* m = find(obj, "per_element_max_fs"))
        out.per_element_max = Duration(as_int(*m, "delay_chain.per_element_max_fs"));
}

void parse_probe(const json& v, ProbeConfig& out) {
    const json& obj = as_object(v, "probe");
    check_keys(obj, "probe", {"pulse_count", "interval_fs"});
    if (const json* c = find(obj, "pulse_count")) {
        const std::int64_t val = as_int(*c, "probe.pulse_count");
        if (val < 0) throw ConfigError("scenario: probe.pulse_count must be >= 0");
        out.pulse_count = static_cast<std::uint32_t>(val);
    }
    out.interval = dur_field(obj, "interval_fs", out.interval, "probe");
}

void parse_trigger(const json& v, TriggerConfig& out) {
    const json& obj = as_object(v, "trigger");
    check_keys(obj, "trigger",
               {"output_delay_fs", "pulse_width_fs", "level1_interval_fs",
                "level1_count", "level2_interval_fs", "level2_count"});
    out.output_delay = dur_field(obj, "output_delay_fs", out.output_delay, "trigger");
    out.pulse_width = dur_field(obj, "pulse_width_fs", out.pulse_width, "trigger");
    out.level1_interval =
        dur_field(obj, "level1_interval_fs", out.level1_interval, "trigger");
    if (const json* c = find(obj, "level1_count"))
        out.level1_count = static_cast<std::uint32_t>(as_int(*c, "trigger.level1_count"));
    out.level2_interval =
        dur_field(obj, "level2_interval_fs", out.level2_interval, "trigger");
    if (const json* c = find(obj, "level2_count"))
        out.level2_count = static_cast<std::uint32_t>(as_int(*c, "trigger.level2_count"));
}

void parse_qubit(const json& v, QubitStateModel& out) {
    const json& obj = as_object(v, "qubit");
    check_keys(obj, "qubit", {"excited_probability"});
    if (const json* p = find(obj, "excited_probability"))
        out.excited_probability = as_double(*p, "qubit.excited_probability");
}

void validate_scenario(const Scenario& s) {
    s.clock.validate();
    s.model.validate();
    s.probe.validate(s.clock);
    s.trigger.validate();
    s.qubit.validate();
    s.output_jitter.validate();
    build_chain(s);    // checks tap step, cap and initial tap
    build_topology(s); // checks structure and per-link delay count
}

} // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("scenario: top level must be an object");
    check_keys(root, "the scenario",
               {"seed", "topology", "clock", "metastability", "delay_chain",
                "probe", "trigger", "qubit", "output_jitter"});

    Scenario s;
    if (const json* seed = find(root, "seed")) {
        if (!seed->is_number_integer() && !seed->is_number_unsigned())
            throw ConfigError("scenario: seed must be an integer");
        s.seed = seed->get<std::uint64_t>();
    }
    if (const json* v = find(root, "topology")) parse_topology(*v, s.topology);
    if (const json* v = find(root, "clock")) parse_clock(*v, s.clock);
    if (const json* v = find(root, "metastability")) parse_metastability(*v, s.model);
    if (const json* v = find(root, "delay_chain")) parse_chain(*v, s.chain);
    if (const json* v = find(root, "probe")) parse_probe(*v, s.probe);
    if (const json* v = find(root, "trigger")) parse_trigger(*v, s.trigger);
    if (const json* v = find(root, "qubit")) parse_qubit(*v, s.qubit);
    if (const json* v = find(root, "output_jitter"))
        s.output_jitter = parse_jitter(*v, "output_jitter");

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json_text(buffer.str());
}

Topology build_topology(const Scenario& scenario) {
    const TopologySettings& t = scenario.topology;
    StarTopologyConfig config;
    config.n_slaves = t.n_slaves;
    config.fanout_width = t.fanout_width;
    config.trigger_link_delay = t.trigger_link_delay;
    config.trigger_link_jitter = t.trigger_link_jitter;
    config.clock_link_delay = t.clock_link_delay;
    config.clock_link_jitter = t.clock_link_jitter;
    Topology topo = build_star_topology(config);
    if (!t.per_trigger_link_delays) return topo;

    std::vector<Link> links = topo.links();
    std::size_t trigger_links = 0;
    for (const Link& l : links)
        if (l.purpose != LinkPurpose::clock) ++trigger_links;
    if (t.per_trigger_link_delays->size() != trigger_links)
        throw ConfigError("scenario: per_trigger_link_delays_fs has " +
                          std::to_string(t.per_trigger_link_delays->size()) +
                          " entries, topology has " + std::to_string(trigger_links) +
                          " trigger links");
    std::size_t at = 0;
    for (Link& l : links)
        if (l.purpose != LinkPurpose::clock)
            l.nominal_delay = (*t.per_trigger_link_delays)[at++];
    return Topology(topo.nodes(), std::move(links), topo.fanout_width());
}

DelayChain build_chain(const Scenario& scenario) {
    DelayChain chain(scenario.chain.tap_step, scenario.chain.per_element_max);
    chain.set_tap(scenario.chain.initial_tap);
    return chain;
}

CalibrationOutcome calibrate_scenario(const Scenario& scenario) {
    const Topology topo = build_topology(scenario);
    DelayChain chain = build_chain(scenario);

    DeviceStatus master{.role = DeviceRole::master};
    master = apply_command(master, StartSelfAdapt{});

    RngHandle root(scenario.seed);
    RngHandle calib_rng = root.split(kCalibrationStream);
    CalibrationResult result = run_self_adaptation(
        topo, scenario.clock, chain, scenario.model, scenario.probe, calib_rng);

    master = complete_self_adaptation(master);
    return {std::move(result), master};
}

RunOutcome run_scenario(const Scenario& scenario, bool uncalibrated) {
    const Topology topo = build_topology(scenario);
    DelayChain chain = build_chain(scenario);

    RngHandle root(scenario.seed);
    RunOutcome outcome;
    DeviceStatus master{.role = DeviceRole::master};
    if (uncalibrated) {
        outcome.run_tap = scenario.chain.initial_tap;
    } else {
        master = apply_command(master, StartSelfAdapt{});
        RngHandle calib_rng = root.split(kCalibrationStream);
        outcome.calibration = run_self_adaptation(
            topo, scenario.clock, chain, scenario.model, scenario.probe, calib_rng);
        master = complete_self_adaptation(master);
        outcome.run_tap = outcome.calibration->committed_tap;
    }

    // Arm every device through the wire format; a status round-trip is the
    // same path a real control host takes.
    const std::vector<std::uint8_t> arm_frame =
        encode_command(SetSwitches{kArmedSwitches});
    master = apply_command(master, decode_command(arm_frame));
    std::vector<DeviceStatus> slave_status(topo.slaves().size(), DeviceStatus{});
    for (DeviceStatus& s : slave_status)
        s = apply_command(s, decode_command(arm_frame));

    RunTriggers run{scenario.trigger, uncalibrated};
    master = apply_command(master, decode_command(encode_command(run)));

    RngHandle run_rng = root.split(kRunStream);
    outcome.report = simulate_run(topo, scenario.clock, chain, scenario.model,
                                  scenario.trigger, scenario.qubit,
                                  scenario.output_jitter, run_rng);

    for (std::size_t i = 0; i < outcome.report.awgs.size(); ++i)
        if (outcome.report.awgs[i].jitter_flag)
            slave_status[i] = record_jitter_flag(slave_status[i]);
    return outcome;
}

TapScan sweep_scenario(const Scenario& scenario) {
    const Topology topo = build_topology(scenario);
    const DelayChain chain = build_chain(scenario);
    RngHandle root(scenario.seed);
    RngHandle calib_rng = root.split(kCalibrationStream);
    return scan_all_taps(topo, scenario.clock, chain, scenario.model,
                         scenario.probe, calib_rng);
}

} // namespace trigsim
