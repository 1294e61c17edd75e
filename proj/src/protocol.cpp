#include "trigsim/protocol.hpp"

#include <cstring>

namespace trigsim {

namespace {

constexpr std::uint8_t kTagStartSelfAdapt = 0x01;
constexpr std::uint8_t kTagSetSwitches = 0x02;
constexpr std::uint8_t kTagRun = 0x03;
constexpr std::uint8_t kTagReadStatus = 0x04;

DeviceStatus apply_set_switches(const DeviceStatus& status, const SetSwitches& cmd) {
    const SwitchState& s = cmd.switches;
    if (s.self_adapt)
        throw ProtocolError(s.trigger || s.waveform_output || s.monitoring
                                ? "self_adapt cannot be combined with other switches"
                                : "self_adapt is entered via start_self_adapt, "
                                  "not set_switches");
    if (status.switches.self_adapt)
        throw ProtocolError("switches are locked while self-adaptation runs");
    DeviceStatus next = status;
    next.switches = s;
    return next;
}

DeviceStatus apply_run(const DeviceStatus& status, const RunTriggers& cmd) {
    if (status.role != DeviceRole::master)
        throw ProtocolError("run is a master-only command");
    if (status.switches != kArmedSwitches)
        throw ProtocolError("run requires trigger, waveform and monitoring "
                            "switches on and self_adapt off");
    if (!status.calibrated && !cmd.allow_uncalibrated)
        throw ProtocolError("device is not calibrated; pass allow_uncalibrated "
                            "to run anyway");
    cmd.config.validate();
    return status;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        if (at_ + 1 > bytes_.size()) throw ProtocolError("frame truncated");
        return bytes_[at_++];
    }
    std::uint32_t u32() {
        if (at_ + 4 > bytes_.size()) throw ProtocolError("frame truncated");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[at_++]) << (8 * i);
        return v;
    }
    std::int64_t i64() {
        if (at_ + 8 > bytes_.size()) throw ProtocolError("frame truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[at_++]) << (8 * i);
        return static_cast<std::int64_t>(v);
    }
    std::size_t consumed() const { return at_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t at_ = 0;
};

} // namespace

DeviceStatus apply_command(const DeviceStatus& status, const Command& command) {
    if (std::holds_alternative<StartSelfAdapt>(command)) {
        if (status.role != DeviceRole::master)
            throw ProtocolError("start_self_adapt is a master-only command");
        if (status.switches.self_adapt)
            throw ProtocolError("self-adaptation is already running");
        if (status.calibrated)
            throw ProtocolError("device is already calibrated");
        DeviceStatus next = status;
        next.switches = kProbeSwitches;
        return next;
    }
    if (const auto* sw = std::get_if<SetSwitches>(&command))
        return apply_set_switches(status, *sw);
    if (const auto* run = std::get_if<RunTriggers>(&command))
        return apply_run(status, *run);
    // read_status
    DeviceStatus next = status;
    next.jitter_flag = false;
    return next;
}

DeviceStatus complete_self_adaptation(const DeviceStatus& status) {
    if (status.role != DeviceRole::master)
        throw ProtocolError("only the master runs self-adaptation");
    if (!status.switches.self_adapt)
        throw ProtocolError("no self-adaptation is in progress");
    DeviceStatus next = status;
    next.switches = SwitchState{};
    next.calibrated = true;
    next.completion_flag = true;
    return next;
}

DeviceStatus record_jitter_flag(const DeviceStatus& status) {
    if (!status.switches.monitoring)
        throw ProtocolError("jitter flag requires monitoring to be enabled");
    DeviceStatus next = status;
    next.jitter_flag = true;
    return next;
}

std::vector<std::uint8_t> encode_command(const Command& command) {
    std::vector<std::uint8_t> payload;
    if (std::holds_alternative<StartSelfAdapt>(command)) {
        payload.push_back(kTagStartSelfAdapt);
    } else if (const auto* sw = std::get_if<SetSwitches>(&command)) {
        payload.push_back(kTagSetSwitches);
        const SwitchState& s = sw->switches;
        payload.push_back(static_cast<std::uint8_t>(
            (s.trigger ? 1u : 0u) | (s.waveform_output ? 2u : 0u) |
            (s.monitoring ? 4u : 0u) | (s.self_adapt ? 8u : 0u)));
    } else if (const auto* run = std::get_if<RunTriggers>(&command)) {
        payload.push_back(kTagRun);
        put_i64(payload, run->config.output_delay.count());
        put_i64(payload, run->config.pulse_width.count());
        put_i64(payload, run->config.level1_interval.count());
        put_u32(payload, run->config.level1_count);
        put_i64(payload, run->config.level2_interval.count());
        put_u32(payload, run->config.level2_count);
        payload.push_back(run->allow_uncalibrated ? 1 : 0);
    } else {
        payload.push_back(kTagReadStatus);
    }

    std::vector<std::uint8_t> frame;
    frame.reserve(4 + payload.size());
    put_u32(frame, static_cast<std::uint32_t>(payload.size()));
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

Command decode_command(std::span<const std::uint8_t> bytes) {
    Reader reader(bytes);
    const std::uint32_t length = reader.u32();
    if (bytes.size() != 4u + length)
        throw ProtocolError(bytes.size() < 4u + length
                                ? "frame truncated"
                                : "trailing bytes after frame");
    if (length == 0) throw ProtocolError("empty payload");

    const std::uint8_t tag = reader.u8();
    Command command;
    switch (tag) {
        case kTagStartSelfAdapt:
            command = StartSelfAdapt{};
            break;
        case kTagSetSwitches: {
            const std::uint8_t bits = reader.u8();
            if (bits & ~0x0Fu) throw ProtocolError("unknown switch bits set");
            SetSwitches sw;
            sw.switches.trigger = bits & 1u;
            sw.switches.waveform_output = bits & 2u;
            sw.switches.monitoring = bits & 4u;
            sw.switches.self_adapt = bits & 8u;
            command = sw;
            break;
        }
        case kTagRun: {
            RunTriggers run;
            run.config.output_delay = Duration(reader.i64());
            run.config.pulse_width = Duration(reader.i64());
            run.config.level1_interval = Duration(reader.i64());
            run.config.level1_count = reader.u32();
            run.config.level2_interval = Duration(reader.i64());
            run.config.level2_count = reader.u32();
            const std::uint8_t flag = reader.u8();
            if (flag > 1) throw ProtocolError("allow_uncalibrated must be 0 or 1");
            run.allow_uncalibrated = flag == 1;
            command = run;
            break;
        }
        case kTagReadStatus:
            command = ReadStatus{};
            break;
        default:
            throw ProtocolError("unknown command tag");
    }
    if (reader.consumed() != bytes.size())
        throw ProtocolError("payload length does not match tag");
    return command;
}

} // namespace trigsim
