#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "trigsim/trigger.hpp"

namespace trigsim {

// Output stage enables of one AWG. self_adapt gates the calibration
// engine and is mutually exclusive with everything else: a device probes
// its delay line or does real work, never both.
struct SwitchState {
    bool trigger = false;
    bool waveform_output = false;
    bool monitoring = false;
    bool self_adapt = false;

    bool operator==(const SwitchState&) const = default;
};

// All operational switches on, calibration off: the armed configuration a
// run requires.
inline constexpr SwitchState kArmedSwitches{true, true, true, false};
// Calibration engine only.
inline constexpr SwitchState kProbeSwitches{false, false, false, true};

struct StartSelfAdapt {};

struct SetSwitches {
    SwitchState switches;
};

struct RunTriggers {
    TriggerConfig config;
    bool allow_uncalibrated = false;
};

struct ReadStatus {};

using Command = std::variant<StartSelfAdapt, SetSwitches, RunTriggers, ReadStatus>;

enum class DeviceRole : std::uint8_t { master, slave };

struct DeviceStatus {
    DeviceRole role = DeviceRole::slave;
    SwitchState switches{};
    bool calibrated = false;
    bool jitter_flag = false;
    // Master only: set once its self-adaptation sequence has finished.
    bool completion_flag = false;

    bool operator==(const DeviceStatus&) const = default;
};

// Applies one host command, returning the next status. Throws
// ProtocolError for commands illegal in the current state or for this
// role. Legality rules:
//  - start_self_adapt: master only, from the fresh uncalibrated state.
//  - set_switches: rejected while probing; self_adapt may only be set by
//    start_self_adapt, and never combined with other switches.
//  - run: master only, requires the armed switch state, and a calibrated
//    device unless allow_uncalibrated is set. The trigger config must be
//    valid. Status is unchanged; execution is the caller's business.
//  - read_status: always legal; clears jitter_flag (read-to-clear).
DeviceStatus apply_command(const DeviceStatus& status, const Command& command);

// Device-side event: the probing master finished its scan and committed a
// tap. Moves probing -> calibrated idle and raises completion_flag.
DeviceStatus complete_self_adaptation(const DeviceStatus& status);

// Device-side event from the interval monitor. Only meaningful while
// monitoring is enabled.
DeviceStatus record_jitter_flag(const DeviceStatus& status);

// Wire format, little-endian throughout:
//   u32 payload length, then payload = u8 tag + fields.
//   0x01 start_self_adapt                 (no fields)
//   0x02 set_switches   u8 bitmask        (bit0 trigger, bit1 waveform,
//                                          bit2 monitoring, bit3 self_adapt)
//   0x03 run            6 config fields   (i64 delay, i64 width, i64 lvl1
//                                          interval, u32 lvl1 count, i64
//                                          lvl2 interval, u32 lvl2 count)
//                       + u8 allow_uncalibrated
//   0x04 read_status                      (no fields)
std::vector<std::uint8_t> encode_command(const Command& command);

// Decodes exactly one frame; the buffer must contain nothing else. Throws
// ProtocolError on short input, bad tag, wrong payload length, trailing
// bytes, or out-of-range field values.
Command decode_command(std::span<const std::uint8_t> bytes);

} // namespace trigsim
