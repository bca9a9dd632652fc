#pragma once

#include <cstdint>

#include "memrig/frontend.hpp"

namespace memrig::programming {

inline constexpr double kVerifyVolts = 0.2;
inline constexpr double kReadGateVolts = 1.5;
inline constexpr double kPulseSeconds = 10e-6;

enum class Mode : std::uint8_t { Form, Set, Reset };

enum class Status : std::uint8_t { Ok = 0, TargetNotReached = 1, CellBroken = 2 };

const char* to_string(Status status);

struct IspvaParams {
    double v_start = 0.5;
    double v_step = 0.1;
    double v_stop = 2.0;
    double t_pulse = kPulseSeconds;
    double v_gate_prog = 1.5;
    double v_gate_read = kReadGateVolts;
    double v_verify = kVerifyVolts;
    double i_target = 80e-6;
    Mode mode = Mode::Set;

    void validate() const;
    /// Number of ramp steps from v_start up to and including v_stop.
    int ramp_length() const;
    double ramp_voltage(int step) const;
};

/// Set ramp 0.5:0.1:2.0 V, gate 1.5 V, LRS target 80 uA.
IspvaParams set_defaults();
/// Reset ramp 0.5:0.1:2.0 V on the bit line, gate 2.7 V, HRS target 5 uA.
IspvaParams reset_defaults();
/// Forming ramp 2.0:0.1:3.2 V, gate 1.8 V, target 80 uA.
IspvaParams form_defaults();

struct ProgramResult {
    Status status = Status::TargetNotReached;
    int pulses = 0;
    double final_voltage = 0.0;
    double final_current = 0.0;
};

/// Incremental step pulse program-and-verify. Set/form pulses drive the word
/// line, reset pulses the bit line; every pulse is followed by a verify read.
ProgramResult ispva(frontend::CrossbarFixture& fixture, int sl, int bl, const IspvaParams& params);

struct SinglePulseParams {
    double v_pulse = 0.0;
    double t_pulse = kPulseSeconds;
    double v_gate = 1.8;
    double v_gate_read = kReadGateVolts;
    double v_verify = kVerifyVolts;
    double i_target = 80e-6;
};

ProgramResult single_pulse_form(frontend::CrossbarFixture& fixture, int sl, int bl,
                                const SinglePulseParams& params);

/// Applies the whole ramp unconditionally and verifies once at the end.
ProgramResult incremental_form(frontend::CrossbarFixture& fixture, int sl, int bl,
                               const IspvaParams& params);

} // namespace memrig::programming
