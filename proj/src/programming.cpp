#include "memrig/programming.hpp"

#include <cmath>

#include "memrig/error.hpp"

namespace memrig::programming {

namespace {

using frontend::CrossbarFixture;

bool target_met(Mode mode, double current, double target) {
    return mode == Mode::Reset ? current <= target : current >= target;
}

void pulse(CrossbarFixture& fixture, int sl, int bl, Mode mode, double volts, double gate,
           double duration) {
    if (mode == Mode::Reset) {
        fixture.drive_cell(sl, bl, 0.0, volts, gate, duration);
    } else {
        fixture.drive_cell(sl, bl, volts, 0.0, gate, duration);
    }
}

double verify(CrossbarFixture& fixture, int sl, int bl, double v_verify, double gate) {
    return fixture.measure_bl_current(bl, v_verify, gate, sl).amps;
}

} // namespace

const char* to_string(Status status) {
    switch (status) {
    case Status::Ok:
        return "OK";
    case Status::TargetNotReached:
        return "TARGET_NOT_REACHED";
    case Status::CellBroken:
        return "CELL_BROKEN";
    }
    return "?";
}

void IspvaParams::validate() const {
    if (!(v_step > 0.0)) {
        throw ParameterError("v_step must be > 0");
    }
    if (!(v_start <= v_stop)) {
        throw ParameterError("v_start must not exceed v_stop");
    }
    if (!(t_pulse > 0.0)) {
        throw ParameterError("t_pulse must be > 0");
    }
    if (!(i_target > 0.0)) {
        throw ParameterError("i_target must be > 0");
    }
    if (v_start < 0.0 || v_stop > frontend::kDacFullScale) {
        throw ParameterError("ramp outside the DAC range");
    }
}

int IspvaParams::ramp_length() const {
    return static_cast<int>(std::floor((v_stop - v_start) / v_step + 1e-9)) + 1;
}

double IspvaParams::ramp_voltage(int step) const { return v_start + step * v_step; }

IspvaParams set_defaults() { return IspvaParams{}; }

IspvaParams reset_defaults() {
    IspvaParams p;
    p.v_gate_prog = 2.7;
    p.i_target = 5e-6;
    p.mode = Mode::Reset;
    return p;
}

IspvaParams form_defaults() {
    IspvaParams p;
    p.v_start = 2.0;
    p.v_stop = 3.2;
    p.v_gate_prog = 1.8;
    p.mode = Mode::Form;
    return p;
}

ProgramResult ispva(CrossbarFixture& fixture, int sl, int bl, const IspvaParams& params) {
    CrossbarFixture::check_address(sl, bl);
    params.validate();

    ProgramResult result;
    const int steps = params.ramp_length();
    for (int k = 0; k < steps; ++k) {
        const double v = params.ramp_voltage(k);
        pulse(fixture, sl, bl, params.mode, v, params.v_gate_prog, params.t_pulse);
        ++result.pulses;
        result.final_voltage = v;

        const bool unreachable =
            params.mode == Mode::Reset &&
            fixture.floor_current(sl, bl, params.v_verify, params.v_gate_read) > params.i_target;
        result.final_current = verify(fixture, sl, bl, params.v_verify, params.v_gate_read);
        if (unreachable) {
            result.status = Status::CellBroken;
            return result;
        }
        if (target_met(params.mode, result.final_current, params.i_target)) {
            result.status = Status::Ok;
            return result;
        }
    }
    result.status = Status::TargetNotReached;
    return result;
}

ProgramResult single_pulse_form(CrossbarFixture& fixture, int sl, int bl,
                                const SinglePulseParams& params) {
    CrossbarFixture::check_address(sl, bl);
    pulse(fixture, sl, bl, Mode::Form, params.v_pulse, params.v_gate, params.t_pulse);

    ProgramResult result;
    result.pulses = 1;
    result.final_voltage = params.v_pulse;
    result.final_current = verify(fixture, sl, bl, params.v_verify, params.v_gate_read);
    result.status = result.final_current >= params.i_target ? Status::Ok
                                                            : Status::TargetNotReached;
    return result;
}

ProgramResult incremental_form(CrossbarFixture& fixture, int sl, int bl,
                               const IspvaParams& params) {
    CrossbarFixture::check_address(sl, bl);
    params.validate();

    ProgramResult result;
    const int steps = params.ramp_length();
    for (int k = 0; k < steps; ++k) {
        result.final_voltage = params.ramp_voltage(k);
        pulse(fixture, sl, bl, Mode::Form, result.final_voltage, params.v_gate_prog,
              params.t_pulse);
        ++result.pulses;
    }
    result.final_current = verify(fixture, sl, bl, params.v_verify, params.v_gate_read);
    result.status = result.final_current >= params.i_target ? Status::Ok
                                                            : Status::TargetNotReached;
    return result;
}

} // namespace memrig::programming
