#include "memrig/frontend.hpp"

#include <cmath>
#include <string>

#include "memrig/error.hpp"

namespace memrig::frontend {

namespace {

constexpr double kSwitchOnVolts = 0.6;

int channel_of(Source s) { return static_cast<int>(s); }

struct SenseVisitor {
    double v_cell;
    double v_gate;

    double operator()(device::Cell& cell) const { return cell.sense_current(v_cell, v_gate); }
    double operator()(const IdealResistor& r) const {
        return v_gate > kSwitchOnVolts ? v_cell / r.ohms : 0.0;
    }
};

} // namespace

double dac_code_to_voltage(int code) {
    if (code < 0 || code > kDacMaxCode) {
        throw ParameterError("DAC code " + std::to_string(code) + " outside 0..4095");
    }
    return static_cast<double>(code) * kDacFullScale / kDacMaxCode;
}

int nearest_dac_code(double volts) {
    if (!(volts >= 0.0 && volts <= kDacFullScale)) {
        throw ParameterError("voltage " + std::to_string(volts) + " V outside DAC range 0..5 V");
    }
    return static_cast<int>(std::lround(volts / kDacFullScale * kDacMaxCode));
}

std::int32_t adc_quantize(double volts) {
    const double steps = std::round(volts / kAdcLsb);
    if (steps >= kAdcMaxCode) {
        return kAdcMaxCode;
    }
    if (steps <= kAdcMinCode) {
        return kAdcMinCode;
    }
    return static_cast<std::int32_t>(steps);
}

TiaConfig tia_autorange(double i_estimate, double gain) {
    if (!(i_estimate >= 0.0)) {
        throw ParameterError("current estimate must be >= 0");
    }
    for (auto it = kFeedbackOhms.rbegin(); it != kFeedbackOhms.rend(); ++it) {
        if (i_estimate * *it * gain <= kAdcFullScale) {
            return {*it, gain, false};
        }
    }
    return {kFeedbackOhms.front(), gain, true};
}

Source source_from_selector(int selector) {
    if (selector < 0 || selector > 7) {
        throw ParameterError("mux selector " + std::to_string(selector) + " outside 0..7");
    }
    return static_cast<Source>(selector);
}

CrossbarFixture::CrossbarFixture(std::vector<Device> devices, double gain_error)
    : devices_(std::move(devices)), gain_error_(gain_error) {
    if (devices_.size() != static_cast<std::size_t>(kRows * kCols)) {
        throw ParameterError("fixture needs exactly 12x7 devices");
    }
    if (std::abs(gain_error_) > kGainErrorBound) {
        throw ParameterError("gain error exceeds the accuracy bound");
    }
    mux_.fill(Source::Unrouted);
    dac_.fill(0);
    tia_.fill(TiaConfig{kFeedbackOhms.front(), 1.0, false});
}

void CrossbarFixture::check_address(int sl, int bl) {
    if (sl < 0 || sl >= kRows || bl < 0 || bl >= kCols) {
        throw AddressError("cell (" + std::to_string(sl) + "," + std::to_string(bl) +
                           ") outside the 12x7 array");
    }
}

std::size_t CrossbarFixture::pin_slot(PinId pin) const {
    const int limit = pin.side == Side::South ? kCols : kRows;
    if (pin.index < 0 || pin.index >= limit) {
        throw ParameterError("no such pin index " + std::to_string(pin.index));
    }
    switch (pin.side) {
    case Side::West:
        return static_cast<std::size_t>(pin.index);
    case Side::East:
        return static_cast<std::size_t>(kRows + pin.index);
    case Side::South:
        return static_cast<std::size_t>(2 * kRows + pin.index);
    }
    throw ParameterError("bad pin side");
}

void CrossbarFixture::route(PinId pin, Source source) {
    const auto slot = pin_slot(pin);
    if (source == Source::Unrouted) {
        throw ParameterError("cannot route to the unrouted state");
    }
    if (source == Source::Sense && pin.side != Side::South) {
        throw ParameterError("only south pins reach the current sensing module");
    }
    mux_[slot] = source;
}

Source CrossbarFixture::routing(PinId pin) const { return mux_[pin_slot(pin)]; }

double CrossbarFixture::pin_potential(PinId pin) const {
    const Source s = routing(pin);
    switch (s) {
    case Source::Dac1:
    case Source::Dac2:
    case Source::Dac3:
    case Source::Dac4:
    case Source::Dac5:
        return dac_code_to_voltage(dac_[channel_of(s)]);
    case Source::External:
        return external_volts_;
    case Source::Sense:
        // TIA input is a virtual ground held at the reference channel.
        return dac_code_to_voltage(dac_[kSenseRefChannel]);
    case Source::Ground:
    case Source::Unrouted:
        return 0.0;
    }
    return 0.0;
}

void CrossbarFixture::set_dac(int channel, int code) {
    if (channel < 0 || channel >= kDacChannels) {
        throw ParameterError("DAC channel " + std::to_string(channel) + " outside 0..15");
    }
    dac_code_to_voltage(code);
    dac_[channel] = code;
}

int CrossbarFixture::dac_code(int channel) const {
    if (channel < 0 || channel >= kDacChannels) {
        throw ParameterError("DAC channel " + std::to_string(channel) + " outside 0..15");
    }
    return dac_[channel];
}

const TiaConfig& CrossbarFixture::tia(int col) const {
    check_address(0, col);
    return tia_[col];
}

void CrossbarFixture::set_tia(int col, const TiaConfig& config) {
    check_address(0, col);
    bool known = false;
    for (double r : kFeedbackOhms) {
        known = known || r == config.feedback_ohms;
    }
    if (!known) {
        throw ParameterError("feedback resistor not in the TIA ladder");
    }
    tia_[col] = config;
}

Device& CrossbarFixture::device_at(int sl, int bl) {
    check_address(sl, bl);
    return devices_[static_cast<std::size_t>(sl * kCols + bl)];
}

const Device& CrossbarFixture::device_at(int sl, int bl) const {
    check_address(sl, bl);
    return devices_[static_cast<std::size_t>(sl * kCols + bl)];
}

const device::Cell* CrossbarFixture::cell(int sl, int bl) const {
    return std::get_if<device::Cell>(&device_at(sl, bl));
}

double CrossbarFixture::floor_current(int sl, int bl, double v_read, double v_gate) const {
    const Device& d = device_at(sl, bl);
    if (const auto* c = std::get_if<device::Cell>(&d)) {
        return c->floor_current(v_read, v_gate);
    }
    return v_gate > kSwitchOnVolts ? std::abs(v_read) / std::get<IdealResistor>(d).ohms : 0.0;
}

void CrossbarFixture::route_row(int sl, int bl, Source bl_source) {
    for (int r = 0; r < kRows; ++r) {
        route(wl_pin(r), r == sl ? Source::Dac1 : Source::Ground);
        route(sl_pin(r), r == sl ? Source::Dac3 : Source::Ground);
    }
    // Unselected bit lines follow the word line so half-selected cells see no bias.
    for (int c = 0; c < kCols; ++c) {
        route(bl_pin(c), c == bl ? bl_source : Source::Dac1);
    }
}

void CrossbarFixture::drive_cell(int sl, int bl, double v_wl, double v_bl, double v_gate,
                                 double duration) {
    check_address(sl, bl);
    if (!(duration > 0.0)) {
        throw ParameterError("pulse duration must be > 0");
    }
    set_dac(kWlChannel, nearest_dac_code(v_wl));
    set_dac(kBlChannel, nearest_dac_code(v_bl));
    set_dac(kGateChannel, nearest_dac_code(v_gate));
    route_row(sl, bl, Source::Dac2);

    device::PulseSpec addressed{};
    for (int r = 0; r < kRows; ++r) {
        const double wl = pin_potential(wl_pin(r));
        const double gate = pin_potential(sl_pin(r));
        for (int c = 0; c < kCols; ++c) {
            const device::PulseSpec pulse{wl, pin_potential(bl_pin(c)), gate, duration};
            if (r == sl && c == bl) {
                addressed = pulse;
            }
            if (gate <= 0.0 || pulse.v_cell() == 0.0) {
                continue;
            }
            if (auto* cell = std::get_if<device::Cell>(&device_at(r, c))) {
                cell->apply_pulse(pulse);
            }
        }
    }
    if (tracing_) {
        trace_.push_back({sl, bl, v_wl, v_bl, v_gate, duration, addressed});
    }
}

double CrossbarFixture::convert(double current, const TiaConfig& tia,
                                std::int32_t& code) const {
    const double volts = current * tia.feedback_ohms * tia.gain * (1.0 + gain_error_);
    code = adc_quantize(volts);
    return volts;
}

AdcReading CrossbarFixture::measure_bl_current(int bl, double v_read, double v_gate, int sl) {
    check_address(sl, bl);
    const int read_code = nearest_dac_code(std::abs(v_read));
    set_dac(kWlChannel, v_read >= 0.0 ? read_code : 0);
    set_dac(kSenseRefChannel, v_read >= 0.0 ? 0 : read_code);
    set_dac(kGateChannel, nearest_dac_code(v_gate));
    route_row(sl, bl, Source::Sense);

    const double v_ref = pin_potential(bl_pin(bl));
    double total = 0.0;
    for (int r = 0; r < kRows; ++r) {
        const SenseVisitor visit{pin_potential(wl_pin(r)) - v_ref, pin_potential(sl_pin(r))};
        total += std::visit(visit, device_at(r, bl));
    }

    const double gain = tia_[bl].gain;
    // Coarse pass at the least sensitive range, then re-range with margin for
    // one coarse LSB and the worst-case gain error.
    const TiaConfig coarse{kFeedbackOhms.front(), gain, false};
    std::int32_t coarse_code = 0;
    convert(total, coarse, coarse_code);
    const double coarse_scale = coarse.feedback_ohms * gain;
    const double estimate = (std::abs(adc_dequantize(coarse_code)) + kAdcLsb) / coarse_scale *
                            (1.0 + kGainErrorBound);
    TiaConfig fine = tia_autorange(estimate, gain);

    AdcReading reading;
    const double volts = convert(total, fine, reading.code);
    fine.saturated = fine.saturated || std::abs(volts) > kAdcFullScale;
    tia_[bl] = fine;
    reading.tia = fine;
    reading.volts = adc_dequantize(reading.code);
    reading.amps = reading.volts / (fine.feedback_ohms * fine.gain);
    reading.v_applied = v_read >= 0.0 ? dac_code_to_voltage(read_code)
                                      : -dac_code_to_voltage(read_code);
    return reading;
}

} // namespace memrig::frontend
