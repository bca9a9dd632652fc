#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "memrig/device.hpp"

namespace memrig::frontend {

inline constexpr int kRows = 12;  // WL/SL pairs, horizontal
inline constexpr int kCols = 7;   // BL, vertical

inline constexpr int kDacChannels = 16;
inline constexpr int kDacMaxCode = 4095;
inline constexpr double kDacFullScale = 5.0;

inline constexpr int kAdcBits = 18;
inline constexpr double kAdcFullScale = 4.096;
inline constexpr double kAdcLsb = 2.0 * kAdcFullScale / (1 << kAdcBits);
inline constexpr std::int32_t kAdcMaxCode = (1 << (kAdcBits - 1)) - 1;
inline constexpr std::int32_t kAdcMinCode = -(1 << (kAdcBits - 1));

/// Per-fixture gain error is drawn uniformly from [-bound, +bound].
inline constexpr double kGainErrorBound = 0.003;

/// Analog switch settling; recorded only, pulses are taken as exact.
inline constexpr double kSwitchTimeSeconds = 60e-9;

inline constexpr std::array<double, 8> kFeedbackOhms = {43.0,   100.0,  430.0,  1e3,
                                                        4.3e3,  10e3,   43e3,   100e3};

/// DAC channel roles used by drive/measure. Each mux sees channels 0..4 as DAC1..DAC5.
inline constexpr int kWlChannel = 0;
inline constexpr int kBlChannel = 1;
inline constexpr int kGateChannel = 2;
inline constexpr int kSenseRefChannel = 3;

double dac_code_to_voltage(int code);
/// Nearest code for a voltage inside [0, full scale]; ParameterError otherwise.
int nearest_dac_code(double volts);
inline double quantize_dac(double volts) { return dac_code_to_voltage(nearest_dac_code(volts)); }

/// Bipolar 18-bit conversion, saturating at the code limits.
std::int32_t adc_quantize(double volts);
inline double adc_dequantize(std::int32_t code) { return code * kAdcLsb; }

struct TiaConfig {
    double feedback_ohms = kFeedbackOhms.back();
    double gain = 1.0;
    bool saturated = false;

    bool operator==(const TiaConfig&) const = default;
};

/// Largest feedback resistor keeping |i| * R * gain within ADC full scale.
TiaConfig tia_autorange(double i_estimate, double gain = 1.0);

struct AdcReading {
    std::int32_t code = 0;
    double volts = 0.0;
    double amps = 0.0;
    TiaConfig tia;
    double v_applied = 0.0;  // read voltage after DAC quantization
};

enum class Side : std::uint8_t { West, East, South };  // WL, SL, BL pins

struct PinId {
    Side side;
    int index;

    bool operator==(const PinId&) const = default;
};

inline PinId wl_pin(int row) { return {Side::West, row}; }
inline PinId sl_pin(int row) { return {Side::East, row}; }
inline PinId bl_pin(int col) { return {Side::South, col}; }

/// 8:1 mux inputs. Unrouted is the power-on state and reads as ground.
enum class Source : std::uint8_t {
    Dac1 = 0,
    Dac2,
    Dac3,
    Dac4,
    Dac5,
    Ground,
    External,
    Sense,
    Unrouted = 0xFF,
};

/// Maps a mux selector 0..7 to its source; ParameterError for anything else.
Source source_from_selector(int selector);

/// Fixed resistor behind an ideal select switch; used for calibration.
struct IdealResistor {
    double ohms;
};

using Device = std::variant<device::Cell, IdealResistor>;

struct DriveRecord {
    int sl;
    int bl;
    double v_wl;
    double v_bl;
    double v_gate;
    double duration;
    device::PulseSpec applied;
};

/// The 12x7 pseudo crossbar plus its signal path. Single owner, operated serially.
class CrossbarFixture {
public:
    /// `devices` holds kRows * kCols entries in row-major order.
    CrossbarFixture(std::vector<Device> devices, double gain_error);

    void route(PinId pin, Source source);
    Source routing(PinId pin) const;
    double pin_potential(PinId pin) const;

    void set_dac(int channel, int code);
    int dac_code(int channel) const;

    void set_external_voltage(double volts) { external_volts_ = volts; }

    const TiaConfig& tia(int col) const;
    void set_tia(int col, const TiaConfig& config);

    void drive_cell(int sl, int bl, double v_wl, double v_bl, double v_gate, double duration);
    AdcReading measure_bl_current(int bl, double v_read, double v_gate, int sl);

    Device& device_at(int sl, int bl);
    const Device& device_at(int sl, int bl) const;
    /// Nullptr when the socket position holds a resistor.
    const device::Cell* cell(int sl, int bl) const;

    /// Noiseless current of a fully reset device at the addressed position.
    double floor_current(int sl, int bl, double v_read, double v_gate) const;

    double gain_error() const { return gain_error_; }

    void enable_trace(bool on) { tracing_ = on; }
    const std::vector<DriveRecord>& trace() const { return trace_; }
    void clear_trace() { trace_.clear(); }

    static void check_address(int sl, int bl);

private:
    std::size_t pin_slot(PinId pin) const;
    void route_row(int sl, int bl, Source bl_source);
    double convert(double current, const TiaConfig& tia, std::int32_t& code) const;

    std::vector<Device> devices_;
    std::array<Source, 2 * kRows + kCols> mux_{};
    std::array<int, kDacChannels> dac_{};
    std::array<TiaConfig, kCols> tia_{};
    double external_volts_ = 0.0;
    double gain_error_ = 0.0;
    bool tracing_ = false;
    std::vector<DriveRecord> trace_;
};

} // namespace memrig::frontend
