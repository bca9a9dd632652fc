#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace memrig::device {

/// Pulse amplitudes beyond this are outside the front end's full scale.
inline constexpr double kMaxPulseVolts = 5.0;

/// Effective disturb exposure of a single read.
inline constexpr double kReadExposureSeconds = 10e-6;

/// Shape of the unit-mean lognormal factor scaling each read-disturb step.
inline constexpr double kDisturbSpread = 1.5;

/// Select transistor acting as a gate-controlled current limiter.
struct TransistorParams {
    double v_th = 0.6;     // V
    double g_m = 1.15e-4;  // S

    /// Saturation current for a given gate drive; zero when the device is off.
    double compliance(double v_gate) const;

    bool operator==(const TransistorParams&) const = default;
};

struct CellParams {
    double v_form_th = 1.6;    // V
    double v_set_th = 0.6;     // V
    double v_reset_th = 0.7;   // V
    double g_max = 1e-3;       // S
    double g_min = 2e-6;       // S
    double alpha_set = 2e5;    // 1/(V s)
    double alpha_reset = 1e6;  // 1/(V s)
    double sigma_program = 0.003;
    double sigma0 = 0.01;
    double sigma1 = 0.2;       // 1/V
    double disturb_set = 3e3;   // 1/(V s)
    double disturb_reset = 1e2;   // 1/(V s)
    std::uint64_t n_cmax = 10000;
    double kappa = 0.008;
    /// Voltage the filament settles at under compliance; caps the conductance a
    /// set pulse can reach at I_compliance / v_hold.
    double v_hold = 0.2;       // V
    TransistorParams transistor;

    /// Throws ParameterError when an invariant does not hold.
    void validate() const;

    double read_sigma(double v_read) const;

    bool operator==(const CellParams&) const = default;
};

/// Relative lognormal spread applied when drawing per-cell parameters.
struct Variability {
    double threshold = 0.05;
    double conductance = 0.10;
    double rate = 0.10;
    double endurance = 0.20;

    bool operator==(const Variability&) const = default;
};

struct CellProfile {
    CellParams mean;
    Variability spread;
};

/// Long-lived cell with a weak set-polarity read disturb.
CellProfile stable_profile();
/// Cell that drifts to LRS within a few set-polarity reads and wears out near 100 cycles.
CellProfile unstable_profile();
/// Looks up "stable" / "unstable"; throws ParameterError otherwise.
CellProfile profile_by_name(std::string_view name);

/// Per-device parameter draw (stands in for device-to-device variation).
CellParams draw_params(const CellProfile& profile, std::mt19937_64& rng);

enum class Phase { Pristine, Formed };

struct PulseSpec {
    double v_wl = 0.0;
    double v_bl = 0.0;
    double v_gate = 0.0;
    double duration = 0.0;

    double v_cell() const { return v_wl - v_bl; }
    void validate() const;
};

struct PulseOutcome {
    double delta_x = 0.0;
    double current = 0.0;  // A, compliance limited, noiseless
};

/// Behavioral 1T1R cell. Owns its random stream; single owner, movable.
class Cell {
public:
    Cell(const CellParams& params, std::uint64_t seed);

    PulseOutcome apply_pulse(const PulseSpec& pulse);

    /// One read: applies the read-disturb micro-update, then returns the noisy current.
    double sense_current(double v_read, double v_gate);

    double conductance() const;

    /// HRS floor after degradation; equals g_max once kappa=1 and d >= n_cmax.
    double hrs_floor() const;

    /// Noiseless current of a fully reset filament at the given read conditions.
    double floor_current(double v_read, double v_gate) const;

    /// Noiseless current of the present state.
    double ideal_current(double v_read, double v_gate) const;

    Phase phase() const { return phase_; }
    double filament() const { return x_; }
    std::uint64_t degradation() const { return resets_; }
    const CellParams& params() const { return params_; }

private:
    double conductance_at(double x) const;
    double compliance_cap(double v_gate) const;
    void perturb();

    CellParams params_;
    Phase phase_ = Phase::Pristine;
    double x_ = 0.0;
    std::uint64_t resets_ = 0;
    bool armed_ = false;  // a set or forming pulse happened since the last reset event
    std::mt19937_64 rng_;
};

} // namespace memrig::device
