#include "memrig/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memrig/error.hpp"

namespace memrig::device {

namespace {

double lognormal_factor(std::mt19937_64& rng, double sigma) {
    if (sigma <= 0.0) {
        return 1.0;
    }
    std::normal_distribution<double> n(0.0, sigma);
    return std::exp(n(rng));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace

double TransistorParams::compliance(double v_gate) const {
    return g_m * std::max(v_gate - v_th, 0.0);
}

double CellParams::read_sigma(double v_read) const {
    return sigma0 + sigma1 * std::abs(v_read);
}

void CellParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw ParameterError(std::string("invalid cell parameters: ") + what);
        }
    };
    require(g_min > 0.0 && g_min < g_max, "need 0 < g_min < g_max");
    require(alpha_set >= 0.0 && alpha_reset >= 0.0, "growth rates must be >= 0");
    require(disturb_set >= 0.0 && disturb_reset >= 0.0, "disturb rates must be >= 0");
    require(sigma_program >= 0.0 && sigma0 >= 0.0 && sigma1 >= 0.0, "noise must be >= 0");
    require(n_cmax >= 1, "n_cmax must be >= 1");
    require(kappa >= 0.0, "kappa must be >= 0");
    require(v_form_th > 0.0 && v_set_th > 0.0 && v_reset_th > 0.0, "thresholds must be > 0");
    require(v_hold > 0.0, "v_hold must be > 0");
    require(transistor.g_m > 0.0, "transistor g_m must be > 0");
}

CellProfile stable_profile() {
    return CellProfile{};
}

CellProfile unstable_profile() {
    CellProfile p;
    p.mean.disturb_set = 3e4;
    p.mean.disturb_reset = 5e2;
    p.mean.n_cmax = 100;
    // Saturated floor lands at 13 * g_min: the 5 uA verify target at 0.2 V
    // becomes unreachable slightly before d reaches n_cmax.
    p.mean.kappa = 0.024;
    return p;
}

CellProfile profile_by_name(std::string_view name) {
    if (name == "stable") {
        return stable_profile();
    }
    if (name == "unstable") {
        return unstable_profile();
    }
    throw ParameterError("unknown cell profile '" + std::string(name) + "'");
}

CellParams draw_params(const CellProfile& profile, std::mt19937_64& rng) {
    const auto& s = profile.spread;
    CellParams p = profile.mean;
    p.v_form_th *= lognormal_factor(rng, s.threshold);
    p.v_set_th *= lognormal_factor(rng, s.threshold);
    p.v_reset_th *= lognormal_factor(rng, s.threshold);
    p.g_max *= lognormal_factor(rng, s.conductance);
    p.g_min *= lognormal_factor(rng, s.conductance);
    p.alpha_set *= lognormal_factor(rng, s.rate);
    p.alpha_reset *= lognormal_factor(rng, s.rate);
    p.disturb_set *= lognormal_factor(rng, s.rate);
    p.disturb_reset *= lognormal_factor(rng, s.rate);
    const double n = static_cast<double>(p.n_cmax) * lognormal_factor(rng, s.endurance);
    p.n_cmax = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(n)));
    p.validate();
    return p;
}

void PulseSpec::validate() const {
    if (!(duration > 0.0)) {
        throw ParameterError("pulse duration must be > 0");
    }
    if (std::abs(v_wl) > kMaxPulseVolts || std::abs(v_bl) > kMaxPulseVolts) {
        throw ParameterError("pulse amplitude exceeds front-end full scale");
    }
}

Cell::Cell(const CellParams& params, std::uint64_t seed) : params_(params), rng_(seed) {
    params_.validate();
}

double Cell::hrs_floor() const {
    const auto& p = params_;
    const double wear =
        std::min(static_cast<double>(resets_) / static_cast<double>(p.n_cmax), 1.0);
    return p.g_min * (1.0 + p.kappa * wear * (p.g_max / p.g_min - 1.0));
}

double Cell::conductance_at(double x) const {
    if (phase_ == Phase::Pristine) {
        return params_.g_min;
    }
    const double floor = hrs_floor();
    return floor + x * (params_.g_max - floor);
}

double Cell::conductance() const { return conductance_at(x_); }

double Cell::compliance_cap(double v_gate) const {
    const double g_cap = params_.transistor.compliance(v_gate) / params_.v_hold;
    const double floor = hrs_floor();
    if (params_.g_max <= floor) {
        return 1.0;
    }
    return clamp01((g_cap - floor) / (params_.g_max - floor));
}

void Cell::perturb() {
    if (params_.sigma_program > 0.0) {
        std::normal_distribution<double> n(0.0, params_.sigma_program);
        x_ += n(rng_);
    }
    x_ = clamp01(x_);
}

double Cell::ideal_current(double v_read, double v_gate) const {
    const double limit = params_.transistor.compliance(v_gate);
    const double magnitude = std::min(std::abs(v_read) * conductance(), limit);
    return v_read < 0.0 ? -magnitude : magnitude;
}

double Cell::floor_current(double v_read, double v_gate) const {
    const double g = phase_ == Phase::Pristine ? params_.g_min : hrs_floor();
    return std::min(std::abs(v_read) * g, params_.transistor.compliance(v_gate));
}

PulseOutcome Cell::apply_pulse(const PulseSpec& pulse) {
    pulse.validate();
    const auto& p = params_;
    const double v = pulse.v_cell();
    const double x_before = phase_ == Phase::Pristine ? 0.0 : x_;

    // Gate off: the memristor is disconnected and sees no current.
    if (p.transistor.compliance(pulse.v_gate) <= 0.0) {
        return {};
    }

    bool changed = false;
    if (phase_ == Phase::Pristine) {
        if (v >= p.v_form_th) {
            phase_ = Phase::Formed;
            std::uniform_real_distribution<double> init(0.8, 1.0);
            x_ = std::min(init(rng_), compliance_cap(pulse.v_gate));
            armed_ = true;
            changed = true;
        }
    } else if (v > p.v_set_th) {
        const double grown = x_ + p.alpha_set * (1.0 - x_) * (v - p.v_set_th) * pulse.duration;
        x_ = std::min(clamp01(grown), std::max(x_, compliance_cap(pulse.v_gate)));
        armed_ = true;
        changed = true;
    } else if (-v > p.v_reset_th) {
        x_ = clamp01(x_ - p.alpha_reset * x_ * (-v - p.v_reset_th) * pulse.duration);
        if (armed_) {
            ++resets_;
            armed_ = false;
        }
        changed = true;
    }
    if (changed) {
        perturb();
    }

    const double after = phase_ == Phase::Pristine ? 0.0 : x_;
    return {after - x_before, ideal_current(v, pulse.v_gate)};
}

double Cell::sense_current(double v_read, double v_gate) {
    if (std::abs(v_read) > kMaxPulseVolts) {
        throw ParameterError("read voltage exceeds front-end full scale");
    }
    const auto& p = params_;
    if (v_gate <= p.transistor.v_th) {
        return 0.0;
    }

    if (phase_ == Phase::Formed && v_read != 0.0) {
        const double rate = v_read > 0.0 ? p.disturb_set : p.disturb_reset;
        if (rate > 0.0) {
            constexpr double s = kDisturbSpread;
            std::lognormal_distribution<double> spread(-0.5 * s * s, s);
            const double step =
                std::min(rate * std::abs(v_read) * kReadExposureSeconds * spread(rng_), 1.0);
            x_ = clamp01(v_read > 0.0 ? x_ + step * (1.0 - x_) : x_ - step * x_);
        }
    }

    double current = ideal_current(v_read, v_gate);
    const double sigma = p.read_sigma(v_read);
    if (sigma > 0.0 && current != 0.0) {
        std::normal_distribution<double> eps(0.0, sigma);
        current *= 1.0 + eps(rng_);
    }
    return current;
}

} // namespace memrig::device
