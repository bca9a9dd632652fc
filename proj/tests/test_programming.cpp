#include <random>

#include "doctest.h"
#include "memrig/error.hpp"
#include "memrig/programming.hpp"

using namespace memrig;
using namespace memrig::programming;
using frontend::CrossbarFixture;
using frontend::Device;

namespace {

device::CellParams step_cell(double v_set_th) {
    device::CellParams p;
    p.sigma_program = 0.0;
    p.sigma0 = 0.0;
    p.sigma1 = 0.0;
    p.disturb_set = 0.0;
    p.disturb_reset = 0.0;
    p.v_set_th = v_set_th;
    // One supra-threshold pulse drives the filament to the compliance cap.
    p.alpha_set = 1e9;
    return p;
}

CrossbarFixture fixture_with(const device::CellParams& p) {
    std::vector<Device> devices(frontend::kRows * frontend::kCols,
                                Device{frontend::IdealResistor{1e4}});
    devices[0] = Device{std::in_place_type<device::Cell>, p, 1};
    return CrossbarFixture(std::move(devices), 0.0);
}

void form_and_clear(CrossbarFixture& fx) {
    fx.drive_cell(0, 0, 3.0, 0.0, 1.8, 10e-6);
    fx.drive_cell(0, 0, 0.0, 2.0, 2.7, 10e-6);
}

} // namespace

TEST_CASE("set and reset defaults") {
    const auto s = set_defaults();
    CHECK(s.v_start == 0.5);
    CHECK(s.v_step == 0.1);
    CHECK(s.v_stop == 2.0);
    CHECK(s.v_gate_prog == 1.5);
    CHECK(s.i_target == 80e-6);
    CHECK(s.mode == Mode::Set);
    const auto r = reset_defaults();
    CHECK(r.v_start == 0.5);
    CHECK(r.v_step == 0.1);
    CHECK(r.v_stop == 2.0);
    CHECK(r.v_gate_prog == 2.7);
    CHECK(r.i_target == 5e-6);
    CHECK(r.mode == Mode::Reset);
    const auto f = form_defaults();
    CHECK(f.v_start == 2.0);
    CHECK(f.v_stop == 3.2);
    CHECK(f.v_gate_prog == 1.8);
    CHECK(s.v_verify == 0.2);
    CHECK(s.v_gate_read == 1.5);
    CHECK(s.t_pulse == 10e-6);
}

TEST_CASE("ramp length") {
    CHECK(set_defaults().ramp_length() == 16);
    CHECK(form_defaults().ramp_length() == 13);
    IspvaParams p;
    p.v_start = 1.0;
    p.v_stop = 1.0;
    CHECK(p.ramp_length() == 1);
    p.v_step = 0.3;
    p.v_stop = 1.8;
    CHECK(p.ramp_length() == 3);
}

TEST_CASE("parameter validation") {
    IspvaParams p;
    p.v_step = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.v_start = 2.1;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.t_pulse = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.i_target = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    auto fx = fixture_with(step_cell(1.25));
    CHECK_THROWS_AS(ispva(fx, 12, 0, set_defaults()), AddressError);
}

TEST_CASE("cell switching at 1.3 V takes nine pulses") {
    auto fx = fixture_with(step_cell(1.25));
    form_and_clear(fx);
    const auto r = ispva(fx, 0, 0, set_defaults());
    CHECK(r.status == Status::Ok);
    CHECK(r.pulses == 9);
    CHECK(r.final_voltage == doctest::Approx(1.3));
    CHECK(r.final_current >= 80e-6);
}

TEST_CASE("cell needing 2.5 V exhausts the ramp") {
    auto fx = fixture_with(step_cell(2.45));
    form_and_clear(fx);
    const auto r = ispva(fx, 0, 0, set_defaults());
    CHECK(r.status == Status::TargetNotReached);
    CHECK(r.pulses == 16);
    CHECK(r.final_voltage == doctest::Approx(2.0));
}

TEST_CASE("ramp amplitudes rise by exactly one step and stop at the target") {
    auto fx = fixture_with(step_cell(1.05));
    form_and_clear(fx);
    fx.enable_trace(true);
    fx.clear_trace();
    const auto r = ispva(fx, 0, 0, set_defaults());
    REQUIRE(r.status == Status::Ok);
    const auto& trace = fx.trace();
    REQUIRE(static_cast<int>(trace.size()) == r.pulses);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(trace[i].v_wl == doctest::Approx(0.5 + 0.1 * static_cast<double>(i)));
        CHECK(trace[i].v_bl == 0.0);
    }
}

TEST_CASE("reset drives the bit line") {
    auto fx = fixture_with(step_cell(0.6));
    fx.drive_cell(0, 0, 3.0, 0.0, 1.8, 10e-6);
    fx.enable_trace(true);
    const auto r = ispva(fx, 0, 0, reset_defaults());
    CHECK(r.status == Status::Ok);
    CHECK(r.final_current <= 5e-6);
    for (const auto& d : fx.trace()) {
        CHECK(d.v_wl == 0.0);
        CHECK(d.v_gate == 2.7);
    }
}

TEST_CASE("reset against a worn floor reports a broken cell") {
    auto p = step_cell(0.6);
    p.kappa = 1.0;
    p.n_cmax = 1;
    p.v_reset_th = 0.45;
    auto fx = fixture_with(p);
    fx.drive_cell(0, 0, 3.0, 0.0, 1.8, 10e-6);
    const auto r = ispva(fx, 0, 0, reset_defaults());
    CHECK(r.status == Status::CellBroken);
    CHECK(r.pulses == 1);
}

TEST_CASE("single pulse forming") {
    auto fx = fixture_with(step_cell(0.6));
    SinglePulseParams sp;
    sp.v_pulse = 0.0;
    auto r = single_pulse_form(fx, 0, 0, sp);
    CHECK(r.status == Status::TargetNotReached);
    CHECK(r.pulses == 1);
    CHECK(fx.cell(0, 0)->phase() == device::Phase::Pristine);

    sp.v_pulse = 2.0;
    r = single_pulse_form(fx, 0, 0, sp);
    CHECK(r.pulses == 1);
    CHECK(fx.cell(0, 0)->phase() == device::Phase::Formed);
    CHECK(r.status == Status::Ok);
}

TEST_CASE("incremental forming applies the whole ramp") {
    auto fx = fixture_with(step_cell(0.6));
    fx.enable_trace(true);
    auto p = set_defaults();
    p.mode = Mode::Form;
    auto r = incremental_form(fx, 0, 0, p);
    CHECK(r.pulses == 16);
    CHECK(fx.trace().size() == 16);
    CHECK(fx.cell(0, 0)->phase() == device::Phase::Formed);
    CHECK(r.status == Status::Ok);

    r = incremental_form(fx, 0, 0, p);
    CHECK(r.status == Status::Ok);
    CHECK(r.pulses == 16);
}

TEST_CASE("forming yield: program-and-verify, then incremental, then single pulse") {
    // Random population, ramp stopping inside the forming threshold spread.
    std::mt19937_64 rng(21);
    std::vector<device::CellParams> population;
    for (int i = 0; i < 200; ++i) {
        population.push_back(device::draw_params(device::stable_profile(), rng));
    }
    auto ramp = form_defaults();
    ramp.v_start = 1.0;
    ramp.v_stop = 1.6;
    SinglePulseParams single;
    single.v_pulse = ramp.v_stop;

    int ifv = 0;
    int inc = 0;
    int one = 0;
    for (const auto& p : population) {
        auto a = fixture_with(p);
        ifv += ispva(a, 0, 0, ramp).status == Status::Ok ? 1 : 0;
        auto b = fixture_with(p);
        inc += incremental_form(b, 0, 0, ramp).status == Status::Ok ? 1 : 0;
        auto c = fixture_with(p);
        one += single_pulse_form(c, 0, 0, single).status == Status::Ok ? 1 : 0;
    }
    CHECK(ifv >= inc);
    CHECK(inc >= one);
    CHECK(ifv > 0);
    CHECK(ifv < 200);
}

TEST_CASE("status names") {
    CHECK(std::string(to_string(Status::Ok)) == "OK");
    CHECK(std::string(to_string(Status::TargetNotReached)) == "TARGET_NOT_REACHED");
    CHECK(std::string(to_string(Status::CellBroken)) == "CELL_BROKEN");
}
