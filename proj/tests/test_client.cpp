#include <filesystem>

#include "doctest.h"
#include "harness.hpp"
#include "memrig/error.hpp"

using namespace memrig;
using namespace memrig::host;
using memrig::testing::Bench;
using memrig::testing::chip_with;

namespace {

Record rec(int sl, int bl, const std::string& campaign, int mv, int cycle, int repeat, int idx,
           State state, std::int64_t na) {
    return {sl, bl, campaign, mv, cycle, repeat, idx, state, na};
}

} // namespace

TEST_CASE("client-side address validation") {
    Bench bench(chip_with(2));
    CHECK_THROWS_AS(bench.client().read_cell({12, 0}, 0.2), AddressError);
    CHECK_THROWS_AS(bench.client().set_cell({0, -1}), AddressError);
    CHECK(bench.firmware().stats().requests == 0);
}

TEST_CASE("zero-volt read is zero") {
    Bench bench(chip_with(2));
    CHECK(bench.client().read_cell({0, 0}, 0.0) == 0.0);
}

TEST_CASE("program operations and status mapping") {
    Bench bench(chip_with(2));
    auto& c = bench.client();
    const CellAddress cell{4, 1};
    const auto f = c.form_cell(cell);
    CHECK(f.status == programming::Status::Ok);
    CHECK(f.final_current >= 80e-6);
    const auto r = c.reset_cell(cell);
    CHECK(r.status == programming::Status::Ok);
    CHECK(r.final_current <= 5e-6);
    CHECK(std::abs(c.read_cell(cell, -0.2)) < 10e-6);
    const auto s = c.set_cell(cell);
    CHECK(s.status == programming::Status::Ok);
    CHECK(c.read_cell(cell, 0.1) > 40e-6);
    CHECK(c.ping() == wire::kFirmwareVersion);
}

TEST_CASE("remote errors surface with their code") {
    Bench bench(chip_with(2));
    ProgramSettings bad;
    bad.v_gate = 5.5;
    try {
        bench.client().set_cell({0, 0}, bad);
        FAIL("expected a remote error");
    } catch (const RemoteError& e) {
        CHECK(e.code() == 3);
    }
}

TEST_CASE("dataset rejects duplicate coordinates") {
    Dataset d;
    d.append(rec(0, 0, "c2c", 100, 0, 0, 0, State::Lrs, 5));
    d.append(rec(0, 0, "c2c", 100, 0, 0, 0, State::Hrs, 5));
    CHECK_THROWS_AS(d.append(rec(0, 0, "c2c", 100, 0, 0, 0, State::Lrs, 7)), ParameterError);
    CHECK(d.size() == 2);
}

TEST_CASE("csv round trip") {
    Dataset d;
    d.append(rec(1, 5, "read-disturb", -200, 0, 3, 17, State::Hrs, -1234));
    d.append(rec(11, 6, "c2c", 300, 99, 0, 0, State::Lrs, 103456));
    const std::string text = to_csv(d);
    CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(text.find("1,5,read-disturb,-200,0,3,17,HRS,-1234\n") != std::string::npos);
    CHECK(from_csv(text) == d);

    const auto path = std::filesystem::temp_directory_path() / "memrig_client_test.csv";
    export_csv(d, path);
    CHECK(import_csv(path) == d);
    std::filesystem::remove(path);
}

TEST_CASE("csv errors") {
    CHECK_THROWS_AS(to_csv(Dataset{}), ParameterError);
    CHECK_THROWS_AS(export_csv(Dataset{}, "/tmp/never.csv"), ParameterError);
    CHECK_THROWS_AS(from_csv("wrong,header\n"), ParameterError);
    CHECK_THROWS_AS(from_csv(std::string(kCsvHeader) + "\n1,2,c2c,100,0,0,0,MAYBE,3\n"),
                    ParameterError);
    CHECK_THROWS_AS(import_csv("/nonexistent/memrig.csv"), IoError);
    Dataset d;
    d.append(rec(0, 0, "c2c", 100, 0, 0, 0, State::Lrs, 1));
    CHECK_THROWS_AS(export_csv(d, "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("c2c record count is cells x voltages x cycles x 2") {
    Bench bench(chip_with(6));
    Campaigns camp(bench.client());
    const std::vector<CellAddress> cells = {{0, 0}, {3, 4}};
    const std::vector<int> mv = {-100, 200, 300};
    const auto d = camp.run_c2c_campaign(cells, mv, 7);
    CHECK(d.size() == 2u * 3u * 7u * 2u);
    CHECK(d.broken.empty());
    for (const auto& r : d.records()) {
        CHECK(r.campaign == "c2c");
        CHECK(r.repeat == 0);
        CHECK(r.read_idx == 0);
        CHECK(r.cycle < 7);
        CHECK((r.voltage_mv < 0) == (r.current_na <= 0));
    }
}

TEST_CASE("read-disturb record count is cells x voltages x repeats x reads x 2") {
    Bench bench(chip_with(6));
    Campaigns camp(bench.client());
    const auto d = camp.run_read_disturb_campaign({{2, 2}}, {200, -200}, 5, 3);
    CHECK(d.size() == 1u * 2u * 3u * 5u * 2u);
    for (const auto& r : d.records()) {
        CHECK(r.campaign == "read-disturb");
        CHECK(r.cycle == 0);
        CHECK(r.read_idx < 5);
        CHECK(r.repeat < 3);
    }
}

TEST_CASE("1000 c2c cycles at one voltage export as 2001 lines") {
    Bench bench(chip_with(6));
    Campaigns camp(bench.client());
    const auto d = camp.run_c2c_campaign({{6, 3}}, {200}, 1000);
    REQUIRE(d.size() == 2000);
    const auto text = to_csv(d);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2001);
}

TEST_CASE("endurance bounds") {
    Bench bench(chip_with(6));
    Campaigns camp(bench.client());
    const auto none = camp.run_endurance_campaign({0, 1}, 0);
    CHECK(none.cycles == 0);
    CHECK_FALSE(none.broken);
    CHECK(none.data.empty());

    const auto some = camp.run_endurance_campaign({0, 1}, 25);
    CHECK(some.cycles == 25);
    CHECK_FALSE(some.broken);
    CHECK(some.data.size() == 50);
}

TEST_CASE("broken cells are skipped by later campaigns") {
    auto chip = chip::ChipProfile::parse(R"({"overrides": [
        {"sl": 1, "bl": 5, "n_cmax": 3, "kappa": 0.03, "d2d": false, "noise": false}]})");
    Bench bench(chip);
    Campaigns camp(bench.client());
    const auto e = camp.run_endurance_campaign({1, 5}, 50);
    CHECK(e.broken);
    REQUIRE(e.n_cmax_observed.has_value());
    // Floor current 0.4 uA * (1 + 0.03 * min(d/3, 1) * 499) first exceeds 5 uA at d = 3;
    // the preamble leaves d = 1 and every cycle adds one.
    CHECK(*e.n_cmax_observed == 2);
    CHECK(camp.is_broken({1, 5}));

    const auto d = camp.run_c2c_campaign({{1, 5}, {0, 0}}, {100}, 2);
    CHECK(d.size() == 4);
    REQUIRE(d.skipped.size() == 1);
    CHECK(d.skipped[0] == CellAddress{1, 5});
    CHECK(metadata_json(d).find("skipped_cells") != std::string::npos);
}

TEST_CASE("cell list and voltage defaults") {
    CHECK(all_cells().size() == 84);
    CHECK(all_cells().front() == CellAddress{0, 0});
    CHECK(all_cells().back() == CellAddress{11, 6});
    CHECK(default_voltages_mv() ==
          std::vector<int>{-300, -250, -200, -150, -100, 100, 150, 200, 250, 300});
}

TEST_CASE("state names") {
    CHECK(std::string(to_string(State::Lrs)) == "LRS");
    CHECK(state_from_string("HRS") == State::Hrs);
    CHECK_THROWS_AS(state_from_string("hrs"), ParameterError);
}
