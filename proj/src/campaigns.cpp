#include "memrig/campaigns.hpp"

#include <cmath>

#include "memrig/error.hpp"
#include "memrig/frontend.hpp"

namespace memrig::host {

namespace {

using programming::Status;

constexpr const char* kC2c = "c2c";
constexpr const char* kReadDisturb = "read-disturb";
constexpr const char* kEndurance = "endurance";

std::int64_t to_na(double amps) { return std::llround(amps * 1e9); }

void check_counts(const std::vector<int>& voltages_mv, int a, int b) {
    if (a < 0 || b < 0) {
        throw ParameterError("campaign counts must be >= 0");
    }
    for (int mv : voltages_mv) {
        if (mv < -5000 || mv > 5000) {
            throw ParameterError("read voltage " + std::to_string(mv) + " mV outside +-5000");
        }
    }
}

} // namespace

const std::vector<int>& default_voltages_mv() {
    static const std::vector<int> v = {-300, -250, -200, -150, -100, 100, 150, 200, 250, 300};
    return v;
}

std::vector<CellAddress> all_cells() {
    std::vector<CellAddress> cells;
    for (int sl = 0; sl < frontend::kRows; ++sl) {
        for (int bl = 0; bl < frontend::kCols; ++bl) {
            cells.push_back({sl, bl});
        }
    }
    return cells;
}

bool Campaigns::prepare(CellAddress cell) {
    cell.validate();
    if (is_broken(cell)) {
        return false;
    }
    if (prepared_.count(cell) != 0) {
        return true;
    }
    client_.form_cell(cell);
    if (client_.reset_cell(cell).status == Status::CellBroken) {
        broken_.insert(cell);
        return false;
    }
    client_.set_cell(cell);
    prepared_.insert(cell);
    return true;
}

Dataset Campaigns::run_c2c_campaign(const std::vector<CellAddress>& cells,
                                    const std::vector<int>& voltages_mv, int cycles) {
    check_counts(voltages_mv, cycles, 0);
    Dataset data;
    for (const CellAddress cell : cells) {
        if (!prepare(cell)) {
            data.skipped.push_back(cell);
            continue;
        }
        for (const int mv : voltages_mv) {
            if (is_broken(cell)) {
                break;
            }
            const double v = mv * 1e-3;
            for (int c = 0; c < cycles; ++c) {
                client_.set_cell(cell);
                data.append({cell.sl, cell.bl, kC2c, mv, c, 0, 0, State::Lrs,
                             to_na(client_.read_cell(cell, v))});
                if (client_.reset_cell(cell).status == Status::CellBroken) {
                    broken_.insert(cell);
                    data.broken.push_back({cell, kC2c, mv, c, 0});
                    break;
                }
                data.append({cell.sl, cell.bl, kC2c, mv, c, 0, 0, State::Hrs,
                             to_na(client_.read_cell(cell, v))});
            }
        }
    }
    return data;
}

Dataset Campaigns::run_read_disturb_campaign(const std::vector<CellAddress>& cells,
                                             const std::vector<int>& voltages_mv, int reads,
                                             int repeats) {
    check_counts(voltages_mv, reads, repeats);
    Dataset data;
    for (const CellAddress cell : cells) {
        if (!prepare(cell)) {
            data.skipped.push_back(cell);
            continue;
        }
        for (const int mv : voltages_mv) {
            if (is_broken(cell)) {
                break;
            }
            const double v = mv * 1e-3;
            for (int r = 0; r < repeats; ++r) {
                client_.set_cell(cell);
                for (int i = 0; i < reads; ++i) {
                    data.append({cell.sl, cell.bl, kReadDisturb, mv, 0, r, i, State::Lrs,
                                 to_na(client_.read_cell(cell, v))});
                }
                if (client_.reset_cell(cell).status == Status::CellBroken) {
                    broken_.insert(cell);
                    data.broken.push_back({cell, kReadDisturb, mv, 0, r});
                    break;
                }
                for (int i = 0; i < reads; ++i) {
                    data.append({cell.sl, cell.bl, kReadDisturb, mv, 0, r, i, State::Hrs,
                                 to_na(client_.read_cell(cell, v))});
                }
            }
        }
    }
    return data;
}

EnduranceReport Campaigns::run_endurance_campaign(CellAddress cell, int max_cycles) {
    if (max_cycles < 0) {
        throw ParameterError("max_cycles must be >= 0");
    }
    EnduranceReport report;
    if (max_cycles == 0) {
        return report;
    }
    const int verify_mv = static_cast<int>(std::lround(programming::kVerifyVolts * 1e3));
    if (!prepare(cell)) {
        report.broken = true;
        report.data.skipped.push_back(cell);
        return report;
    }
    for (int c = 1; c <= max_cycles; ++c) {
        const auto set = client_.set_cell(cell);
        report.soft_failures += set.status == Status::TargetNotReached ? 1 : 0;
        report.data.append({cell.sl, cell.bl, kEndurance, verify_mv, c, 0, 0, State::Lrs,
                            to_na(set.final_current)});
        const auto reset = client_.reset_cell(cell);
        report.data.append({cell.sl, cell.bl, kEndurance, verify_mv, c, 0, 0, State::Hrs,
                            to_na(reset.final_current)});
        if (reset.status == Status::CellBroken) {
            broken_.insert(cell);
            report.broken = true;
            report.n_cmax_observed = c;
            report.data.broken.push_back({cell, kEndurance, verify_mv, c, 0});
            return report;
        }
        report.soft_failures += reset.status == Status::TargetNotReached ? 1 : 0;
        report.cycles = c;
    }
    return report;
}

} // namespace memrig::host
