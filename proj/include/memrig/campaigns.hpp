#pragma once

#include <optional>
#include <set>
#include <vector>

#include "memrig/client.hpp"
#include "memrig/dataset.hpp"

namespace memrig::host {

/// -0.3, -0.25, -0.2, -0.15, -0.1, +0.1, +0.15, +0.2, +0.25, +0.3 V.
const std::vector<int>& default_voltages_mv();

/// Every cell of the 12x7 array, row-major.
std::vector<CellAddress> all_cells();

struct EnduranceReport {
    int cycles = 0;                     // completed set/reset cycles
    std::optional<int> n_cmax_observed; // 1-based cycle whose reset reported CELL_BROKEN
    bool broken = false;
    int soft_failures = 0;              // TARGET_NOT_REACHED results
    Dataset data;
};

/// Campaign driver. Remembers which cells went through the forming-reset-set
/// preamble and which broke, for the lifetime of the object.
class Campaigns {
public:
    explicit Campaigns(Client& client) : client_(client) {}

    /// Runs the preamble once per cell. Returns false when the cell is broken.
    bool prepare(CellAddress cell);

    /// Per voltage and cycle: set, read, reset, read.
    Dataset run_c2c_campaign(const std::vector<CellAddress>& cells,
                             const std::vector<int>& voltages_mv, int cycles = 100);

    /// Per voltage and repeat: set, `reads` reads, reset, `reads` reads.
    Dataset run_read_disturb_campaign(const std::vector<CellAddress>& cells,
                                      const std::vector<int>& voltages_mv, int reads = 100,
                                      int repeats = 50);

    /// Alternates set/reset until reset reports CELL_BROKEN or max_cycles is reached.
    EnduranceReport run_endurance_campaign(CellAddress cell, int max_cycles);

    bool is_broken(CellAddress cell) const { return broken_.count(cell) != 0; }

private:
    Client& client_;
    std::set<CellAddress> prepared_;
    std::set<CellAddress> broken_;
};

} // namespace memrig::host
