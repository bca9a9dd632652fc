#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memrig/dataset.hpp"
#include "memrig/stats.hpp"

namespace memrig::stats {

/// One CDF of |I| per (voltage, state), in order of first appearance.
std::vector<CdfSeries> cdf_series(const host::Dataset& data, const std::string& campaign = "c2c");

/// Boxes over repeats for every `every`-th read index of each burst, grouped
/// per (voltage, state). `voltage_mv` restricts to one read voltage.
std::vector<BoxGroup> read_disturb_boxes(const host::Dataset& data,
                                         std::optional<int> voltage_mv = std::nullopt,
                                         int every = 10);

std::string cdf_csv(const std::vector<CdfSeries>& series);
std::string box_csv(const std::vector<BoxGroup>& groups);

/// Label used for a (voltage, state) group, e.g. "+0.20 V LRS".
std::string group_label(int voltage_mv, host::State state);

} // namespace memrig::stats
