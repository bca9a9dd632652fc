#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memrig/frontend.hpp"

namespace memrig::chip {

/// Per-cell deviation from the chip default.
struct CellOverride {
    int sl = 0;
    int bl = 0;
    std::optional<std::string> profile;
    /// Exact CellParams values (by field name) replacing the per-cell draw.
    std::map<std::string, double> params;
    /// false: use the profile mean instead of a device-to-device draw.
    bool d2d = true;
    /// false: zero programming noise, read noise and read disturb.
    bool noise = true;
    /// Replaces the memristor by a fixed resistor.
    std::optional<double> resistor_ohms;
};

/// Chip description loaded by the firmware emulator.
///
/// {
///   "rows": 12, "cols": 7, "seed": 42,
///   "default_profile": "stable",
///   "overrides": [ {"sl": 1, "bl": 5, "profile": "unstable", "n_cmax": 100} ]
/// }
struct ChipProfile {
    int rows = frontend::kRows;
    int cols = frontend::kCols;
    std::uint64_t seed = 1;
    std::string default_profile = "stable";
    std::vector<CellOverride> overrides;

    static ChipProfile parse(const std::string& json_text);
    static ChipProfile load(const std::filesystem::path& path);
    std::string dump() const;
};

/// Names accepted as numeric override keys.
const std::vector<std::string>& param_names();

void set_param(device::CellParams& params, const std::string& name, double value);

/// SplitMix64-derived stream seed for (chip seed, stream tag, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Draws every cell and the front-end gain error from the chip seed.
frontend::CrossbarFixture build_fixture(const ChipProfile& chip);

} // namespace memrig::chip
