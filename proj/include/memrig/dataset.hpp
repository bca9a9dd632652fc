#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "memrig/client.hpp"

namespace memrig::host {

enum class State : std::uint8_t { Lrs, Hrs };

const char* to_string(State state);
State state_from_string(const std::string& text);

struct Record {
    int sl = 0;
    int bl = 0;
    std::string campaign;
    int voltage_mv = 0;
    int cycle = 0;
    int repeat = 0;
    int read_idx = 0;
    State state = State::Lrs;
    std::int64_t current_na = 0;

    bool operator==(const Record&) const = default;
};

/// Where a cell stopped accepting resets.
struct BrokenCell {
    CellAddress cell;
    std::string campaign;
    int voltage_mv = 0;
    int cycle = 0;
    int repeat = 0;

    bool operator==(const BrokenCell&) const = default;
};

/// Append-only measurement table. Campaign coordinates are unique per cell.
class Dataset {
public:
    /// Throws ParameterError when the coordinates already exist.
    void append(Record record);
    void append(const Dataset& other);

    const std::vector<Record>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::vector<BrokenCell> broken;
    /// Cells left out because they had broken earlier.
    std::vector<CellAddress> skipped;

    bool operator==(const Dataset& other) const { return records_ == other.records_; }

private:
    using Key = std::tuple<int, int, std::string, int, int, int, int, State>;
    std::vector<Record> records_;
    std::set<Key> keys_;
};

inline constexpr const char* kCsvHeader =
    "cell_sl,cell_bl,campaign,voltage_mv,cycle,repeat,read_idx,state,current_na";

/// Throws ParameterError on an empty dataset.
std::string to_csv(const Dataset& data);
Dataset from_csv(const std::string& text);

/// Throws ParameterError on an empty dataset, IoError when the file cannot be written.
void export_csv(const Dataset& data, const std::filesystem::path& path);
Dataset import_csv(const std::filesystem::path& path);

/// Broken cells plus campaign assumptions, as JSON.
std::string metadata_json(const Dataset& data);

} // namespace memrig::host
