#include "memrig/dataset.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "memrig/error.hpp"

namespace memrig::host {

const char* to_string(State state) { return state == State::Lrs ? "LRS" : "HRS"; }

State state_from_string(const std::string& text) {
    if (text == "LRS") {
        return State::Lrs;
    }
    if (text == "HRS") {
        return State::Hrs;
    }
    throw ParameterError("unknown state '" + text + "'");
}

void Dataset::append(Record record) {
    Key key{record.sl,    record.bl,     record.campaign, record.voltage_mv,
            record.cycle, record.repeat, record.read_idx, record.state};
    if (!keys_.insert(std::move(key)).second) {
        throw ParameterError("duplicate record coordinates");
    }
    records_.push_back(std::move(record));
}

void Dataset::append(const Dataset& other) {
    for (const auto& r : other.records_) {
        append(r);
    }
    broken.insert(broken.end(), other.broken.begin(), other.broken.end());
    skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
}

std::string to_csv(const Dataset& data) {
    if (data.empty()) {
        throw ParameterError("refusing to export an empty dataset");
    }
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : data.records()) {
        out << r.sl << ',' << r.bl << ',' << r.campaign << ',' << r.voltage_mv << ',' << r.cycle
            << ',' << r.repeat << ',' << r.read_idx << ',' << to_string(r.state) << ','
            << r.current_na << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

long long to_int(const std::string& text, std::size_t line_no) {
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ParameterError("line " + std::to_string(line_no) + ": not an integer '" + text + "'");
    }
    return value;
}

} // namespace

Dataset from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ParameterError("missing or unexpected CSV header");
    }
    Dataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 9) {
            throw ParameterError("line " + std::to_string(line_no) + ": expected 9 fields");
        }
        Record r;
        r.sl = static_cast<int>(to_int(f[0], line_no));
        r.bl = static_cast<int>(to_int(f[1], line_no));
        r.campaign = f[2];
        r.voltage_mv = static_cast<int>(to_int(f[3], line_no));
        r.cycle = static_cast<int>(to_int(f[4], line_no));
        r.repeat = static_cast<int>(to_int(f[5], line_no));
        r.read_idx = static_cast<int>(to_int(f[6], line_no));
        r.state = state_from_string(f[7]);
        r.current_na = to_int(f[8], line_no);
        data.append(std::move(r));
    }
    return data;
}

void export_csv(const Dataset& data, const std::filesystem::path& path) {
    const std::string text = to_csv(data);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Dataset import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

std::string metadata_json(const Dataset& data) {
    nlohmann::json j;
    j["records"] = data.size();
    j["forming"] = "once per cell, before its first campaign";
    j["broken_cells"] = nlohmann::json::array();
    for (const auto& b : data.broken) {
        j["broken_cells"].push_back({{"sl", b.cell.sl},
                                     {"bl", b.cell.bl},
                                     {"campaign", b.campaign},
                                     {"voltage_mv", b.voltage_mv},
                                     {"cycle", b.cycle},
                                     {"repeat", b.repeat}});
    }
    j["skipped_cells"] = nlohmann::json::array();
    for (const auto& c : data.skipped) {
        j["skipped_cells"].push_back({{"sl", c.sl}, {"bl", c.bl}});
    }
    return j.dump(2);
}

} // namespace memrig::host
