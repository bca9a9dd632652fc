#include "memrig/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "memrig/error.hpp"

namespace memrig::stats {

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

} // namespace

std::string group_label(int voltage_mv, host::State state) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.2f V %s", voltage_mv * 1e-3, host::to_string(state));
    return buf;
}

std::vector<CdfSeries> cdf_series(const host::Dataset& data, const std::string& campaign) {
    std::vector<std::pair<int, host::State>> order;
    std::map<std::pair<int, host::State>, std::vector<double>> groups;
    for (const auto& r : data.records()) {
        if (r.campaign != campaign) {
            continue;
        }
        const auto key = std::make_pair(r.voltage_mv, r.state);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        it->second.push_back(std::abs(static_cast<double>(r.current_na)) * 1e-9);
    }
    if (order.empty()) {
        throw ParameterError("no '" + campaign + "' records to plot");
    }
    std::vector<CdfSeries> out;
    for (const auto& key : order) {
        out.push_back({group_label(key.first, key.second), empirical_cdf(groups[key])});
    }
    return out;
}

std::vector<BoxGroup> read_disturb_boxes(const host::Dataset& data, std::optional<int> voltage_mv,
                                         int every) {
    if (every < 1) {
        throw ParameterError("box spacing must be >= 1");
    }
    struct Key {
        int mv;
        host::State state;
        int read_idx;
        auto operator<=>(const Key&) const = default;
    };
    std::vector<std::pair<int, host::State>> series_order;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : data.records()) {
        if (r.campaign != "read-disturb" || r.read_idx % every != 0) {
            continue;
        }
        if (voltage_mv && r.voltage_mv != *voltage_mv) {
            continue;
        }
        const auto series = std::make_pair(r.voltage_mv, r.state);
        if (std::find(series_order.begin(), series_order.end(), series) == series_order.end()) {
            series_order.push_back(series);
        }
        groups[{r.voltage_mv, r.state, r.read_idx}].push_back(
            static_cast<double>(r.current_na) * 1e-9);
    }
    if (groups.empty()) {
        throw ParameterError("no read-disturb records to plot");
    }
    std::vector<BoxGroup> out;
    for (const auto& [mv, state] : series_order) {
        for (const auto& [key, samples] : groups) {
            if (key.mv == mv && key.state == state) {
                out.push_back({std::to_string(key.read_idx), group_label(mv, state),
                               box_stats(samples)});
            }
        }
    }
    return out;
}

std::string cdf_csv(const std::vector<CdfSeries>& series) {
    std::ostringstream out;
    out << "series,current_a,p\n";
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            out << s.label << ',' << sci(p.value) << ',' << sci(p.p) << '\n';
        }
    }
    return out.str();
}

std::string box_csv(const std::vector<BoxGroup>& groups) {
    std::ostringstream out;
    out << "series,read_idx,n,w2_5,q25,median,q75,w97_5,mean\n";
    for (const auto& g : groups) {
        const auto& b = g.box;
        out << g.series << ',' << g.label << ',' << b.n << ',' << sci(b.w2_5) << ','
            << sci(b.q25) << ',' << sci(b.median) << ',' << sci(b.q75) << ',' << sci(b.w97_5)
            << ',' << sci(b.mean) << '\n';
    }
    return out.str();
}

} // namespace memrig::stats
