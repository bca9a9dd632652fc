#include "memrig/chip.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "memrig/error.hpp"

namespace memrig::chip {

namespace {

using nlohmann::json;

constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kCellStream = 2;
constexpr std::uint64_t kFrontendStream = 3;

double* field(device::CellParams& p, const std::string& name) {
    static const std::map<std::string, double device::CellParams::*> table = {
        {"v_form_th", &device::CellParams::v_form_th},
        {"v_set_th", &device::CellParams::v_set_th},
        {"v_reset_th", &device::CellParams::v_reset_th},
        {"g_max", &device::CellParams::g_max},
        {"g_min", &device::CellParams::g_min},
        {"alpha_set", &device::CellParams::alpha_set},
        {"alpha_reset", &device::CellParams::alpha_reset},
        {"sigma_program", &device::CellParams::sigma_program},
        {"sigma0", &device::CellParams::sigma0},
        {"sigma1", &device::CellParams::sigma1},
        {"disturb_set", &device::CellParams::disturb_set},
        {"disturb_reset", &device::CellParams::disturb_reset},
        {"kappa", &device::CellParams::kappa},
        {"v_hold", &device::CellParams::v_hold},
    };
    if (name == "transistor_v_th") {
        return &p.transistor.v_th;
    }
    if (name == "transistor_g_m") {
        return &p.transistor.g_m;
    }
    const auto it = table.find(name);
    return it == table.end() ? nullptr : &(p.*(it->second));
}

CellOverride parse_override(const json& j) {
    CellOverride o;
    for (const auto& [key, value] : j.items()) {
        if (key == "sl") {
            o.sl = value.get<int>();
        } else if (key == "bl") {
            o.bl = value.get<int>();
        } else if (key == "profile") {
            o.profile = value.get<std::string>();
            device::profile_by_name(*o.profile);
        } else if (key == "d2d") {
            o.d2d = value.get<bool>();
        } else if (key == "noise") {
            o.noise = value.get<bool>();
        } else if (key == "resistor_ohms") {
            o.resistor_ohms = value.get<double>();
            if (!(*o.resistor_ohms > 0.0)) {
                throw ParameterError("resistor_ohms must be > 0");
            }
        } else {
            const auto& names = param_names();
            if (std::find(names.begin(), names.end(), key) == names.end()) {
                throw ParameterError("unknown cell override field '" + key + "'");
            }
            o.params[key] = value.get<double>();
        }
    }
    frontend::CrossbarFixture::check_address(o.sl, o.bl);
    return o;
}

} // namespace

const std::vector<std::string>& param_names() {
    static const std::vector<std::string> names = {
        "v_form_th",     "v_set_th",   "v_reset_th",  "g_max",           "g_min",
        "alpha_set",     "alpha_reset", "sigma_program", "sigma0",        "sigma1",
        "disturb_set",   "disturb_reset", "n_cmax",    "kappa",           "v_hold",
        "transistor_v_th", "transistor_g_m"};
    return names;
}

void set_param(device::CellParams& params, const std::string& name, double value) {
    if (name == "n_cmax") {
        if (!(value >= 1.0)) {
            throw ParameterError("n_cmax must be >= 1");
        }
        params.n_cmax = static_cast<std::uint64_t>(value);
        return;
    }
    double* f = field(params, name);
    if (f == nullptr) {
        throw ParameterError("unknown cell parameter '" + name + "'");
    }
    *f = value;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ stream) ^ index);
}

ChipProfile ChipProfile::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("chip profile is not valid JSON: ") + e.what());
    }
    ChipProfile chip;
    try {
        chip.rows = j.value("rows", chip.rows);
        chip.cols = j.value("cols", chip.cols);
        chip.seed = j.value("seed", chip.seed);
        chip.default_profile = j.value("default_profile", chip.default_profile);
        if (j.contains("overrides")) {
            for (const auto& o : j.at("overrides")) {
                chip.overrides.push_back(parse_override(o));
            }
        }
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed chip profile: ") + e.what());
    }
    if (chip.rows != frontend::kRows || chip.cols != frontend::kCols) {
        throw ParameterError("only the 12x7 pseudo crossbar is supported");
    }
    device::profile_by_name(chip.default_profile);
    return chip;
}

ChipProfile ChipProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open chip profile " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ChipProfile::dump() const {
    json j;
    j["rows"] = rows;
    j["cols"] = cols;
    j["seed"] = seed;
    j["default_profile"] = default_profile;
    j["overrides"] = json::array();
    for (const auto& o : overrides) {
        json e;
        e["sl"] = o.sl;
        e["bl"] = o.bl;
        if (o.profile) {
            e["profile"] = *o.profile;
        }
        if (!o.d2d) {
            e["d2d"] = false;
        }
        if (!o.noise) {
            e["noise"] = false;
        }
        if (o.resistor_ohms) {
            e["resistor_ohms"] = *o.resistor_ohms;
        }
        for (const auto& [k, v] : o.params) {
            e[k] = v;
        }
        j["overrides"].push_back(e);
    }
    return j.dump(2);
}

frontend::CrossbarFixture build_fixture(const ChipProfile& chip) {
    std::vector<frontend::Device> devices;
    devices.reserve(frontend::kRows * frontend::kCols);
    for (int sl = 0; sl < frontend::kRows; ++sl) {
        for (int bl = 0; bl < frontend::kCols; ++bl) {
            const auto index = static_cast<std::uint64_t>(sl * frontend::kCols + bl);
            const CellOverride* o = nullptr;
            for (const auto& candidate : chip.overrides) {
                if (candidate.sl == sl && candidate.bl == bl) {
                    o = &candidate;
                }
            }
            if (o != nullptr && o->resistor_ohms) {
                devices.emplace_back(frontend::IdealResistor{*o->resistor_ohms});
                continue;
            }

            const auto profile =
                device::profile_by_name(o != nullptr && o->profile ? *o->profile
                                                                   : chip.default_profile);
            std::mt19937_64 draw(derive_seed(chip.seed, kParamStream, index));
            device::CellParams params =
                (o == nullptr || o->d2d) ? device::draw_params(profile, draw) : profile.mean;
            if (o != nullptr) {
                if (!o->noise) {
                    params.sigma_program = 0.0;
                    params.sigma0 = 0.0;
                    params.sigma1 = 0.0;
                    params.disturb_set = 0.0;
                    params.disturb_reset = 0.0;
                }
                for (const auto& [name, value] : o->params) {
                    set_param(params, name, value);
                }
            }
            devices.emplace_back(std::in_place_type<device::Cell>, params,
                                 derive_seed(chip.seed, kCellStream, index));
        }
    }

    std::mt19937_64 fe(derive_seed(chip.seed, kFrontendStream, 0));
    std::uniform_real_distribution<double> gain(-frontend::kGainErrorBound,
                                                frontend::kGainErrorBound);
    return frontend::CrossbarFixture(std::move(devices), gain(fe));
}

} // namespace memrig::chip
