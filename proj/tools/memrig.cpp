// memrig: host-side client, campaign runner and report generator.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "memrig/campaigns.hpp"
#include "memrig/error.hpp"
#include "memrig/report.hpp"

namespace fs = std::filesystem;
using namespace memrig;

namespace {

std::vector<host::CellAddress> parse_cells(const std::vector<std::string>& specs) {
    std::vector<host::CellAddress> cells;
    for (const auto& spec : specs) {
        if (spec == "all") {
            const auto all = host::all_cells();
            cells.insert(cells.end(), all.begin(), all.end());
            continue;
        }
        host::CellAddress a;
        char comma = 0;
        std::istringstream in(spec);
        if (!(in >> a.sl >> comma >> a.bl) || comma != ',' || !in.eof()) {
            throw ParameterError("cell must be 'all' or 'row,col', got '" + spec + "'");
        }
        a.validate();
        cells.push_back(a);
    }
    return cells;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path.string());
    }
}

void save(const host::Dataset& data, const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    host::export_csv(data, dir / (name + ".csv"));
    write_text(dir / (name + ".meta.json"), host::metadata_json(data) + "\n");
    std::cout << data.size() << " records -> " << (dir / (name + ".csv")).string() << '\n';
    for (const auto& b : data.broken) {
        std::cout << "cell " << b.cell.sl << ',' << b.cell.bl << " broken (" << b.campaign
                  << ", " << b.voltage_mv << " mV, cycle " << b.cycle << ", repeat " << b.repeat
                  << ")\n";
    }
}

host::Dataset load_input(const fs::path& in, const std::string& default_name) {
    return host::import_csv(fs::is_directory(in) ? in / (default_name + ".csv") : in);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crossbar test-bench host"};
    app.require_subcommand(1);

    auto* connect = app.add_subcommand("connect", "ping the firmware");
    std::string connect_ep;
    connect->add_option("endpoint", connect_ep, "host:port")->required();

    auto* run = app.add_subcommand("run", "run a measurement campaign");
    std::string campaign;
    std::string endpoint;
    std::vector<std::string> cell_specs{"all"};
    std::vector<int> voltages = host::default_voltages_mv();
    int cycles = 100;
    int reads = 100;
    int repeats = 50;
    int max_cycles = 10000;
    std::string out_dir = "out";
    run->add_option("campaign", campaign, "c2c | read-disturb | endurance")
        ->required()
        ->check(CLI::IsMember({"c2c", "read-disturb", "endurance"}));
    run->add_option("--endpoint", endpoint, "firmware host:port")->required();
    run->add_option("--cells", cell_specs, "'all' or row,col (repeatable)");
    run->add_option("--voltages", voltages, "read voltages in mV")->delimiter(',');
    run->add_option("--cycles", cycles, "c2c cycles per voltage")->check(CLI::NonNegativeNumber);
    run->add_option("--reads", reads, "reads per burst")->check(CLI::NonNegativeNumber);
    run->add_option("--repeats", repeats, "bursts per voltage")->check(CLI::NonNegativeNumber);
    run->add_option("--max-cycles", max_cycles, "endurance cycle limit")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "render statistics from a dataset");
    std::string kind;
    std::string in_path;
    std::string svg_path;
    std::string csv_path;
    std::optional<int> voltage;
    report->add_option("kind", kind, "cdf | boxplot")
        ->required()
        ->check(CLI::IsMember({"cdf", "boxplot"}));
    report->add_option("--in", in_path, "dataset CSV or campaign output directory")->required();
    report->add_option("--svg", svg_path, "SVG output file");
    report->add_option("--csv", csv_path, "statistics CSV output file");
    report->add_option("--voltage", voltage, "boxplot: only this read voltage (mV)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*connect) {
            host::ClientConfig cfg;
            cfg.endpoint = transport::parse_endpoint(connect_ep);
            auto client = host::Client::connect(cfg);
            const auto version = client.ping();
            std::cout << "firmware " << (version >> 8) << '.' << (version & 0xFF) << " at "
                      << connect_ep << '\n';
        } else if (*run) {
            host::ClientConfig cfg;
            cfg.endpoint = transport::parse_endpoint(endpoint);
            const auto cells = parse_cells(cell_specs);
            auto client = host::Client::connect(cfg);
            host::Campaigns bench(client);
            if (campaign == "c2c") {
                save(bench.run_c2c_campaign(cells, voltages, cycles), out_dir, campaign);
            } else if (campaign == "read-disturb") {
                save(bench.run_read_disturb_campaign(cells, voltages, reads, repeats), out_dir,
                     campaign);
            } else {
                host::Dataset all;
                for (const auto& cell : cells) {
                    const auto rep = bench.run_endurance_campaign(cell, max_cycles);
                    std::cout << "cell " << cell.sl << ',' << cell.bl << ": " << rep.cycles
                              << " cycles, "
                              << (rep.broken ? "broken at cycle " +
                                                   std::to_string(rep.n_cmax_observed.value_or(0))
                                             : std::string("not broken"))
                              << ", " << rep.soft_failures << " soft failures\n";
                    all.append(rep.data);
                }
                if (!all.empty()) {
                    save(all, out_dir, campaign);
                }
            }
        } else if (*report) {
            std::string svg;
            std::string csv;
            if (kind == "cdf") {
                const auto series = stats::cdf_series(load_input(in_path, "c2c"));
                svg = stats::render_cdf_svg(series);
                csv = stats::cdf_csv(series);
            } else {
                const auto groups =
                    stats::read_disturb_boxes(load_input(in_path, "read-disturb"), voltage);
                svg = stats::render_boxplot_svg(groups);
                csv = stats::box_csv(groups);
            }
            if (!svg_path.empty()) {
                write_text(svg_path, svg);
            }
            if (!csv_path.empty()) {
                write_text(csv_path, csv);
            }
            if (svg_path.empty() && csv_path.empty()) {
                std::cout << csv;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "memrig: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
