// memrig-fw: firmware emulator serving one fixture over TCP or stdio.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "memrig/chip.hpp"
#include "memrig/error.hpp"
#include "memrig/firmware.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emulated crossbar control board"};
    std::string listen;
    bool use_stdio = false;
    std::string chip_path;
    std::optional<std::uint64_t> seed;
    auto* listen_opt = app.add_option("--listen", listen, "host:port to listen on (port 0 picks one)");
    auto* stdio_opt = app.add_flag("--stdio", use_stdio, "serve stdin/stdout instead of a socket");
    listen_opt->excludes(stdio_opt);
    app.add_option("--chip", chip_path, "chip profile JSON")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "overrides the chip profile seed");
    CLI11_PARSE(app, argc, argv);

    if (listen.empty() && !use_stdio) {
        std::cerr << "one of --listen or --stdio is required\n";
        return 2;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::signal(SIGPIPE, SIG_IGN);

    try {
        memrig::chip::ChipProfile chip =
            chip_path.empty() ? memrig::chip::ChipProfile{} : memrig::chip::ChipProfile::load(chip_path);
        if (seed) {
            chip.seed = *seed;
        }
        memrig::firmware::Firmware fw(memrig::chip::build_fixture(chip));
        fw.setup();

        if (use_stdio) {
            std::cerr << "memrig-fw: serving stdio" << std::endl;
            memrig::firmware::serve(fw, 0, 1, g_stop);
        } else {
            const auto ep = memrig::transport::parse_endpoint(listen);
            auto listener = memrig::transport::listen_tcp(ep, 4);
            std::cout << "listening on " << ep.host << ':'
                      << memrig::transport::local_port(listener.get()) << std::endl;
            memrig::firmware::serve_listener(fw, listener.get(), g_stop);
        }
        std::cerr << "memrig-fw: " << fw.stats().requests << " requests, " << fw.stats().errors
                  << " errors" << std::endl;
    } catch (const std::exception& e) {
        std::cerr << "memrig-fw: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
