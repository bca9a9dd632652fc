#pragma once

// In-process bench: firmware served on one end of a socket pair, client on the other.

#include <atomic>
#include <memory>
#include <thread>

#include "memrig/campaigns.hpp"
#include "memrig/chip.hpp"
#include "memrig/firmware.hpp"

namespace memrig::testing {

class Bench {
public:
    explicit Bench(const chip::ChipProfile& chip)
        : fw_(std::make_unique<firmware::Firmware>(chip::build_fixture(chip))) {
        fw_->setup();
        auto [a, b] = transport::socket_pair();
        server_end_ = std::move(b);
        client_ = std::make_unique<host::Client>(std::move(a));
        thread_ = std::thread([this] {
            firmware::serve(*fw_, server_end_.get(), server_end_.get(), stop_);
        });
    }

    Bench(const Bench&) = delete;
    Bench& operator=(const Bench&) = delete;

    ~Bench() {
        stop_.store(true);
        thread_.join();
    }

    host::Client& client() { return *client_; }
    firmware::Firmware& firmware() { return *fw_; }

private:
    std::unique_ptr<firmware::Firmware> fw_;
    transport::Fd server_end_;
    std::unique_ptr<host::Client> client_;
    std::atomic<bool> stop_{false};
    std::thread thread_;
};

inline chip::ChipProfile chip_with(std::uint64_t seed, const std::string& profile = "stable") {
    chip::ChipProfile c;
    c.seed = seed;
    c.default_profile = profile;
    return c;
}

} // namespace memrig::testing
