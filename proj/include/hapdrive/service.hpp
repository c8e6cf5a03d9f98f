#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hapdrive/skillnet.hpp"

namespace hapdrive::service {

inline constexpr int kProtocolVersion = 1;

struct ServiceOptions {
    const skillnet::SkillNet* net_s = nullptr;  // needed for method G
    const skillnet::SkillNet* net_a = nullptr;
    double default_duration_cap = 360.0;
};

/// WebSocket live-drive server, one simulation session per connection.
/// Message schema: docs/protocol.md.
class Server {
public:
    Server(const std::string& address, std::uint16_t port, ServiceOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Port actually bound (useful with port 0).
    std::uint16_t port() const;

    /// Serves until stop() is called.
    void run();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hapdrive::service
