#pragma once

#include <stdexcept>
#include <string>

namespace qkd {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error("protocol: " + msg) {}
};

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg) : std::runtime_error("transport: " + msg) {}
};

// Requested QBER is outside what the configured code set can reconcile.
struct UnsupportedRateError : std::runtime_error {
    explicit UnsupportedRateError(const std::string& msg)
        : std::runtime_error("rate adaptation: " + msg) {}
};

}  // namespace qkd
