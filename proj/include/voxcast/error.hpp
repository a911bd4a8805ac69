#pragma once

#include <stdexcept>
#include <string>

namespace voxcast {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem / OS level failures.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io: " + msg) {}
};

/// Malformed input files (bad magic, unparsable text, bad field).
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error("format: " + msg) {}
};

/// Data that claims to be complete but fails verification.
struct CorruptionError : Error {
    explicit CorruptionError(const std::string& msg) : Error("corruption: " + msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

}  // namespace voxcast
