#pragma once

#include <stdexcept>
#include <string>

namespace headrouter {

// Every failure surfaced by the library carries one of these kinds so that
// callers (and the CLI exit-code mapping) can tell input problems apart from
// data that violates an invariant.
enum class ErrorKind {
    io,                // filesystem / stream failure
    bad_magic,         // tensor file does not start with the expected magic
    version_mismatch,  // tensor file written by an unsupported format version
    truncated,         // payload shorter than the header promises
    non_finite,        // NaN or Inf where finite values are required
    validation,        // shape mismatch or broken type invariant
    config,            // rejected configuration (bad ratio, k == 0, ...)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io: return "io";
        case ErrorKind::bad_magic: return "bad_magic";
        case ErrorKind::version_mismatch: return "version_mismatch";
        case ErrorKind::truncated: return "truncated";
        case ErrorKind::non_finite: return "non_finite";
        case ErrorKind::validation: return "validation";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace headrouter
