#pragma once

#include <stdexcept>
#include <string>

namespace loadcast {

/// Classifies every error the library raises. The CLI maps kinds onto
/// process exit codes: config/input -> 1, data-ish kinds -> 2, internal -> 3.
enum class ErrorKind {
    config,    ///< invalid configuration or option combination
    input,     ///< malformed caller-supplied input (wrong window length, ...)
    data,      ///< problem in a data file (CSV row, missing column, ...)
    domain,    ///< value outside a metric's mathematical domain
    shape,     ///< tensor dimension mismatch
    io,        ///< file not found / unreadable / unwritable
    version,   ///< unsupported checkpoint format version
    corrupt,   ///< checkpoint payload fails structural validation
    internal,  ///< broken invariant inside the library
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::input: return "input";
        case ErrorKind::data: return "data";
        case ErrorKind::domain: return "domain";
        case ErrorKind::shape: return "shape";
        case ErrorKind::io: return "io";
        case ErrorKind::version: return "version";
        case ErrorKind::corrupt: return "corrupt";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

namespace errors {

inline Error config(const std::string& msg) { return Error(ErrorKind::config, msg); }
inline Error input(const std::string& msg) { return Error(ErrorKind::input, msg); }
inline Error data(const std::string& msg) { return Error(ErrorKind::data, msg); }
inline Error domain(const std::string& msg) { return Error(ErrorKind::domain, msg); }
inline Error shape(const std::string& msg) { return Error(ErrorKind::shape, msg); }
inline Error io(const std::string& msg) { return Error(ErrorKind::io, msg); }
inline Error version(const std::string& msg) { return Error(ErrorKind::version, msg); }
inline Error corrupt(const std::string& msg) { return Error(ErrorKind::corrupt, msg); }
inline Error internal(const std::string& msg) { return Error(ErrorKind::internal, msg); }

}  // namespace errors

}  // namespace loadcast
