#pragma once

#include <stdexcept>
#include <string>

namespace weierkern {

// Error kinds map 1:1 onto CLI exit codes: usage/parse -> 2,
// math domain -> 3, convergence -> 4.
enum class ErrorKind { usage, math_domain, convergence };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail)
        : std::runtime_error(detail), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    const char* kind_name() const {
        switch (kind_) {
            case ErrorKind::usage:       return "usage";
            case ErrorKind::math_domain: return "math_domain";
            case ErrorKind::convergence: return "convergence";
        }
        return "unknown";
    }

private:
    ErrorKind kind_;
};

// Parse errors carry the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(std::string detail, std::size_t offset)
        : Error(ErrorKind::usage, detail + " (offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

[[noreturn]] inline void throw_usage(const std::string& d) { throw Error(ErrorKind::usage, d); }
[[noreturn]] inline void throw_domain(const std::string& d) { throw Error(ErrorKind::math_domain, d); }
[[noreturn]] inline void throw_convergence(const std::string& d) { throw Error(ErrorKind::convergence, d); }

} // namespace weierkern
