#pragma once

#include <stdexcept>
#include <string>

namespace pdham {

/// Exit-code aligned failure categories.
enum class ErrorKind {
    Falsified = 1,    // a required identity fails
    Input = 2,        // malformed input, unknown symbol, chart mismatch
    Unsupported = 3,  // outside the supported expression class
    Unknown = 4,      // symbolic indecision
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error falsified_error(const std::string& what) { return {ErrorKind::Falsified, what}; }
inline Error input_error(const std::string& what) { return {ErrorKind::Input, what}; }
inline Error unsupported_error(const std::string& what) { return {ErrorKind::Unsupported, what}; }
inline Error unknown_error(const std::string& what) { return {ErrorKind::Unknown, what}; }

}  // namespace pdham
