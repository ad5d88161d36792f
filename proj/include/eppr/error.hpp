#pragma once

#include <stdexcept>
#include <string>

namespace eppr {

enum class ErrorCode {
    invalid_configuration,
    invalid_input,
    domain,
    unsupported,
    shape,
    file_not_found,
    io,
    missing_target,
    no_usable_rows,
    non_numeric_column,
    parse,
    undefined_metric,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable category alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace eppr
