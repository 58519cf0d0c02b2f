#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carto {

enum class ErrorCode {
    invalid_input,
    duplicate_point,
    insufficient_data,
    degenerate_configuration,
    non_invertible,
    domain_error,
    not_found,
    uncalibrated_session,
    incomplete_feature,
    schema_violation,
    unsupported_version,
    io_error,
};

// Stable machine-readable name, e.g. "degenerate-configuration".
std::string_view machine_code(ErrorCode code) noexcept;

/// Every failure raised by the library. `field()` carries a JSON-pointer
/// style location for schema violations and is empty otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

}  // namespace carto
