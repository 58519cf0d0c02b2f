#include "cartometry/error.hpp"

namespace carto {

std::string_view machine_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::duplicate_point: return "duplicate-point";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::degenerate_configuration: return "degenerate-configuration";
        case ErrorCode::non_invertible: return "non-invertible";
        case ErrorCode::domain_error: return "domain-error";
        case ErrorCode::not_found: return "not-found";
        case ErrorCode::uncalibrated_session: return "uncalibrated-session";
        case ErrorCode::incomplete_feature: return "incomplete-feature";
        case ErrorCode::schema_violation: return "schema-violation";
        case ErrorCode::unsupported_version: return "unsupported-version";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace carto
