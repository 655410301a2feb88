#pragma once

#include <stdexcept>
#include <string>

namespace projcond {

enum class ErrorCode {
    InvalidDimension,
    DimensionMismatch,
    RankDeficient,
    ConstraintViolated,
    NotSpd,
    InvalidK,
    InvalidChain,
    ThresholdViolated,
    OutsideExpansionRegion,
    InvalidStructure,
    DegenerateH,
    GrowthConditionViolated,
    ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension: return "invalid-dimension";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::RankDeficient: return "rank-deficient";
        case ErrorCode::ConstraintViolated: return "constraint-violated";
        case ErrorCode::NotSpd: return "not-spd";
        case ErrorCode::InvalidK: return "invalid-k";
        case ErrorCode::InvalidChain: return "invalid-chain";
        case ErrorCode::ThresholdViolated: return "threshold-violated";
        case ErrorCode::OutsideExpansionRegion: return "outside-expansion-region";
        case ErrorCode::InvalidStructure: return "invalid-structure";
        case ErrorCode::DegenerateH: return "degenerate-h";
        case ErrorCode::GrowthConditionViolated: return "growth-condition-violated";
        case ErrorCode::ConfigInvalid: return "config-invalid";
    }
    return "unknown";
}

}  // namespace projcond
