// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace lks {

enum class ErrorKind {
    SizeMismatch,
    DimensionCap,
    NameClash,
    UnknownVariable,
    NullNormalizer,
    OverlappingVariables,
    RangeMismatch,
    NotSeparable,
    ZeroMarginal,
    SingularD,
    ImproperSystem,
    InvalidGenerator,
    InvalidInitial,
    DimMismatch,
    SingularT,
    BadH,
    NotUnitary,
    StageOutOfRange,
    NotAPartition,
    DegenerateInput,
    NotComplexShaped,
    SingularBoost,
    ParseError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::SizeMismatch:         return "SizeMismatch";
        case ErrorKind::DimensionCap:         return "DimensionCap";
        case ErrorKind::NameClash:            return "NameClash";
        case ErrorKind::UnknownVariable:      return "UnknownVariable";
        case ErrorKind::NullNormalizer:       return "NullNormalizer";
        case ErrorKind::OverlappingVariables: return "OverlappingVariables";
        case ErrorKind::RangeMismatch:        return "RangeMismatch";
        case ErrorKind::NotSeparable:         return "NotSeparable";
        case ErrorKind::ZeroMarginal:         return "ZeroMarginal";
        case ErrorKind::SingularD:            return "SingularD";
        case ErrorKind::ImproperSystem:       return "ImproperSystem";
        case ErrorKind::InvalidGenerator:     return "InvalidGenerator";
        case ErrorKind::InvalidInitial:       return "InvalidInitial";
        case ErrorKind::DimMismatch:          return "DimMismatch";
        case ErrorKind::SingularT:            return "SingularT";
        case ErrorKind::BadH:                 return "BadH";
        case ErrorKind::NotUnitary:           return "NotUnitary";
        case ErrorKind::StageOutOfRange:      return "StageOutOfRange";
        case ErrorKind::NotAPartition:        return "NotAPartition";
        case ErrorKind::DegenerateInput:      return "DegenerateInput";
        case ErrorKind::NotComplexShaped:     return "NotComplexShaped";
        case ErrorKind::SingularBoost:        return "SingularBoost";
        case ErrorKind::ParseError:           return "ParseError";
    }
    return "Unknown";
}

// All library failures throw this one exception type; `kind` is the stable,
// testable identity of the failure and `what()` carries the diagnostic.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace lks
