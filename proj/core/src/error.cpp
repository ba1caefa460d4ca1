// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/error.hpp"

namespace voxcraft {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::TargetIdOutOfRange: return "TargetIdOutOfRange";
    case ErrorCode::InvalidClassTable: return "InvalidClassTable";
    case ErrorCode::ClassTableMismatch: return "ClassTableMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::InvalidAabb: return "InvalidAabb";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidFov: return "InvalidFov";
    case ErrorCode::InvalidPose: return "InvalidPose";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::TruncatedInput: return "TruncatedInput";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::BadUtf8: return "BadUtf8";
    case ErrorCode::DepthLimitExceeded: return "DepthLimitExceeded";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::PaletteIndexOutOfRange: return "PaletteIndexOutOfRange";
    case ErrorCode::VarintOverflow: return "VarintOverflow";
    case ErrorCode::EmptyObservationSet: return "EmptyObservationSet";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnsupportedAngle: return "UnsupportedAngle";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::NoTemplate: return "NoTemplate";
    case ErrorCode::UnknownBlockName: return "UnknownBlockName";
    case ErrorCode::BodyTooLarge: return "BodyTooLarge";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::BadTerminator: return "BadTerminator";
    case ErrorCode::NegativeLength: return "NegativeLength";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::ConnectionError: return "ConnectionError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::ConnectionLost: return "ConnectionLost";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::LockHeld: return "LockHeld";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace voxcraft
