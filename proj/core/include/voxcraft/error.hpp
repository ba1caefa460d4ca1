// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_ERROR_HPP
#define VOXCRAFT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace voxcraft {

enum class ErrorCode {
  // grid-core
  UnknownClass,
  TargetIdOutOfRange,
  InvalidClassTable,
  ClassTableMismatch,
  FormatError,
  DimensionMismatch,
  UnknownVersion,
  InvalidAabb,
  IoError,
  // camera
  InvalidFov,
  InvalidPose,
  BehindCamera,
  // worldmap / NBT
  TruncatedInput,
  UnknownTag,
  BadUtf8,
  DepthLimitExceeded,
  MissingField,
  PaletteIndexOutOfRange,
  VarintOverflow,
  // fusion
  EmptyObservationSet,
  // centers
  InvalidKernel,
  InvalidParameter,
  // template-match
  UnsupportedAngle,
  EmptyInstance,
  NoTemplate,
  // build-plan
  UnknownBlockName,
  // rcon
  BodyTooLarge,
  Truncated,
  BadTerminator,
  NegativeLength,
  AuthFailed,
  ConnectionError,
  Timeout,
  IdMismatch,
  ConnectionLost,
  Cancelled,
  // pipeline
  ConfigError,
  LockHeld,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI and the HTTP service can report it in machine-readable form.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace voxcraft

#endif  // VOXCRAFT_ERROR_HPP
