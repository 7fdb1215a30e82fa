// Copyright 2026 The pump-deck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pumpdeck {

enum class ErrorKind {
  NotHermitian,
  DegenerateSpectrum,
  DiagonalRequest,
  InvalidState,
  ZeroSweepRate,
  StepTooLarge,
  UnsupportedEndpoints,
  NotTwoBand,
  NonIntegerResult,
  InvalidArgument,
  ConfigInvalid,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::DiagonalRequest: return "DiagonalRequest";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::ZeroSweepRate: return "ZeroSweepRate";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::UnsupportedEndpoints: return "UnsupportedEndpoints";
    case ErrorKind::NotTwoBand: return "NotTwoBand";
    case ErrorKind::NonIntegerResult: return "NonIntegerResult";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class PumpError : public std::runtime_error {
 public:
  PumpError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pumpdeck
