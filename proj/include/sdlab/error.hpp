// Copyright 2026 The sdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace sdlab {

enum class ErrorKind {
    NotHermitian,
    NoConvergence,
    DimensionOverflow,
    DimensionMismatch,
    BadTable,
    EmptyPreimage,
    NotBalanced,
    NotMub,
    SizeLimit,
    LabelMismatch,
    NotDensityMatrix,
    InvalidPrior,
    OddLength,
    EvenLength,
    NotProjector,
    NotUnitary,
    NumericalRankAmbiguity,
    VerificationFailure,
    Io,
    Usage,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DimensionOverflow: return "DimensionOverflow";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::BadTable: return "BadTable";
        case ErrorKind::EmptyPreimage: return "EmptyPreimage";
        case ErrorKind::NotBalanced: return "NotBalanced";
        case ErrorKind::NotMub: return "NotMub";
        case ErrorKind::SizeLimit: return "SizeLimit";
        case ErrorKind::LabelMismatch: return "LabelMismatch";
        case ErrorKind::NotDensityMatrix: return "NotDensityMatrix";
        case ErrorKind::InvalidPrior: return "InvalidPrior";
        case ErrorKind::OddLength: return "OddLength";
        case ErrorKind::EvenLength: return "EvenLength";
        case ErrorKind::NotProjector: return "NotProjector";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::NumericalRankAmbiguity: return "NumericalRankAmbiguity";
        case ErrorKind::VerificationFailure: return "VerificationFailure";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable, testable part;
/// the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace sdlab
