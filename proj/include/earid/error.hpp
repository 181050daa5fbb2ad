// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_ERROR_HPP
#define EARID_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace earid {

enum class ErrorKind {
    InvalidSpec,
    InvalidArgument,
    TooShort,
    NoRetainedEpochs,
    ZeroDenominator,
    ZeroVariance,
    ZeroNorm,
    AllSegmentsDropped,
    Io,
    MissingFile,
    SizeMismatch,
    DuplicateKey,
    InvalidCohort,
    IncompleteCohort,
    InvalidIndex,
    InsufficientClass,
    NonConvergence,
    UndefinedMetric,
    InconsistentRuns,
    Parse,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::TooShort: return "too-short";
    case ErrorKind::NoRetainedEpochs: return "no-retained-epochs";
    case ErrorKind::ZeroDenominator: return "zero-denominator";
    case ErrorKind::ZeroVariance: return "zero-variance";
    case ErrorKind::ZeroNorm: return "zero-norm";
    case ErrorKind::AllSegmentsDropped: return "all-segments-dropped";
    case ErrorKind::Io: return "io";
    case ErrorKind::MissingFile: return "missing-file";
    case ErrorKind::SizeMismatch: return "size-mismatch";
    case ErrorKind::DuplicateKey: return "duplicate-key";
    case ErrorKind::InvalidCohort: return "invalid-cohort";
    case ErrorKind::IncompleteCohort: return "incomplete-cohort";
    case ErrorKind::InvalidIndex: return "invalid-index";
    case ErrorKind::InsufficientClass: return "insufficient-class";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::InconsistentRuns: return "inconsistent-runs";
    case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

/// Every failure raised by the library. `kind()` lets callers and tests
/// distinguish failure classes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace earid

#endif
