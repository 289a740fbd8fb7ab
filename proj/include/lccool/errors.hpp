#pragma once

#include <stdexcept>
#include <string>

namespace lccool {

// Error taxonomy maps onto the CLI exit codes:
//   UsageError -> 1, ConfigError -> 2, DomainError -> 3, SolverError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct DetuningOutOfRange : DomainError {
  using DomainError::DomainError;
};

struct NonPositiveTemperature : DomainError {
  using DomainError::DomainError;
};

struct DivisionByZeroCoupling : DomainError {
  using DomainError::DomainError;
};

struct NonPositiveEffectiveLinewidth : DomainError {
  using DomainError::DomainError;
};

// Tagged physics outcome for operations where a non-normalizable steady state
// is a hard error (distribution, cooling rate). steady_photon_stats reports
// the same condition as a flag instead.
struct AboveThresholdError : DomainError {
  using DomainError::DomainError;
};

struct DimensionTooLarge : SolverError {
  using SolverError::SolverError;
};

struct NonConvergence : SolverError {
  using SolverError::SolverError;
};

struct StepSizeUnderflow : SolverError {
  using SolverError::SolverError;
};

struct MismatchedGrids : UsageError {
  using UsageError::UsageError;
};

}  // namespace lccool
