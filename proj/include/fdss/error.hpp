// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fdss {

// Base of every library error. The CLI maps the concrete subclasses onto
// exit codes (usage 1, data 2, numerical 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or contract-violating input: domain mismatch, ragged CSV rows,
// too few groups, bad sizes.
class InputError : public Error {
 public:
  using Error::Error;
};

// The covariance estimator needs at least two observations per group.
class DegenerateEstimatorError : public InputError {
 public:
  using InputError::InputError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Bad flags, unknown selectors, malformed configuration files.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace fdss
