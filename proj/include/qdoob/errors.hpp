// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qdoob {

/// Base class for all qdoob errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix or vector dimensions are inconsistent.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A size parameter is outside the supported range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// The tilting parameter exceeds the overflow guard |s| <= s_max.
class TiltRangeError : public Error {
 public:
  using Error::Error;
};

/// The leading eigenvalue (or null space) is degenerate.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive (semi)definite is not.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// An internal identity failed beyond its numerical tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A ratio would divide by a vanishing reference value.
class DivisionGuardError : public Error {
 public:
  using Error::Error;
};

/// Long-time propagation produced a non-finite or non-positive norm.
class OverflowGuardError : public Error {
 public:
  using Error::Error;
};

/// File or document parsing problem.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdoob
