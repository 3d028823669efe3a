// Copyright 2026 The coordsim Authors.
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

namespace coordsim {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: unknown axis names, overlapping variable sets,
/// mismatched alphabets, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An inequality checker was called outside the hypotheses of its lemma
/// (for example a total-variation certificate of 1/2 or more).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Enumeration or search would exceed the configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed into the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A numerically impossible state, e.g. a mutual information well below zero.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace coordsim
