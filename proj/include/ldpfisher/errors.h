// Copyright 2026 The ldpfisher Authors
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

#ifndef LDPFISHER_ERRORS_H_
#define LDPFISHER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ldpfisher {

// Bad argument value (negative epsilon, w >= d, zero trials, ...).
class ArgumentDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Vector or alphabet sizes that do not line up.
class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter at or beyond the score singularity of a finite model.
class SingularParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Kernel rows that are not probability vectors, or all-zero columns.
class NonStochasticKernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A kernel whose likelihood ratios exceed its declared epsilon.
class PrivacyViolationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Enumeration or materialization larger than the configured cap.
class CapExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// No admissible mechanism parameter for the requested privacy level.
class InfeasiblePrivacyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation not defined for the given model or setting.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Hypothesis of a bound does not hold (e.g. epsilon < 1 for tail bounds).
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Per-node privacy budget exceeded in an interactive protocol.
class BudgetExceededError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed configuration or report input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ldpfisher

#endif  // LDPFISHER_ERRORS_H_
