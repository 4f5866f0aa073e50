// Copyright 2026 The qeraser Authors
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

namespace qeraser {

// Shapes or register layouts that do not fit together.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition or postcondition failed (non-Hermitian input,
// negative eigenvalue beyond roundoff, identity residual too large).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// User-supplied parameters outside their physical range.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity conditioned on a detector branch that never fires.
class UndefinedBranch : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

}  // namespace qeraser
