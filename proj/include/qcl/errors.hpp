// Copyright 2026 The qcommit-lab Authors
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

namespace qcl {

/// A dense object would exceed the configured entry cap. `where` names the
/// register (or operation) that blew the budget.
class DimensionCapError : public std::runtime_error {
 public:
  DimensionCapError(std::string where, std::size_t requested, std::size_t cap)
      : std::runtime_error("dimension cap exceeded at " + where + ": " +
                           std::to_string(requested) + " entries > cap " +
                           std::to_string(cap)),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Input is not a valid state / POVM / distribution within tolerance.
class ValidityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unknown register name or inconsistent register layout.
class LayoutError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical procedure failed (e.g. Naimark completion rank defect).
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qcl
