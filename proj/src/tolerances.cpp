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

#include "qcl/tolerances.hpp"

namespace qcl {

namespace {
Tolerances g_tolerances;
}

const Tolerances& tolerances() { return g_tolerances; }

void set_tolerances(const Tolerances& tol) { g_tolerances = tol; }

}  // namespace qcl

#include "qcl/parallel.hpp"

namespace qcl {

namespace {
unsigned g_worker_threads = 1;
}

unsigned worker_threads() { return g_worker_threads; }

void set_worker_threads(unsigned n) { g_worker_threads = std::max(1u, n); }

}  // namespace qcl
