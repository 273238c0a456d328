// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace fdss {

// Execution policy of the data-parallel kernels. Both policies run the same
// per-element arithmetic in the same order, so results are bitwise equal;
// the serial path is the reference the parallel one is tested against.
enum class Exec { serial, parallel };

// Caps the OpenMP worker count (0 keeps the runtime default).
void set_thread_count(int threads);
int thread_count();

}  // namespace fdss
