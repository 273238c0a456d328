// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/exec.hpp"

#include <omp.h>

namespace fdss {

void set_thread_count(int threads) {
  if (threads > 0) {
    omp_set_num_threads(threads);
  }
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace fdss
