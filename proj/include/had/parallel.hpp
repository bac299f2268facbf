#pragma once

namespace had::par {

// Number of threads the OpenMP kernels will request. Resolution order:
// explicit override (set_thread_override with n >= 1), else all cores.
// Thread count only affects speed; every kernel is written so its output
// is identical for any count.
int thread_count();

// n >= 1 pins the count, 0 restores the default.
void set_thread_override(int n);
int thread_override();

}  // namespace had::par
