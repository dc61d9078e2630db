#pragma once

namespace hcl {

/// Serial is the reference implementation; Parallel uses OpenMP and must
/// produce bitwise identical results.
enum class Exec { Serial, Parallel };

/// Thread cap from HCL_THREADS (unset or invalid: OpenMP default).
int thread_cap();

/// Applies thread_cap() to the OpenMP runtime. Returns the resulting maximum.
int configure_threads();

}  // namespace hcl
