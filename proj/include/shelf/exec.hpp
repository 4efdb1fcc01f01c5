#pragma once

namespace shelf {

/// Serial kernels are the reference; Parallel runs the same loops under OpenMP.
enum class Exec { Serial, Parallel };

/// Worker count: SHELF_SEARCH_THREADS if set, else the OpenMP default.
int worker_count();

}  // namespace shelf
