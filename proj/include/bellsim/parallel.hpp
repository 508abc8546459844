#pragma once

namespace bellsim {

// Kernel selection for the data-parallel paths (trial generation, slab
// quadrature). The serial backend is the reference implementation; both must
// produce bit-identical results and the tests compare them.
enum class Backend { openmp, serial };

// Worker count for the OpenMP backend. Priority: explicit request (> 0),
// then the BELLSIM_WORKERS environment variable, then the machine default.
// The count never affects results, only wall time.
int resolve_workers(int requested);

inline constexpr const char* kWorkersEnvVar = "BELLSIM_WORKERS";

}  // namespace bellsim
