#pragma once

#include <string>

#include "rxdg/chemistry.hpp"
#include "rxdg/thermo.hpp"

namespace rxdg::suites {

struct SuiteResult {
  bool pass = false;
  std::string detail;
};

/// Randomized single-element forward-Euler trials (straight triangle,
/// straight quad, curved triangle): nodal data limited into G_sigma and dt
/// from the Theorem-1 bound must keep the evolved average in G_sigma.
SuiteResult theorem1_suite(int n_trials, unsigned seed = 2024);

/// Agreement of the direct average update with its convex-combination
/// reconstruction, straight (1e-12) and curved (1e-10) elements.
SuiteResult decomposition_suite(int n_fields_per_shape, unsigned seed = 7);

/// Limiter property trials: average preservation to 1e-13, pointwise bound
/// satisfaction, idempotence.
SuiteResult limiter_suite(int n_trials, unsigned seed = 99);

/// Brute-force alpha scan around the Appendix-B threshold.
SuiteResult alpha_star_suite(int n_samples, unsigned seed = 5);

/// Auxiliary-polynomial average identities on the nine-node quadrilateral
/// and the seven-node degenerate triangle, plus the collapse-map round trip.
SuiteResult aux_poly_suite(int n_fields, unsigned seed = 11);

/// Three-species thermally perfect demonstration gas used by the randomized
/// suites (no external data files involved).
thermo::GasModel suite_gas();

SuiteResult run_suite(const std::string& name);

} // namespace rxdg::suites
