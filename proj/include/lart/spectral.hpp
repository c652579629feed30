#pragma once

#include <utility>

#include "lart/data.hpp"
#include "lart/params.hpp"

namespace lart {

struct SpectralConfig {
  double epsilon = 1e-9;  // clamp for the probit inversion
  int k_latent = 1;
};

// Non-iterative SVD-based initialization of the population parameters and
// traits from complete data. Deterministic; output satisfies the parameter
// invariants (lambda floored, |rho| clamped, positive orientation sums).
std::pair<PopulationParams, LatentTraits> spectral_initialize(
    const ResponseDataset& data, const SpectralConfig& cfg = {});

}  // namespace lart
