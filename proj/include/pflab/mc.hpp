#pragma once

#include <cstdint>

#include "pflab/kernels.hpp"

namespace pflab {

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;       // sample standard deviation / sqrt(n)
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  // magnitude of the accumulated imaginary part of the explicit spin trace,
  // scaled like mean; vanishes statistically for the symmetric integrands
  double imag_residual = 0.0;
};

// uniform sampling of the cutoff ball (pair of balls for the two-photon
// names), evaluating the unreduced polarization/spin-summed integrand of the
// named vacuum expectation value; bit-exact for fixed (seed, n_samples)
// independent of thread count
MCEstimate mc_vev(Kernel which, const Cutoff& cut, std::uint64_t n_samples,
                  std::uint64_t seed);

}  // namespace pflab
