#pragma once

#include "pflab/kernels.hpp"
#include "pflab/quadrature.hpp"

namespace pflab {

// antiderivative forms of the one-photon integrals
double e1_closed(const Cutoff& cut);
double iee_closed(const Cutoff& cut);
double n1_closed(const Cutoff& cut);

// quadrature route for any named vacuum expectation value: adaptive 1D for
// the one-photon names, adaptive 3D over (r1, r2, t) for the pair names
QuadResult vev2(Kernel which, const Cutoff& cut, double tol);

struct E2Breakdown {
  QuadResult dd;
  QuadResult eeee;
  QuadResult epd;
  QuadResult eedd;
  QuadResult iee;
  QuadResult n1;
  double value = 0.0;
  double error = 0.0;  // linear sum of the component error estimates
  bool converged = true;
};

// second-order coefficient -(dd + eeee + 4 epd - 2 eedd - iee*n1), all six
// pieces by quadrature
E2Breakdown e2_total(const Cutoff& cut, double tol);

// same assembly with the alternative exchange kernels, kept as a diagnostic
// for the flagged discrepancy
E2Breakdown e2_total_alt(const Cutoff& cut, double tol);

struct SigmaPrediction {
  double alpha = 0.0;
  double lambda = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double sigma = 0.0;  // alpha*e1 + alpha^2*e2
  double error = 0.0;
};

SigmaPrediction sigma_prediction(double alpha, const Cutoff& cut, double tol);

}  // namespace pflab
