#pragma once

#include <vector>

#include "pflab/kernels.hpp"

namespace pflab {

struct GridParams {
  double lambda = 1.0;
  int n_r = 4;
  int n_t = 4;
  int n_phi = 4;
  // false skews the t nodes off their symmetric positions; used as a
  // negative control for the angular-cancellation checks
  bool symmetric = true;
  Vec3 frame_axis = Vec3::UnitZ();
};

struct Mode {
  Vec3 k;
  double r;    // |k|
  double w;    // product quadrature weight for the measure dk
  int pol;     // polarization index 0 or 1
  Vec3 g;      // sqrt(w) * G^pol(k)
  Vec3 u;      // k cross g
  double g2;   // |g|^2
  double q1;   // r^2 + r
};

struct ModeGrid {
  GridParams params;
  std::vector<Mode> modes;
  double sum_g2 = 0.0;  // discrete vacuum constant, -> lambda^2/pi
};

// tensorized rule: midpoint in s with r = lambda*s^2, Gauss-Legendre in
// t = cos(theta), uniform phi, both polarizations; mode count 2*n_r*n_t*n_phi
ModeGrid build_grid(const GridParams& params);

struct DiscreteCoeffs {
  double sum_g2 = 0.0;
  double iee = 0.0;
  double n1 = 0.0;
  double dd = 0.0;
  double eeee = 0.0;
  double epd = 0.0;
  double eedd = 0.0;
  double e1 = 0.0;  // sum_g2 - iee
  double e2 = 0.0;  // -(dd + eeee + 4 epd - 2 eedd - iee*n1)
};

// mode-sum analogues of the coefficient integrals on the given grid
DiscreteCoeffs discrete_coeffs(const ModeGrid& grid);

// norm of the one-photon vector sum_m g_m (sigma.u_m) |up> / q1_m; vanishes
// to roundoff on symmetric grids by the odd-angle cancellation
double angular_cancellation_residual(const ModeGrid& grid);

}  // namespace pflab
