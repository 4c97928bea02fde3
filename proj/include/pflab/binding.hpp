#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace pflab {

// radial potential with compact support [0, r0], zero beyond
struct RadialPotential {
  std::string name;
  double r0 = 1.0;
  std::function<double(double)> v;
};

RadialPotential square_well();  // v = -1 on [0,1]; used as a shooting oracle
RadialPotential smooth_bump();  // v = -(1-r^2)^2 on [0,1]

struct ShootResult {
  double g = 0.0;
  int n_steps = 0;
  std::vector<double> r, u, up;  // tables over [0, r0] including endpoints
  double u_r0 = 0.0;
  double up_r0 = 0.0;
};

// fixed-step RK4 for u'' = g v(r) u, u(0) = 0, u'(0) = 1
ShootResult radial_shoot(const RadialPotential& pot, double g,
                         int n_steps = 20000);

struct ResonanceResult {
  RadialPotential pot;
  double g_star = 0.0;
  double shoot_residual = 0.0;   // |u'(r0)| at g_star
  double zerorr_residual = 0.0;  // worst relative integral-equation residual
  double tail_c = 0.0;           // Newton tail constant C = u(r0)
  double tail_dev = 0.0;         // relative drift of u over [r0, 3 r0]
  ShootResult shoot;
};

// bisection for u'(r0) = 0 on [g_lo, g_hi]; validates the Newton integral
// equation a posteriori on 200 radial points
ResonanceResult find_resonance_coupling(const RadialPotential& pot,
                                        double g_lo, double g_hi,
                                        double tol = 1e-12,
                                        int n_steps = 20000);

// scans upward for a sign change of u'(r0); throws if none below g_max
std::pair<double, double> resonance_bracket(const RadialPotential& pot,
                                            double g_min = 0.5,
                                            double g_max = 100.0);

struct TruncatedState {
  double alpha = 0.0;
  double epsilon = 0.0;
  double norm2 = 0.0;     // ||psi_eps||^2
  double p_norm2 = 0.0;   // ||p psi_eps||^2
  double p2_norm2 = 0.0;  // ||p^2 psi_eps||^2
  double c1 = 0.0;        // p2_norm2 / p_norm2
  double c2 = 0.0;        // p_norm2 / (alpha eps norm2)
  double partition_dev = 0.0;
};

// psi_eps = psi * u_cut(eps alpha |x|) with a C^2 cosine/quintic cutoff pair;
// requires 1/(eps alpha) >= 2 r0
TruncatedState truncate_state(const ResonanceResult& res, double alpha,
                              double epsilon);

struct BindingReport {
  double lambda = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  TruncatedState state;
  double energy = 0.0;  // (psi_eps, [p^2 + V] psi_eps)
  double term_resonance = 0.0;
  double term_v = 0.0;
  double term_grad = 0.0;
  double ims_rhs = 0.0;
  double ims_residual = 0.0;  // relative
  double d = 0.0;
  double margin = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  double exchange_closed = 0.0;
  double exchange_quad = 0.0;
  bool binding = false;
};

BindingReport binding_margin(const ResonanceResult& res, double lambda,
                             double alpha, double epsilon);

struct ScanResult {
  std::vector<BindingReport> rows;
  int best_index = -1;  // most negative margin
};

// geometric sweep eps = 2^-j, j in [j_min, j_max]
ScanResult scan_epsilon(const ResonanceResult& res, double lambda,
                        double alpha, int j_min = 0, int j_max = 16);

}  // namespace pflab
