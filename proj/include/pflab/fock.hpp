#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pflab/modes.hpp"

namespace pflab {

using VecC = Eigen::VectorXcd;

// flat layout: [spin | one photon: mode-major, spin inner | two photons:
// ordered pairs i <= j, spin inner]
struct FockDims {
  std::size_t n_modes = 0;
  std::size_t n_pairs = 0;   // n_modes*(n_modes+1)/2
  std::size_t total = 0;     // 2 + 2*n_modes + 2*n_pairs
  std::size_t off1 = 2;
  std::size_t off2 = 2;
};

inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t m) {
  return i * m - i * (i - 1) / 2 + (j - i);
}

// matrix-free action of T = (ell - P_f + sqrt(alpha) A)^2 + sqrt(alpha)
// sigma.B + H_f on the n <= 2 space; infrared_shift adds a flat constant to
// every state carrying at least one photon
class FockOperator {
 public:
  const ModeGrid* grid = nullptr;
  double alpha = 0.0;
  Vec3 ell = Vec3::Zero();
  double infrared_shift = 0.0;
  FockDims dims;
  Eigen::VectorXd diag;  // full diagonal including the vacuum constant

  VecC apply(const VecC& x) const;

  // free part |ell - K|^2 + H_f per basis state, no vacuum constant, no shift
  Eigen::VectorXd free_diag() const;
  // D*D as a sector-preserving map on sectors 1 and 2, no alpha factor
  VecC apply_dstar_d(const VecC& x) const;
  // creation amplitude F* = 2(ell - P_f).D* + sigma.E* from sector 0, no
  // sqrt(alpha) factor; output is a sector-1 block (length 2 n_modes)
  VecC couple_up_f0(const Eigen::Vector2cd& x0) const;
  // same amplitude from sector 1 to sector 2 with bosonic normalization
  VecC couple_up_f1(const VecC& x1) const;
  // D*.D* |0>-block to sector 2, no alpha factor
  VecC couple_up_ddstar(const Eigen::Vector2cd& x0) const;

  std::size_t idx1(std::size_t m, int s) const { return dims.off1 + 2 * m + s; }
  std::size_t idx2(std::size_t p, int s) const { return dims.off2 + 2 * p + s; }
};

FockOperator assemble(const ModeGrid& grid, double alpha,
                      const Vec3& ell = Vec3::Zero(),
                      double infrared_shift = 0.0);

struct GroundState {
  double energy = 0.0;
  VecC vec;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Davidson iteration with diagonal preconditioning and a deterministic
// vacuum-spin-up start
GroundState ground_state(const FockOperator& op, double tol = 1e-8,
                         int max_iter = 400, int max_subspace = 16);

enum class TrialKind { OnePhoton, TwoPhoton, TwoPhotonAltSign };

// perturbative trial states at ell = 0; the alt-sign variant flips the
// momentum-coupling sign in the second-order dressing (kept as a diagnostic)
VecC trial_state(const FockOperator& op, TrialKind kind);

double rayleigh_quotient(const FockOperator& op, const VecC& psi);

struct EnergySplit {
  double direct = 0.0;            // <psi, T psi>
  double sector_form = 0.0;       // per-sector quadratic-form expansion
  double completed_square = 0.0;  // completed-square rearrangement
  double h1_l_h1 = 0.0;
  double h2_l_h2 = 0.0;
};

EnergySplit energy_decomposition(const FockOperator& op, const VecC& psi);

struct RemainderDiagnostics {
  double h1_norm2 = 0.0;
  double h2_norm2 = 0.0;
  double h1_l_h1 = 0.0;
  double h2_l_h2 = 0.0;
  double total = 0.0;  // sum of the (h_n, L h_n)
};

RemainderDiagnostics remainder_diagnostics(const FockOperator& op,
                                           const VecC& psi);

struct PhotonDensity {
  Eigen::VectorXd rho;          // per-mode expected photon number
  double number = 0.0;          // sum rho
  double sum_rho_r = 0.0;       // sum rho_m r_m
  double hf_expectation = 0.0;  // <psi, H_f psi> computed independently
  double identity_residual = 0.0;
};

PhotonDensity photon_density(const FockOperator& op, const VecC& psi);

struct AuxiliaryBounds {
  double tol = 0.0;
  double d_s1_mineig = 0.0;  // dense eigensolve, sector 1
  bool d_s1_ok = false;
  bool d_s2_ok = false;
  double e_s1_mineig = 0.0;
  bool e_s1_ok = false;
  bool e_s2_ok = false;
  double commutator_discrete = 0.0;    // sum of squared |X| amplitudes
  double commutator_printed = 0.0;     // closed-form candidate
  double commutator_quadrature = 0.0;  // direct radial quadrature
  double commutator_spread = 0.0;      // identity-multiple deviation, sector 1
};

// scalar-amplitude operator inequalities (2/pi) Lam H_f >= |D|*|D| and
// (2 pi/3) Lam H_f >= |E|*|E| on sectors 1 and 2; sector 2 is certified via
// the M x M congruence eigenproblem rather than the full pair-space matrix
AuxiliaryBounds check_auxiliary_bounds(const ModeGrid& grid, double alpha,
                                       double tol = 1e-10);

struct FitResult {
  double c1 = 0.0;
  double c2 = 0.0;
  double rms = 0.0;
};

// least squares for E(alpha) = c1 alpha + c2 alpha^2
FitResult fit_expansion(const std::vector<double>& alphas,
                        const std::vector<double>& energies);

}  // namespace pflab
