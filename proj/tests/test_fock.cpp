#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "pflab/fock.hpp"
#include "pflab/modes.hpp"

using namespace pflab;
using cd = std::complex<double>;

namespace {

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

VecC random_state(std::size_t n, std::mt19937_64& rng) {
  VecC v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cd(2 * uniform53(rng) - 1, 2 * uniform53(rng) - 1);
  return v / v.norm();
}

// normal-ordered dense assembly of the truncated operator, written from the
// bosonic matrix elements alone; shares no code with the matrix-free apply
Eigen::MatrixXcd dense_operator(const ModeGrid& grid, double alpha,
                                const Vec3& ell, double shift) {
  const auto& modes = grid.modes;
  const std::size_t m_count = modes.size();
  const std::size_t p_count = m_count * (m_count + 1) / 2;
  const std::size_t f_count = 1 + m_count + p_count;
  const std::size_t n = 2 * f_count;
  const auto f1 = [&](std::size_t m) { return 1 + m; };
  const auto f2 = [&](std::size_t p) { return 1 + m_count + p; };

  std::array<Eigen::MatrixXcd, 3> d_low, e_low;
  for (int i = 0; i < 3; ++i) {
    d_low[i].setZero(f_count, f_count);
    e_low[i].setZero(f_count, f_count);
  }
  const cd mi(0, -1);
  for (std::size_t m = 0; m < m_count; ++m)
    for (int i = 0; i < 3; ++i) {
      d_low[i](0, f1(m)) = modes[m].g[i];
      e_low[i](0, f1(m)) = mi * modes[m].u[i];
    }
  for (std::size_t a = 0; a < m_count; ++a)
    for (std::size_t b = a; b < m_count; ++b) {
      const std::size_t p = pair_index(a, b, m_count);
      const double boson = a == b ? std::sqrt(2.0) : 1.0;
      for (int i = 0; i < 3; ++i) {
        d_low[i](f1(b), f2(p)) += boson * modes[a].g[i];
        e_low[i](f1(b), f2(p)) += boson * mi * modes[a].u[i];
        if (a != b) {
          d_low[i](f1(a), f2(p)) += modes[b].g[i];
          e_low[i](f1(a), f2(p)) += mi * modes[b].u[i];
        }
      }
    }

  Eigen::VectorXd hf = Eigen::VectorXd::Zero(f_count);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(f_count);
  std::array<Eigen::VectorXd, 3> pf;
  for (int i = 0; i < 3; ++i) pf[i] = Eigen::VectorXd::Zero(f_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    hf[f1(m)] = modes[m].r;
    mask[f1(m)] = 1;
    for (int i = 0; i < 3; ++i) pf[i][f1(m)] = modes[m].k[i];
  }
  for (std::size_t a = 0; a < m_count; ++a)
    for (std::size_t b = a; b < m_count; ++b) {
      const std::size_t p = pair_index(a, b, m_count);
      hf[f2(p)] = modes[a].r + modes[b].r;
      mask[f2(p)] = 1;
      for (int i = 0; i < 3; ++i)
        pf[i][f2(p)] = modes[a].k[i] + modes[b].k[i];
    }

  Eigen::MatrixXcd scalar = Eigen::MatrixXcd::Zero(f_count, f_count);
  for (std::size_t f = 0; f < f_count; ++f) {
    double diag = hf[f] + alpha * grid.sum_g2 + shift * mask[f];
    for (int i = 0; i < 3; ++i) {
      const double q = ell[i] - pf[i][f];
      diag += q * q;
    }
    scalar(f, f) = diag;
  }
  const double ra = std::sqrt(alpha);
  for (int i = 0; i < 3; ++i) {
    const Eigen::MatrixXcd a_i = d_low[i] + d_low[i].adjoint();
    Eigen::MatrixXcd mom = Eigen::MatrixXcd::Zero(f_count, f_count);
    for (std::size_t f = 0; f < f_count; ++f) mom(f, f) = ell[i] - pf[i][f];
    scalar += ra * (mom * a_i + a_i * mom);
    scalar += alpha * (2.0 * d_low[i].adjoint() * d_low[i] +
                       d_low[i] * d_low[i] +
                       d_low[i].adjoint() * d_low[i].adjoint());
  }

  Eigen::Matrix2cd sg[3];
  sg[0] << 0, 1, 1, 0;
  sg[1] << 0, cd(0, -1), cd(0, 1), 0;
  sg[2] << 1, 0, 0, -1;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t x = 0; x < f_count; ++x)
    for (std::size_t y = 0; y < f_count; ++y) {
      if (scalar(x, y) != 0.0) {
        full(2 * x, 2 * y) += scalar(x, y);
        full(2 * x + 1, 2 * y + 1) += scalar(x, y);
      }
    }
  for (int i = 0; i < 3; ++i) {
    const Eigen::MatrixXcd b_i = e_low[i] + e_low[i].adjoint();
    for (std::size_t x = 0; x < f_count; ++x)
      for (std::size_t y = 0; y < f_count; ++y) {
        if (b_i(x, y) == 0.0) continue;
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t)
            full(2 * x + s, 2 * y + t) += ra * sg[i](s, t) * b_i(x, y);
      }
  }
  return full;
}

}  // namespace

TEST_CASE("grid construction rules") {
  GridParams p;
  p.lambda = -1;
  CHECK_THROWS_AS((void)build_grid(p), std::invalid_argument);
  p.lambda = 1;
  p.n_r = 1;
  CHECK_THROWS_AS((void)build_grid(p), std::invalid_argument);
  p.n_r = 4;
  p.n_phi = 5;
  CHECK_THROWS_AS((void)build_grid(p), std::invalid_argument);
  p.n_phi = 2;
  CHECK_THROWS_AS((void)build_grid(p), std::invalid_argument);
  p.n_phi = 4;
  const ModeGrid g = build_grid(p);
  CHECK(g.modes.size() == std::size_t(2 * p.n_r * p.n_t * p.n_phi));
  for (const Mode& m : g.modes) {
    CHECK(m.r > 0);
    CHECK(m.r <= p.lambda);
    CHECK(std::abs(m.r - m.k.norm()) < 1e-14);
    CHECK(std::abs(m.g2 - m.g.squaredNorm()) < 1e-16);
    CHECK(std::abs(m.q1 - (m.r * m.r + m.r)) < 1e-14);
    CHECK((m.u - m.k.cross(m.g)).norm() < 1e-14);
  }
  GridParams z;
  z.lambda = 0;
  CHECK(build_grid(z).modes.empty());
}

TEST_CASE("vacuum constant has the exact midpoint error law") {
  for (int n_r : {2, 4, 8, 16}) {
    GridParams p;
    p.lambda = 1.7;
    p.n_r = n_r;
    p.n_t = 3;
    p.n_phi = 6;
    const ModeGrid g = build_grid(p);
    const double vac = p.lambda * p.lambda / pi;
    const double rel = std::abs(g.sum_g2 - vac) / vac;
    CHECK(std::abs(rel - 1.0 / (2.0 * n_r * n_r)) < 1e-10);
  }
}

TEST_CASE("discrete mode sums against frozen values") {
  GridParams p;
  p.lambda = 1.0;
  const ModeGrid g4 = build_grid(p);
  const DiscreteCoeffs d4 = discrete_coeffs(g4);
  CHECK(std::abs(d4.e1 - 0.19198623) < 2e-7);
  CHECK(std::abs(d4.e2 - (-0.02734802)) < 2e-7);
  CHECK(std::abs(d4.e1 - (d4.sum_g2 - d4.iee)) < 1e-15);

  p.n_r = 8;
  p.n_t = 6;
  p.n_phi = 6;
  const DiscreteCoeffs d8 = discrete_coeffs(build_grid(p));
  CHECK(std::abs(d8.e1 - 0.19451679) < 2e-7);
  CHECK(std::abs(d8.e2 - (-0.02749114)) < 2e-7);
  CHECK(std::abs(d8.eeee - 0.0067784) < 2e-6);
  CHECK(std::abs(d8.epd - 0.0012687) < 2e-6);
  CHECK(std::abs(d8.eedd - 0.0023123) < 2e-6);
  CHECK(std::abs(d8.dd - 0.0351529) < 2e-6);
}

TEST_CASE("angular cancellation residual") {
  GridParams p;
  p.lambda = 1.0;
  CHECK(angular_cancellation_residual(build_grid(p)) <= 1e-12);
  p.n_r = 6;
  p.n_t = 5;
  p.n_phi = 8;
  CHECK(angular_cancellation_residual(build_grid(p)) <= 1e-12);
  p.symmetric = false;
  CHECK(angular_cancellation_residual(build_grid(p)) > 1e-6);
  GridParams z;
  z.lambda = 0;
  CHECK(angular_cancellation_residual(build_grid(z)) == 0.0);
}

TEST_CASE("pair enumeration is a bijection") {
  const std::size_t m = 7;
  std::vector<int> seen(m * (m + 1) / 2, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      REQUIRE(p < seen.size());
      ++seen[p];
    }
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("matrix-free action equals an independent dense assembly") {
  GridParams p;
  p.lambda = 1.0;
  p.n_r = 2;
  p.n_t = 2;
  p.n_phi = 4;
  const ModeGrid grid = build_grid(p);
  std::mt19937_64 rng(424242);

  struct Config {
    double alpha;
    Vec3 ell;
    double shift;
  };
  const Config configs[] = {
      {5e-3, Vec3::Zero(), 0.0},
      {8e-3, Vec3(0.1, -0.05, 0.2), 1e-5},
  };
  for (const Config& c : configs) {
    const FockOperator op = assemble(grid, c.alpha, c.ell, c.shift);
    const Eigen::MatrixXcd dense =
        dense_operator(grid, c.alpha, c.ell, c.shift);
    REQUIRE(dense.rows() == Eigen::Index(op.dims.total));
    CHECK((dense - dense.adjoint()).norm() < 1e-12 * dense.norm());
    for (int it = 0; it < 8; ++it) {
      const VecC x = random_state(op.dims.total, rng);
      const VecC ya = op.apply(x);
      const VecC yd = dense * x;
      CHECK((ya - yd).norm() <= 1e-12 * (1 + yd.norm()));
    }
  }

  // lowest eigenvalue through the iterative path matches the dense solve,
  // and the lowest pair is the expected spin doublet
  const FockOperator op = assemble(grid, 5e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      dense_operator(grid, 5e-3, Vec3::Zero(), 0.0));
  const GroundState gs = ground_state(op, 1e-10, 400);
  CHECK(gs.converged);
  CHECK(std::abs(gs.energy - es.eigenvalues()(0)) <=
        1e-9 * (1 + std::abs(gs.energy)));
  CHECK(std::abs(es.eigenvalues()(1) - es.eigenvalues()(0)) <=
        1e-11 * (1 + std::abs(es.eigenvalues()(0))));
  CHECK(es.eigenvalues()(2) - es.eigenvalues()(0) > 1e-4);
}

TEST_CASE("self-adjointness on random pairs") {
  GridParams p;
  p.lambda = 1.0;
  p.n_r = 3;
  p.n_t = 2;
  p.n_phi = 4;
  const ModeGrid grid = build_grid(p);
  const FockOperator op = assemble(grid, 1e-2, Vec3(0.05, 0, -0.1), 1e-6);
  std::mt19937_64 rng(99);
  for (int it = 0; it < 100; ++it) {
    const VecC a = random_state(op.dims.total, rng);
    const VecC b = random_state(op.dims.total, rng);
    const cd lhs = a.dot(op.apply(b));
    const cd rhs = op.apply(a).dot(b);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("energy decomposition identities on random states") {
  GridParams p;
  p.lambda = 1.0;
  const ModeGrid grid = build_grid(p);
  const FockOperator op = assemble(grid, 8e-3);
  std::mt19937_64 rng(7);
  for (int it = 0; it < 20; ++it) {
    const VecC x = random_state(op.dims.total, rng);
    const EnergySplit es = energy_decomposition(op, x);
    const double scale = std::max(1.0, std::abs(es.direct));
    CHECK(std::abs(es.direct - es.sector_form) <= 1e-10 * scale);
    CHECK(std::abs(es.direct - es.completed_square) <= 1e-10 * scale);
    CHECK(std::abs(es.direct - rayleigh_quotient(op, x)) <= 1e-12 * scale);
  }
  // with an infrared shift the bookkeeping terms must still close the sum
  const FockOperator ops = assemble(grid, 8e-3, Vec3::Zero(), 5.12e-7);
  for (int it = 0; it < 10; ++it) {
    const VecC x = random_state(ops.dims.total, rng);
    const EnergySplit es = energy_decomposition(ops, x);
    const double scale = std::max(1.0, std::abs(es.direct));
    CHECK(std::abs(es.direct - es.sector_form) <= 1e-10 * scale);
    CHECK(std::abs(es.direct - es.completed_square) <= 1e-10 * scale);
  }
}

TEST_CASE("trial states satisfy their defining recursions") {
  GridParams p;
  p.lambda = 1.0;
  const ModeGrid grid = build_grid(p);
  const FockOperator op = assemble(grid, 1e-2);

  const VecC tf1 = trial_state(op, TrialKind::OnePhoton);
  const VecC tf2 = trial_state(op, TrialKind::TwoPhoton);
  const VecC tfa = trial_state(op, TrialKind::TwoPhotonAltSign);

  // one-photon trial: empty pair sector, zero first-sector defect
  for (std::size_t i = op.dims.off2; i < op.dims.total; ++i)
    CHECK(tf1[i] == cd(0, 0));
  const RemainderDiagnostics r1 = remainder_diagnostics(op, tf1);
  CHECK(r1.h1_norm2 <= 1e-24);
  CHECK(r1.h2_l_h2 > 0);

  // two-photon trial solves both recursions exactly, so both defects vanish
  const RemainderDiagnostics r2 = remainder_diagnostics(op, tf2);
  CHECK(r2.h1_norm2 <= 1e-24);
  CHECK(r2.h2_norm2 <= 1e-24);

  // the sign-flipped dressing is a genuinely different state
  const RemainderDiagnostics ra = remainder_diagnostics(op, tfa);
  CHECK(ra.h2_l_h2 > 1e3 * std::max(r2.h2_l_h2, 1e-30));

  const double e_gs = ground_state(op, 1e-9).energy;
  const double e1q = rayleigh_quotient(op, tf1);
  const double e2q = rayleigh_quotient(op, tf2);
  CHECK(e_gs <= e2q + 1e-12);
  CHECK(e2q <= e1q + 1e-12);

  VecC zero = VecC::Zero(op.dims.total);
  CHECK_THROWS_AS((void)rayleigh_quotient(op, zero), std::invalid_argument);
}

TEST_CASE("photon density identity") {
  GridParams p;
  p.lambda = 1.0;
  const ModeGrid grid = build_grid(p);
  const FockOperator op = assemble(grid, 1e-2);
  std::mt19937_64 rng(123);
  for (int it = 0; it < 20; ++it) {
    const PhotonDensity pd =
        photon_density(op, random_state(op.dims.total, rng));
    CHECK(pd.identity_residual <= 1e-12 * std::max(1.0, pd.hf_expectation));
    CHECK(pd.rho.minCoeff() >= 0);
  }
  const GroundState gs = ground_state(op, 1e-9);
  const PhotonDensity pd = photon_density(op, gs.vec);
  CHECK(pd.identity_residual <= 1e-12);
  CHECK(pd.number > 0);
  CHECK(pd.number < 1);
}

TEST_CASE("ground state on the empty grid and momentum symmetry") {
  GridParams z;
  z.lambda = 0;
  const ModeGrid empty = build_grid(z);
  const FockOperator op0 = assemble(empty, 1e-2);
  const GroundState g0 = ground_state(op0);
  CHECK(g0.converged);
  CHECK(g0.energy == 0.0);

  GridParams p;
  p.lambda = 1.0;
  p.n_r = 2;
  p.n_t = 2;
  p.n_phi = 4;
  const ModeGrid grid = build_grid(p);
  const Vec3 ell(0.1, 0.07, -0.03);
  const double e_plus = ground_state(assemble(grid, 5e-3, ell), 1e-10).energy;
  const double e_minus =
      ground_state(assemble(grid, 5e-3, -ell), 1e-10).energy;
  CHECK(std::abs(e_plus - e_minus) <= 1e-9 * (1 + std::abs(e_plus)));
  CHECK_THROWS_AS((void)assemble(grid, -1e-3), std::invalid_argument);
}

TEST_CASE("polarization frame choice does not move the spectrum") {
  GridParams pa;
  pa.lambda = 1.0;
  pa.n_r = 2;
  pa.n_t = 2;
  pa.n_phi = 4;
  GridParams pb = pa;
  pb.frame_axis = Vec3(1.0, 2.0, 2.0).normalized();
  const double ea = ground_state(assemble(build_grid(pa), 6e-3), 1e-10).energy;
  const double eb = ground_state(assemble(build_grid(pb), 6e-3), 1e-10).energy;
  CHECK(std::abs(ea - eb) <= 1e-10 * (1 + std::abs(ea)));
}

TEST_CASE("auxiliary field bounds and the commutator constant") {
  GridParams p;
  p.lambda = 1.0;
  for (double alpha : {0.0, 1e-2}) {
    for (int n_r : {2, 4}) {
      p.n_r = n_r;
      p.n_t = 3;
      p.n_phi = 6;
      const ModeGrid grid = build_grid(p);
      const AuxiliaryBounds ab = check_auxiliary_bounds(grid, alpha);
      CHECK(ab.d_s1_ok);
      CHECK(ab.d_s2_ok);
      CHECK(ab.e_s1_ok);
      CHECK(ab.e_s2_ok);
      CHECK(ab.d_s1_mineig >= -1e-10);
      CHECK(ab.e_s1_mineig >= -1e-10);
      CHECK(ab.commutator_spread <=
            1e-12 * std::max(1.0, ab.commutator_discrete));
      CHECK(std::abs(ab.commutator_discrete - ab.commutator_quadrature) <=
            (1e-3 + 10 * alpha * alpha * alpha) * ab.commutator_quadrature);
    }
  }
  GridParams z;
  z.lambda = 0;
  const AuxiliaryBounds ab0 = check_auxiliary_bounds(build_grid(z), 1e-2);
  CHECK(ab0.d_s1_ok);
  CHECK(ab0.e_s2_ok);
}

TEST_CASE("sector-2 bound certification agrees with a dense eigensolve") {
  GridParams p;
  p.lambda = 1.0;
  p.n_r = 2;
  p.n_t = 2;
  p.n_phi = 4;
  const ModeGrid grid = build_grid(p);
  const auto& modes = grid.modes;
  const std::size_t m_count = modes.size();
  const std::size_t p_count = m_count * (m_count + 1) / 2;

  // dense scalar-amplitude annihilation from the pair sector
  Eigen::MatrixXd low = Eigen::MatrixXd::Zero(m_count, p_count);
  for (std::size_t a = 0; a < m_count; ++a)
    for (std::size_t b = a; b < m_count; ++b) {
      const std::size_t q = pair_index(a, b, m_count);
      const double boson = a == b ? std::sqrt(2.0) : 1.0;
      low(b, q) += boson * modes[a].g.norm();
      if (a != b) low(a, q) += modes[b].g.norm();
    }
  Eigen::MatrixXd gap = Eigen::MatrixXd::Zero(p_count, p_count);
  for (std::size_t a = 0; a < m_count; ++a)
    for (std::size_t b = a; b < m_count; ++b) {
      const std::size_t q = pair_index(a, b, m_count);
      gap(q, q) = 2.0 / pi * p.lambda * (modes[a].r + modes[b].r);
    }
  gap -= low.transpose() * low;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap);
  const double mineig = es.eigenvalues()(0);
  const AuxiliaryBounds ab = check_auxiliary_bounds(grid, 0.0);
  CHECK(mineig >= -1e-10);
  CHECK(ab.d_s2_ok == (mineig >= -1e-10));
}

TEST_CASE("expansion fit recovers exact quadratic data") {
  const std::vector<double> alphas = {1e-3, 2e-3, 4e-3, 8e-3};
  std::vector<double> energies;
  for (double a : alphas) energies.push_back(0.2 * a - 0.03 * a * a);
  const FitResult fr = fit_expansion(alphas, energies);
  CHECK(std::abs(fr.c1 - 0.2) < 1e-12);
  CHECK(std::abs(fr.c2 + 0.03) < 1e-9);
  CHECK(fr.rms < 1e-15);
  CHECK_THROWS_AS((void)fit_expansion({1e-3}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_expansion({1e-3, 2e-3}, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fit_expansion({1e-3, 1e-3}, {1.0, 1.0}),
                  std::invalid_argument);
}
