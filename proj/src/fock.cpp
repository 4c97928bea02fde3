#include "pflab/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "pflab/quadrature.hpp"

namespace pflab {

namespace {

using cd = std::complex<double>;
using Eigen::Vector2cd;

Vector2cd sigma_apply(const Vec3& u, const Vector2cd& p) {
  const cd uxy(u[0], u[1]);
  return Vector2cd(u[2] * p[0] + std::conj(uxy) * p[1],
                   uxy * p[0] - u[2] * p[1]);
}

// raising block [c I + i sigma.u] p and its lowering adjoint; the +i follows
// from the annihilation amplitude -i u of the magnetic coupling
Vector2cd block_apply(double c, const Vec3& u, const Vector2cd& p) {
  return c * p + cd(0.0, 1.0) * sigma_apply(u, p);
}

Vector2cd block_apply_adj(double c, const Vec3& u, const Vector2cd& p) {
  return c * p - cd(0.0, 1.0) * sigma_apply(u, p);
}

}  // namespace

FockOperator assemble(const ModeGrid& grid, double alpha, const Vec3& ell,
                      double infrared_shift) {
  if (alpha < 0.0) throw std::invalid_argument("assemble: alpha < 0");
  FockOperator op;
  op.grid = &grid;
  op.alpha = alpha;
  op.ell = ell;
  op.infrared_shift = infrared_shift;
  const std::size_t m = grid.modes.size();
  op.dims.n_modes = m;
  op.dims.n_pairs = m * (m + 1) / 2;
  op.dims.off1 = 2;
  op.dims.off2 = 2 + 2 * m;
  op.dims.total = 2 + 2 * m + 2 * op.dims.n_pairs;

  op.diag = op.free_diag();
  const double vac = alpha * grid.sum_g2;
  for (std::size_t i = 0; i < op.dims.total; ++i) op.diag[i] += vac;
  if (infrared_shift != 0.0)
    for (std::size_t i = op.dims.off1; i < op.dims.total; ++i)
      op.diag[i] += infrared_shift;
  return op;
}

Eigen::VectorXd FockOperator::free_diag() const {
  Eigen::VectorXd d(dims.total);
  const double e0 = ell.squaredNorm();
  d[0] = e0;
  d[1] = e0;
  const auto& modes = grid->modes;
  const std::size_t m = dims.n_modes;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = (ell - modes[i].k).squaredNorm() + modes[i].r;
    d[idx1(i, 0)] = v;
    d[idx1(i, 1)] = v;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const double v = (ell - modes[i].k - modes[j].k).squaredNorm() +
                       modes[i].r + modes[j].r;
      const std::size_t p = pair_index(i, j, m);
      d[idx2(p, 0)] = v;
      d[idx2(p, 1)] = v;
    }
  return d;
}

VecC FockOperator::apply(const VecC& x) const {
  const std::size_t n = dims.total;
  const std::size_t m = dims.n_modes;
  const auto& modes = grid->modes;
  const double sqa = std::sqrt(alpha);
  VecC y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = diag[i] * x[i];

  const Vector2cd x0(x[0], x[1]);
  Vector2cd acc0 = Vector2cd::Zero();

  // 0 <-> 1 and the one-photon D*D block
  Eigen::Matrix<cd, 3, 2> w1 = Eigen::Matrix<cd, 3, 2>::Zero();
  for (std::size_t i = 0; i < m; ++i) {
    const Mode& md = modes[i];
    const double c = 2.0 * (ell - md.k).dot(md.g);
    const Vector2cd x1i(x[idx1(i, 0)], x[idx1(i, 1)]);
    const Vector2cd up = sqa * block_apply(c, md.u, x0);
    y[idx1(i, 0)] += up[0];
    y[idx1(i, 1)] += up[1];
    acc0 += sqa * block_apply_adj(c, md.u, x1i);
    for (int cc = 0; cc < 3; ++cc) {
      w1(cc, 0) += md.g[cc] * x1i[0];
      w1(cc, 1) += md.g[cc] * x1i[1];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Mode& md = modes[i];
    for (int s = 0; s < 2; ++s) {
      cd t(0.0);
      for (int cc = 0; cc < 3; ++cc) t += md.g[cc] * w1(cc, s);
      y[idx1(i, s)] += 2.0 * alpha * t;
    }
  }

  if (m == 0) {
    y[0] += acc0[0];
    y[1] += acc0[1];
    return y;
  }

  // two-photon D*D auxiliary sums w(j) = sum_m ctilde_{mj} g_m per spin
  std::vector<Eigen::Vector3cd> w2[2];
  w2[0].assign(m, Eigen::Vector3cd::Zero());
  w2[1].assign(m, Eigen::Vector3cd::Zero());
  const double rt2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& gi = modes[i].g;
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      for (int s = 0; s < 2; ++s) {
        const cd c = x[idx2(p, s)];
        if (i == j) {
          w2[s][i] += (rt2 * c) * gi.cast<cd>();
        } else {
          w2[s][j] += c * gi.cast<cd>();
          w2[s][i] += c * modes[j].g.cast<cd>();
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    const Mode& mi = modes[i];
    for (std::size_t j = i; j < m; ++j) {
      const Mode& mj = modes[j];
      const std::size_t p = pair_index(i, j, m);
      const Vector2cd x2p(x[idx2(p, 0)], x[idx2(p, 1)]);

      // sector-preserving 2 alpha D*D
      for (int s = 0; s < 2; ++s) {
        cd t(0.0);
        if (i == j) {
          for (int cc = 0; cc < 3; ++cc) t += rt2 * mi.g[cc] * w2[s][i][cc];
        } else {
          for (int cc = 0; cc < 3; ++cc)
            t += mi.g[cc] * w2[s][j][cc] + mj.g[cc] * w2[s][i][cc];
        }
        y[idx2(p, s)] += 2.0 * alpha * t;
      }

      // 1 <-> 2 couplings
      if (i == j) {
        const double c = 2.0 * (ell - mi.k - mi.k).dot(mi.g);
        const Vector2cd x1i(x[idx1(i, 0)], x[idx1(i, 1)]);
        const Vector2cd up = sqa * rt2 * block_apply(c, mi.u, x1i);
        y[idx2(p, 0)] += up[0];
        y[idx2(p, 1)] += up[1];
        const Vector2cd dn = sqa * rt2 * block_apply_adj(c, mi.u, x2p);
        y[idx1(i, 0)] += dn[0];
        y[idx1(i, 1)] += dn[1];
      } else {
        const double ci = 2.0 * (ell - mi.k - mj.k).dot(mi.g);
        const double cj = 2.0 * (ell - mi.k - mj.k).dot(mj.g);
        const Vector2cd x1i(x[idx1(i, 0)], x[idx1(i, 1)]);
        const Vector2cd x1j(x[idx1(j, 0)], x[idx1(j, 1)]);
        const Vector2cd up = sqa * (block_apply(ci, mi.u, x1j) +
                                    block_apply(cj, mj.u, x1i));
        y[idx2(p, 0)] += up[0];
        y[idx2(p, 1)] += up[1];
        const Vector2cd dnj = sqa * block_apply_adj(ci, mi.u, x2p);
        y[idx1(j, 0)] += dnj[0];
        y[idx1(j, 1)] += dnj[1];
        const Vector2cd dni = sqa * block_apply_adj(cj, mj.u, x2p);
        y[idx1(i, 0)] += dni[0];
        y[idx1(i, 1)] += dni[1];
      }

      // 0 <-> 2 via alpha D*D* and its adjoint
      const double a02 =
          (i == j) ? rt2 * mi.g.squaredNorm() : 2.0 * mi.g.dot(mj.g);
      y[idx2(p, 0)] += alpha * a02 * x0[0];
      y[idx2(p, 1)] += alpha * a02 * x0[1];
      acc0[0] += alpha * a02 * x2p[0];
      acc0[1] += alpha * a02 * x2p[1];
    }
  }

  y[0] += acc0[0];
  y[1] += acc0[1];
  return y;
}

VecC FockOperator::apply_dstar_d(const VecC& x) const {
  const std::size_t m = dims.n_modes;
  const auto& modes = grid->modes;
  VecC y = VecC::Zero(dims.total);
  Eigen::Matrix<cd, 3, 2> w1 = Eigen::Matrix<cd, 3, 2>::Zero();
  for (std::size_t i = 0; i < m; ++i)
    for (int s = 0; s < 2; ++s)
      for (int cc = 0; cc < 3; ++cc)
        w1(cc, s) += modes[i].g[cc] * x[idx1(i, s)];
  for (std::size_t i = 0; i < m; ++i)
    for (int s = 0; s < 2; ++s) {
      cd t(0.0);
      for (int cc = 0; cc < 3; ++cc) t += modes[i].g[cc] * w1(cc, s);
      y[idx1(i, s)] += t;
    }

  const double rt2 = std::sqrt(2.0);
  std::vector<Eigen::Vector3cd> w2[2];
  w2[0].assign(m, Eigen::Vector3cd::Zero());
  w2[1].assign(m, Eigen::Vector3cd::Zero());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      for (int s = 0; s < 2; ++s) {
        const cd c = x[idx2(p, s)];
        if (i == j) {
          w2[s][i] += (rt2 * c) * modes[i].g.cast<cd>();
        } else {
          w2[s][j] += c * modes[i].g.cast<cd>();
          w2[s][i] += c * modes[j].g.cast<cd>();
        }
      }
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      for (int s = 0; s < 2; ++s) {
        cd t(0.0);
        if (i == j) {
          for (int cc = 0; cc < 3; ++cc)
            t += rt2 * modes[i].g[cc] * w2[s][i][cc];
        } else {
          for (int cc = 0; cc < 3; ++cc)
            t += modes[i].g[cc] * w2[s][j][cc] +
                 modes[j].g[cc] * w2[s][i][cc];
        }
        y[idx2(p, s)] += t;
      }
    }
  return y;
}

VecC FockOperator::couple_up_f0(const Vector2cd& x0) const {
  const std::size_t m = dims.n_modes;
  const auto& modes = grid->modes;
  VecC y(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const Mode& md = modes[i];
    const double c = 2.0 * (ell - md.k).dot(md.g);
    const Vector2cd v = block_apply(c, md.u, x0);
    y[2 * i] = v[0];
    y[2 * i + 1] = v[1];
  }
  return y;
}

namespace {

VecC couple12_impl(const FockOperator& op, const VecC& x1, double mom_sign) {
  const std::size_t m = op.dims.n_modes;
  const auto& modes = op.grid->modes;
  const double rt2 = std::sqrt(2.0);
  VecC y = VecC::Zero(2 * op.dims.n_pairs);
  for (std::size_t i = 0; i < m; ++i) {
    const Mode& mi = modes[i];
    for (std::size_t j = i; j < m; ++j) {
      const Mode& mj = modes[j];
      const std::size_t p = pair_index(i, j, m);
      Vector2cd v;
      if (i == j) {
        const double c =
            mom_sign * 2.0 * (op.ell - mi.k - mi.k).dot(mi.g);
        const Vector2cd x1i(x1[2 * i], x1[2 * i + 1]);
        // the spin part keeps its sign; only the momentum scalar flips
        v = rt2 * (c * x1i + cd(0.0, 1.0) * sigma_apply(mi.u, x1i));
      } else {
        const double ci = mom_sign * 2.0 * (op.ell - mi.k - mj.k).dot(mi.g);
        const double cj = mom_sign * 2.0 * (op.ell - mi.k - mj.k).dot(mj.g);
        const Vector2cd x1i(x1[2 * i], x1[2 * i + 1]);
        const Vector2cd x1j(x1[2 * j], x1[2 * j + 1]);
        v = (ci * x1j + cd(0.0, 1.0) * sigma_apply(mi.u, x1j)) +
            (cj * x1i + cd(0.0, 1.0) * sigma_apply(mj.u, x1i));
      }
      y[2 * p] = v[0];
      y[2 * p + 1] = v[1];
    }
  }
  return y;
}

}  // namespace

VecC FockOperator::couple_up_f1(const VecC& x1) const {
  return couple12_impl(*this, x1, 1.0);
}

VecC FockOperator::couple_up_ddstar(const Vector2cd& x0) const {
  const std::size_t m = dims.n_modes;
  const auto& modes = grid->modes;
  const double rt2 = std::sqrt(2.0);
  VecC y(2 * dims.n_pairs);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      const double a = (i == j) ? rt2 * modes[i].g.squaredNorm()
                                : 2.0 * modes[i].g.dot(modes[j].g);
      y[2 * p] = a * x0[0];
      y[2 * p + 1] = a * x0[1];
    }
  return y;
}

GroundState ground_state(const FockOperator& op, double tol, int max_iter,
                         int max_subspace) {
  const std::size_t n = op.dims.total;
  GroundState gs;
  if (n == 0) return gs;
  if (n == 2) {
    // no photon modes: diagonal operator
    gs.energy = std::min(op.diag[0], op.diag[1]);
    gs.vec = VecC::Zero(2);
    gs.vec[op.diag[0] <= op.diag[1] ? 0 : 1] = 1.0;
    gs.converged = true;
    return gs;
  }

  std::vector<VecC> basis, image;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(max_subspace, max_subspace);

  VecC t = VecC::Zero(n);
  t[0] = 1.0;
  VecC ritz, res;
  double theta = 0.0;
  std::size_t inject = 1;

  for (int it = 0; it < max_iter; ++it) {
    // orthonormalize t against the basis, twice for stability
    for (int pass = 0; pass < 2; ++pass)
      for (const VecC& v : basis) t -= v.dot(t) * v;
    double tn = t.norm();
    if (tn < 1e-12) {
      t = VecC::Zero(n);
      t[inject % n] = 1.0;
      ++inject;
      for (int pass = 0; pass < 2; ++pass)
        for (const VecC& v : basis) t -= v.dot(t) * v;
      tn = t.norm();
      if (tn < 1e-12) break;
    }
    t /= tn;
    basis.push_back(t);
    image.push_back(op.apply(t));
    const int k = static_cast<int>(basis.size());
    for (int i = 0; i < k; ++i) {
      h(i, k - 1) = basis[i].dot(image[k - 1]);
      h(k - 1, i) = std::conj(h(i, k - 1));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(k, k));
    theta = es.eigenvalues()[0];
    const Eigen::VectorXcd y = es.eigenvectors().col(0);
    ritz = VecC::Zero(n);
    VecC wr = VecC::Zero(n);
    for (int i = 0; i < k; ++i) {
      ritz += y[i] * basis[i];
      wr += y[i] * image[i];
    }
    res = wr - theta * ritz;
    gs.iterations = it + 1;
    gs.residual = res.norm();
    if (gs.residual < tol) {
      gs.converged = true;
      gs.energy = theta;
      gs.vec = ritz;
      break;
    }

    if (k == max_subspace) {
      // restart with the two lowest Ritz vectors
      const Eigen::VectorXcd y2 = es.eigenvectors().col(1);
      VecC r2 = VecC::Zero(n), w2 = VecC::Zero(n);
      for (int i = 0; i < k; ++i) {
        r2 += y2[i] * basis[i];
        w2 += y2[i] * image[i];
      }
      basis.clear();
      image.clear();
      basis.push_back(ritz);
      image.push_back(wr);
      basis.push_back(r2);
      image.push_back(w2);
      h.setZero();
      h(0, 0) = theta;
      h(1, 1) = es.eigenvalues()[1];
    }

    t = res;
    const double scale = std::max(1.0, std::abs(theta));
    for (std::size_t i = 0; i < n; ++i) {
      double den = op.diag[i] - theta;
      if (std::abs(den) < 1e-10 * scale)
        den = (den >= 0.0 ? 1.0 : -1.0) * 1e-10 * scale;
      t[i] /= den;
    }
  }

  if (!gs.converged) {
    gs.energy = theta;
    gs.vec = ritz;
  }
  if (gs.vec.size() > 0) {
    // canonical phase: largest vacuum-block component real positive
    std::size_t pick = std::abs(gs.vec[0]) >= std::abs(gs.vec[1]) ? 0 : 1;
    if (std::abs(gs.vec[pick]) < 1e-8) {
      double best = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(gs.vec[i]) > best) {
          best = std::abs(gs.vec[i]);
          pick = i;
        }
    }
    const cd ph = gs.vec[pick] / std::abs(gs.vec[pick]);
    gs.vec /= ph;
    gs.vec.normalize();
  }
  return gs;
}

VecC trial_state(const FockOperator& op, TrialKind kind) {
  const std::size_t m = op.dims.n_modes;
  const auto& modes = op.grid->modes;
  const double sqa = std::sqrt(op.alpha);
  VecC psi = VecC::Zero(op.dims.total);
  psi[0] = 1.0;
  const Vector2cd up(1.0, 0.0);

  // first-order dressing -sqrt(alpha) Ainv sigma.E* |0,up>
  VecC s1(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector2cd e = cd(0.0, 1.0) * sigma_apply(modes[i].u, up);
    s1[2 * i] = e[0] / modes[i].q1;
    s1[2 * i + 1] = e[1] / modes[i].q1;
  }
  for (std::size_t i = 0; i < m; ++i) {
    psi[op.idx1(i, 0)] = -sqa * s1[2 * i];
    psi[op.idx1(i, 1)] = -sqa * s1[2 * i + 1];
  }
  if (kind == TrialKind::OnePhoton) return psi;

  const double mom_sign = (kind == TrialKind::TwoPhoton) ? 1.0 : -1.0;
  VecC f1 = couple12_impl(op, s1, mom_sign);
  VecC dds = op.couple_up_ddstar(up);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      const double q2 = (modes[i].k + modes[j].k).squaredNorm() +
                        modes[i].r + modes[j].r;
      for (int s = 0; s < 2; ++s)
        psi[op.idx2(p, s)] =
            op.alpha * (f1[2 * p + s] - dds[2 * p + s]) / q2;
    }
  return psi;
}

double rayleigh_quotient(const FockOperator& op, const VecC& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0)
    throw std::invalid_argument("rayleigh_quotient: zero state");
  return std::real(psi.dot(op.apply(psi))) / n2;
}

namespace {

struct SplitParts {
  double vac, ell2_n0, shift_term, dd_term, neg1, neg2;
  double e0_form, e_form;
  double h1_l_h1, h2_l_h2;
};

SplitParts split_parts(const FockOperator& op, const VecC& psi) {
  const std::size_t m = op.dims.n_modes;
  const std::size_t np = op.dims.n_pairs;
  const double sqa = std::sqrt(op.alpha);
  const Eigen::VectorXd l = op.free_diag();

  const Vector2cd x0(psi[0], psi[1]);
  const VecC x1 = psi.segment(op.dims.off1, 2 * m);
  const VecC x2 = psi.segment(op.dims.off2, 2 * np);

  SplitParts sp{};
  sp.vac = op.alpha * op.grid->sum_g2 * psi.squaredNorm();
  sp.ell2_n0 = op.ell.squaredNorm() * x0.squaredNorm();
  sp.shift_term =
      op.infrared_shift * (x1.squaredNorm() + x2.squaredNorm());

  const VecC ddx = op.apply_dstar_d(psi);
  double dd1 = 0.0, dd2 = 0.0;
  for (std::size_t i = 0; i < 2 * m; ++i)
    dd1 += std::real(std::conj(x1[i]) * ddx[op.dims.off1 + i]);
  for (std::size_t i = 0; i < 2 * np; ++i)
    dd2 += std::real(std::conj(x2[i]) * ddx[op.dims.off2 + i]);
  sp.dd_term = 2.0 * op.alpha * (dd1 + dd2);

  const VecC f0 = op.couple_up_f0(x0);
  double x1_l_x1 = 0.0, cross01 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double li = l[op.idx1(i, 0)];
    for (int s = 0; s < 2; ++s) {
      x1_l_x1 += li * std::norm(x1[2 * i + s]);
      cross01 += std::real(std::conj(x1[2 * i + s]) * f0[2 * i + s]);
    }
  }
  sp.e0_form = x1_l_x1 + 2.0 * sqa * cross01;

  const VecC f1 = op.couple_up_f1(x1);
  const VecC dds = op.couple_up_ddstar(x0);
  double x2_l_x2 = 0.0, cross12 = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const double lp = l[op.idx2(p, 0)];
    for (int s = 0; s < 2; ++s) {
      const cd g2 = sqa * f1[2 * p + s] + op.alpha * dds[2 * p + s];
      x2_l_x2 += lp * std::norm(x2[2 * p + s]);
      cross12 += std::real(std::conj(x2[2 * p + s]) * g2);
    }
  }
  sp.e_form = x2_l_x2 + 2.0 * cross12;

  // completed squares: h1 = x1 + sqa Linv f0, h2 = x2 + Linv g2
  for (std::size_t i = 0; i < m; ++i) {
    const double li = l[op.idx1(i, 0)];
    for (int s = 0; s < 2; ++s) {
      const cd h = x1[2 * i + s] + sqa * f0[2 * i + s] / li;
      sp.h1_l_h1 += li * std::norm(h);
      sp.neg1 += op.alpha * std::norm(f0[2 * i + s]) / li;
    }
  }
  for (std::size_t p = 0; p < np; ++p) {
    const double lp = l[op.idx2(p, 0)];
    for (int s = 0; s < 2; ++s) {
      const cd g2 = sqa * f1[2 * p + s] + op.alpha * dds[2 * p + s];
      const cd h = x2[2 * p + s] + g2 / lp;
      sp.h2_l_h2 += lp * std::norm(h);
      sp.neg2 += std::norm(g2) / lp;
    }
  }
  return sp;
}

}  // namespace

EnergySplit energy_decomposition(const FockOperator& op, const VecC& psi) {
  EnergySplit es;
  es.direct = std::real(psi.dot(op.apply(psi)));
  const SplitParts sp = split_parts(op, psi);
  es.sector_form = sp.vac + sp.ell2_n0 + sp.shift_term + sp.dd_term +
                   sp.e0_form + sp.e_form;
  es.completed_square = sp.vac + sp.ell2_n0 + sp.shift_term + sp.dd_term -
                        sp.neg1 - sp.neg2 + sp.h1_l_h1 + sp.h2_l_h2;
  es.h1_l_h1 = sp.h1_l_h1;
  es.h2_l_h2 = sp.h2_l_h2;
  return es;
}

RemainderDiagnostics remainder_diagnostics(const FockOperator& op,
                                           const VecC& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0)
    throw std::invalid_argument("remainder_diagnostics: zero state");
  const VecC pn = psi / std::sqrt(n2);
  const std::size_t m = op.dims.n_modes;
  const std::size_t np = op.dims.n_pairs;
  const double sqa = std::sqrt(op.alpha);
  const Eigen::VectorXd l = op.free_diag();
  const Vector2cd x0(pn[0], pn[1]);
  const VecC x1 = pn.segment(op.dims.off1, 2 * m);
  const VecC x2 = pn.segment(op.dims.off2, 2 * np);

  RemainderDiagnostics rd;
  const VecC f0 = op.couple_up_f0(x0);
  for (std::size_t i = 0; i < m; ++i) {
    const double li = l[op.idx1(i, 0)];
    for (int s = 0; s < 2; ++s) {
      const cd h = x1[2 * i + s] + sqa * f0[2 * i + s] / li;
      rd.h1_norm2 += std::norm(h);
      rd.h1_l_h1 += li * std::norm(h);
    }
  }
  const VecC f1 = op.couple_up_f1(x1);
  const VecC dds = op.couple_up_ddstar(x0);
  for (std::size_t p = 0; p < np; ++p) {
    const double lp = l[op.idx2(p, 0)];
    for (int s = 0; s < 2; ++s) {
      const cd g2 = sqa * f1[2 * p + s] + op.alpha * dds[2 * p + s];
      const cd h = x2[2 * p + s] + g2 / lp;
      rd.h2_norm2 += std::norm(h);
      rd.h2_l_h2 += lp * std::norm(h);
    }
  }
  rd.total = rd.h1_l_h1 + rd.h2_l_h2;
  return rd;
}

PhotonDensity photon_density(const FockOperator& op, const VecC& psi) {
  const std::size_t m = op.dims.n_modes;
  const auto& modes = op.grid->modes;
  PhotonDensity pd;
  pd.rho = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < m; ++i)
    for (int s = 0; s < 2; ++s) pd.rho[i] += std::norm(psi[op.idx1(i, s)]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      const double w =
          std::norm(psi[op.idx2(p, 0)]) + std::norm(psi[op.idx2(p, 1)]);
      if (i == j) {
        pd.rho[i] += 2.0 * w;
      } else {
        pd.rho[i] += w;
        pd.rho[j] += w;
      }
    }
  for (std::size_t i = 0; i < m; ++i) {
    pd.number += pd.rho[i];
    pd.sum_rho_r += pd.rho[i] * modes[i].r;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (int s = 0; s < 2; ++s)
      pd.hf_expectation += modes[i].r * std::norm(psi[op.idx1(i, s)]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t p = pair_index(i, j, m);
      const double hf = modes[i].r + modes[j].r;
      for (int s = 0; s < 2; ++s)
        pd.hf_expectation += hf * std::norm(psi[op.idx2(p, s)]);
    }
  pd.identity_residual = std::abs(pd.sum_rho_r - pd.hf_expectation);
  return pd;
}

namespace {

// certify mineig(c H_f - a a^T-structure) >= -eps on the pair sector via the
// M x M congruence lambda_max(S(eps)) <= 1
bool certify_pair_bound(const std::vector<double>& amp,
                        const std::vector<double>& r, double c, double eps) {
  const std::size_t m = amp.size();
  Eigen::MatrixXd s(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = c * (r[i] + r[j]) + eps;
      if (i == j) {
        diag += 2.0 * amp[i] * amp[i] / a;
      } else {
        diag += amp[j] * amp[j] / a;
        s(i, j) = amp[i] * amp[j] / a;
      }
    }
    s(i, i) = diag;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  return es.eigenvalues().maxCoeff() <= 1.0;
}

double sector1_mineig(const std::vector<double>& amp,
                      const std::vector<double>& r, double c) {
  const std::size_t m = amp.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a(i, j) = -amp[i] * amp[j];
    a(i, i) += c * r[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues().minCoeff();
}

}  // namespace

AuxiliaryBounds check_auxiliary_bounds(const ModeGrid& grid, double alpha,
                                       double tol) {
  AuxiliaryBounds ab;
  ab.tol = tol;
  const std::size_t m = grid.modes.size();
  const double lam = grid.params.lambda;
  if (m == 0) {
    ab.d_s1_ok = ab.d_s2_ok = ab.e_s1_ok = ab.e_s2_ok = true;
    return ab;
  }
  std::vector<double> d(m), e(m), r(m), x(m);
  const double a3 = alpha > 0.0 ? alpha * alpha * alpha : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    r[i] = grid.modes[i].r;
    d[i] = grid.modes[i].g.norm();
    e[i] = r[i] * d[i];
    x[i] = d[i] / std::sqrt(r[i] + a3);
  }

  const double cd_ = 2.0 / pi * lam;
  const double ce = 2.0 * pi / 3.0 * lam;
  ab.d_s1_mineig = sector1_mineig(d, r, cd_);
  ab.e_s1_mineig = sector1_mineig(e, r, ce);
  ab.d_s1_ok = ab.d_s1_mineig >= -tol;
  ab.e_s1_ok = ab.e_s1_mineig >= -tol;
  ab.d_s2_ok = certify_pair_bound(d, r, cd_, tol);
  ab.e_s2_ok = certify_pair_bound(e, r, ce, tol);

  double sx2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) sx2 += x[i] * x[i];
  ab.commutator_discrete = sx2;
  if (alpha > 0.0) {
    ab.commutator_printed =
        2.0 / pi *
        (lam + 3.0 * a3 * std::log(1.0 / alpha) - a3 * std::log(lam + a3));
  } else {
    ab.commutator_printed = 2.0 / pi * lam;
  }
  ab.commutator_quadrature =
      quad_1d([&](double rr) { return 2.0 / pi * rr / (rr + a3); }, 0.0, lam,
              1e-12)
          .value;

  // identity-multiple check by explicit up/down composition on sector 1
  double spread = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    // ||X* e_j||^2 - ||X e_j||^2 over the n <= 2 space
    double up = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double amp = (i == j) ? std::sqrt(2.0) * x[i] : x[i];
      up += amp * amp;
    }
    const double dn = x[j] * x[j];
    spread = std::max(spread, std::abs(up - dn - sx2));
  }
  ab.commutator_spread = spread;
  return ab;
}

FitResult fit_expansion(const std::vector<double>& alphas,
                        const std::vector<double>& energies) {
  if (alphas.size() != energies.size() || alphas.size() < 2)
    throw std::invalid_argument("fit_expansion: need >= 2 (alpha, E) points");
  bool distinct = false;
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] != alphas[0]) distinct = true;
  if (!distinct)
    throw std::invalid_argument("fit_expansion: singular design");
  const Eigen::Index n = static_cast<Eigen::Index>(alphas.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = alphas[i];
    x(i, 1) = alphas[i] * alphas[i];
    b[i] = energies[i];
  }
  const Eigen::VectorXd c = x.colPivHouseholderQr().solve(b);
  FitResult fr;
  fr.c1 = c[0];
  fr.c2 = c[1];
  fr.rms = std::sqrt((x * c - b).squaredNorm() / static_cast<double>(n));
  return fr;
}

}  // namespace pflab
