#include "pflab/modes.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace pflab {

namespace {

void gauss_legendre(int n, std::vector<double>& xs, std::vector<double>& ws) {
  xs.assign(n, 0.0);
  ws.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // mirror for exact symmetry about 0
    xs[i] = -x;
    ws[i] = w;
    xs[n - 1 - i] = x;
    ws[n - 1 - i] = w;
  }
  if (n % 2 == 1) xs[n / 2] = 0.0;
}

}  // namespace

ModeGrid build_grid(const GridParams& params) {
  if (params.lambda < 0.0)
    throw std::invalid_argument("build_grid: lambda < 0");
  if (params.n_r < 2 || params.n_t < 2)
    throw std::invalid_argument("build_grid: need n_r >= 2 and n_t >= 2");
  if (params.n_phi < 4 || params.n_phi % 2 != 0)
    throw std::invalid_argument("build_grid: need even n_phi >= 4");

  ModeGrid grid;
  grid.params = params;
  if (params.lambda == 0.0) return grid;

  std::vector<double> ts, wt;
  gauss_legendre(params.n_t, ts, wt);
  if (!params.symmetric)
    for (double& t : ts) t += 0.1 * (1.0 - t * t);

  const Cutoff cut{params.lambda};
  const double w_phi = 2.0 * pi / params.n_phi;
  grid.modes.reserve(2u * params.n_r * params.n_t * params.n_phi);
  for (int ir = 0; ir < params.n_r; ++ir) {
    const double s = (ir + 0.5) / params.n_r;
    const double r = params.lambda * s * s;
    const double w_r = 2.0 * params.lambda * s / params.n_r;
    for (int it = 0; it < params.n_t; ++it) {
      const double t = ts[it];
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int ip = 0; ip < params.n_phi; ++ip) {
        const double phi = 2.0 * pi * ip / params.n_phi;
        const Vec3 k(r * st * std::cos(phi), r * st * std::sin(phi), r * t);
        const double w = w_r * r * r * wt[it] * w_phi;
        for (int pol = 0; pol < 2; ++pol) {
          Mode m;
          m.k = k;
          m.r = r;
          m.w = w;
          m.pol = pol;
          m.g = std::sqrt(w) * form_factor_g(k, cut, pol, params.frame_axis);
          m.u = k.cross(m.g);
          m.g2 = m.g.squaredNorm();
          m.q1 = r * r + r;
          grid.modes.push_back(m);
          grid.sum_g2 += m.g2;
        }
      }
    }
  }
  return grid;
}

DiscreteCoeffs discrete_coeffs(const ModeGrid& grid) {
  DiscreteCoeffs c;
  c.sum_g2 = grid.sum_g2;
  const std::size_t n = grid.modes.size();
  for (std::size_t m = 0; m < n; ++m) {
    const Mode& a = grid.modes[m];
    const double u2 = a.u.squaredNorm();
    c.iee += u2 / a.q1;
    c.n1 += u2 / (a.q1 * a.q1);
  }

  struct PairSums {
    double dd = 0.0, eeee = 0.0, epd = 0.0, eedd = 0.0;
  };
  std::vector<PairSums> partial(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (std::int64_t mi = 0; mi < static_cast<std::int64_t>(n); ++mi) {
    const Mode& a = grid.modes[mi];
    const double ua2 = a.u.squaredNorm();
    PairSums ps;
    for (std::size_t mp = 0; mp < n; ++mp) {
      const Mode& b = grid.modes[mp];
      const Vec3 s = a.k + b.k;
      const double q2 = s.squaredNorm() + a.r + b.r;
      const double gg = a.g.dot(b.g);
      const double uu = a.u.dot(b.u);
      const double ub2 = b.u.squaredNorm();
      ps.dd += 2.0 * gg * gg / q2;
      ps.eeee += ua2 * ub2 / (a.q1 * a.q1 * q2) +
                 (2.0 * uu * uu - ua2 * ub2) / (a.q1 * b.q1 * q2);
      const double sga = s.dot(a.g);
      const double sgb = s.dot(b.g);
      ps.epd += ua2 * sgb * sgb / (a.q1 * a.q1 * q2) +
                sga * sgb * uu / (a.q1 * b.q1 * q2);
      ps.eedd += 2.0 * (-uu) * gg / (a.q1 * q2);
    }
    partial[mi] = ps;
  }
  for (const PairSums& ps : partial) {
    c.dd += ps.dd;
    c.eeee += ps.eeee;
    c.epd += ps.epd;
    c.eedd += ps.eedd;
  }

  c.e1 = c.sum_g2 - c.iee;
  c.e2 = -(c.dd + c.eeee + 4.0 * c.epd - 2.0 * c.eedd - c.iee * c.n1);
  return c;
}

double angular_cancellation_residual(const ModeGrid& grid) {
  using cdub = std::complex<double>;
  // (sigma.u)|up> = (u_z, u_x + i u_y); accumulate the 3-vector of spinors
  cdub acc[3][2] = {};
  for (const Mode& m : grid.modes) {
    const cdub up(m.u[2], 0.0);
    const cdub dn(m.u[0], m.u[1]);
    for (int i = 0; i < 3; ++i) {
      acc[i][0] += m.g[i] / m.q1 * up;
      acc[i][1] += m.g[i] / m.q1 * dn;
    }
  }
  double nrm2 = 0.0;
  for (int i = 0; i < 3; ++i)
    nrm2 += std::norm(acc[i][0]) + std::norm(acc[i][1]);
  return std::sqrt(nrm2);
}

}  // namespace pflab
