#include "pflab/binding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pflab/quadrature.hpp"

namespace pflab {

RadialPotential square_well() {
  RadialPotential p;
  p.name = "square_well";
  p.r0 = 1.0;
  p.v = [](double r) { return r <= 1.0 ? -1.0 : 0.0; };
  return p;
}

RadialPotential smooth_bump() {
  RadialPotential p;
  p.name = "smooth_bump";
  p.r0 = 1.0;
  p.v = [](double r) {
    if (r >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return -q * q;
  };
  return p;
}

ShootResult radial_shoot(const RadialPotential& pot, double g, int n_steps) {
  if (g < 0.0) throw std::invalid_argument("radial_shoot: g < 0");
  if (n_steps < 2 || n_steps % 2 != 0)
    throw std::invalid_argument("radial_shoot: need even n_steps >= 2");
  const double h = pot.r0 / n_steps;
  if (h <= 0.0) throw std::invalid_argument("radial_shoot: step underflow");
  ShootResult sr;
  sr.g = g;
  sr.n_steps = n_steps;
  sr.r.reserve(n_steps + 1);
  sr.u.reserve(n_steps + 1);
  sr.up.reserve(n_steps + 1);
  double u = 0.0, up = 1.0;
  sr.r.push_back(0.0);
  sr.u.push_back(u);
  sr.up.push_back(up);
  for (int i = 0; i < n_steps; ++i) {
    const double r = i * h;
    const auto acc = [&](double rr, double uu) { return g * pot.v(rr) * uu; };
    const double k1u = up, k1p = acc(r, u);
    const double k2u = up + 0.5 * h * k1p, k2p = acc(r + 0.5 * h, u + 0.5 * h * k1u);
    const double k3u = up + 0.5 * h * k2p, k3p = acc(r + 0.5 * h, u + 0.5 * h * k2u);
    const double k4u = up + h * k3p, k4p = acc(r + h, u + h * k3u);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    up += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    sr.r.push_back((i + 1) * h);
    sr.u.push_back(u);
    sr.up.push_back(up);
  }
  sr.u_r0 = u;
  sr.up_r0 = up;
  return sr;
}

namespace {

// cumulative trapezoid of f over the table grid
std::vector<double> cumtrapz(const std::vector<double>& r,
                             const std::vector<double>& f) {
  std::vector<double> c(r.size(), 0.0);
  for (std::size_t i = 1; i < r.size(); ++i)
    c[i] = c[i - 1] + 0.5 * (r[i] - r[i - 1]) * (f[i] + f[i - 1]);
  return c;
}

double integral_equation_residual(const RadialPotential& pot,
                                  const ShootResult& sr) {
  // psi(r) = - int g v(s) (u(s)/s) s^2 / max(r,s) ds, reduced to
  // u(r)/r = - (1/r) int_0^r g v u s ds - int_r^r0 g v u ds
  const std::size_t n = sr.r.size();
  std::vector<double> f1(n, 0.0), f2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = sr.g * pot.v(sr.r[i]) * sr.u[i];
    f1[i] = w * sr.r[i];
    f2[i] = w;
  }
  const std::vector<double> c1 = cumtrapz(sr.r, f1);
  const std::vector<double> c2 = cumtrapz(sr.r, f2);
  const double c2_end = c2.back();

  const int n_check = 200;
  const std::size_t stride = (n - 1) / n_check;
  double worst = 0.0, scale = 0.0;
  for (int k = 1; k <= n_check; ++k) {
    const std::size_t i = k * stride;
    const double r = sr.r[i];
    const double lhs = sr.u[i] / r;
    const double rhs = -(c1[i] / r + (c2_end - c2[i]));
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(lhs));
  }
  return worst / std::max(scale, 1e-300);
}

}  // namespace

ResonanceResult find_resonance_coupling(const RadialPotential& pot,
                                        double g_lo, double g_hi,
                                        double tol, int n_steps) {
  ShootResult lo = radial_shoot(pot, g_lo, n_steps);
  ShootResult hi = radial_shoot(pot, g_hi, n_steps);
  if (lo.up_r0 == 0.0) hi = lo;
  if (lo.up_r0 * hi.up_r0 > 0.0)
    throw std::invalid_argument(
        "find_resonance_coupling: no sign change on bracket");
  double a = g_lo, b = g_hi;
  ShootResult mid = lo;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    mid = radial_shoot(pot, m, n_steps);
    if (std::abs(mid.up_r0) <= tol || b - a <= tol * std::max(1.0, m)) break;
    if (mid.up_r0 * lo.up_r0 <= 0.0) {
      b = m;
    } else {
      a = m;
      lo = mid;
    }
  }
  ResonanceResult res;
  res.pot = pot;
  res.g_star = mid.g;
  res.shoot_residual = std::abs(mid.up_r0);
  res.tail_c = mid.u_r0;
  // beyond r0 the potential vanishes, so u grows exactly linearly
  res.tail_dev = std::abs(mid.up_r0) * 2.0 * pot.r0 /
                 std::max(std::abs(mid.u_r0), 1e-300);
  res.zerorr_residual = integral_equation_residual(pot, mid);
  res.shoot = std::move(mid);
  return res;
}

std::pair<double, double> resonance_bracket(const RadialPotential& pot,
                                            double g_min, double g_max) {
  double g_prev = g_min;
  double f_prev = radial_shoot(pot, g_prev).up_r0;
  for (double g = g_min * 1.25; g <= g_max; g *= 1.25) {
    const double f = radial_shoot(pot, g).up_r0;
    if (f_prev * f <= 0.0) return {g_prev, g};
    g_prev = g;
    f_prev = f;
  }
  throw std::runtime_error("resonance_bracket: no resonance below g_max");
}

namespace {

// quintic smoothstep on [0,1] and the cutoff pair on t in [1,2]
double s5(double x) { return ((6.0 * x - 15.0) * x + 10.0) * x * x * x; }
double s5p(double x) { return 30.0 * x * x * (x - 1.0) * (x - 1.0); }
double s5pp(double x) { return 60.0 * x * (2.0 * x - 1.0) * (x - 1.0); }

double ucut(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  return std::cos(0.5 * pi * s5(t - 1.0));
}
double ucut_p(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  return -0.5 * pi * s5p(t - 1.0) * std::sin(0.5 * pi * s5(t - 1.0));
}
double ucut_pp(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = s5(t - 1.0), sp = s5p(t - 1.0), spp = s5pp(t - 1.0);
  return -0.5 * pi *
         (spp * std::sin(0.5 * pi * s) +
          0.5 * pi * sp * sp * std::cos(0.5 * pi * s));
}
double vcut(double t) {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return 1.0;
  return std::sin(0.5 * pi * s5(t - 1.0));
}
double vcut_p(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  return 0.5 * pi * s5p(t - 1.0) * std::cos(0.5 * pi * s5(t - 1.0));
}

struct InteriorIntegrals {
  double psi2 = 0.0;    // int u^2 dr                  = int psi^2 r^2 dr
  double dpsi2 = 0.0;   // int (u' - u/r)^2 dr         = int psi'^2 r^2 dr
  double vpsi2 = 0.0;   // int g v u^2 dr              = int V psi^2 r^2 dr
  double lap2 = 0.0;    // int (g v u)^2 dr            = int (lap psi)^2 r^2 dr
};

// composite Simpson over the RK4 table; all derivatives analytic from the ODE
InteriorIntegrals interior_integrals(const RadialPotential& pot,
                                     const ShootResult& sr) {
  const std::size_t n = sr.r.size();
  InteriorIntegrals ii;
  const double h = pot.r0 / sr.n_steps;
  auto add = [&](std::size_t i, double w) {
    const double r = sr.r[i];
    const double u = sr.u[i];
    const double up = sr.up[i];
    const double gv = sr.g * pot.v(r);
    // u ~ r near 0, so u' - u/r -> 0; the r = 0 node contributes zero
    const double dpsi = (r > 0.0) ? up - u / r : 0.0;
    ii.psi2 += w * u * u;
    ii.dpsi2 += w * dpsi * dpsi;
    ii.vpsi2 += w * gv * u * u;
    ii.lap2 += w * gv * u * gv * u;
  };
  for (std::size_t i = 0; i < n; ++i) {
    double w = h / 3.0;
    if (i == 0 || i == n - 1) {
      // endpoint weight
    } else if (i % 2 == 1) {
      w *= 4.0;
    } else {
      w *= 2.0;
    }
    add(i, w);
  }
  return ii;
}

double quad12(const std::function<double(double)>& f) {
  return quad_1d(f, 1.0, 2.0, 1e-13).value;
}

}  // namespace

TruncatedState truncate_state(const ResonanceResult& res, double alpha,
                              double epsilon) {
  if (alpha < 0.0 || epsilon <= 0.0)
    throw std::invalid_argument("truncate_state: need alpha >= 0, eps > 0");
  const double b = alpha * epsilon;
  const double r0 = res.pot.r0;
  if (b > 0.0 && 1.0 / b < 2.0 * r0)
    throw std::invalid_argument(
        "truncate_state: cutoff radius 1/(eps alpha) below 2 r0");

  TruncatedState ts;
  ts.alpha = alpha;
  ts.epsilon = epsilon;
  const InteriorIntegrals ii = interior_integrals(res.pot, res.shoot);
  const double c = res.tail_c;
  const double c2 = c * c;

  double partition = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 1.0 + i / 200.0;
    const double u = ucut(t), v = vcut(t);
    partition = std::max(partition, std::abs(u * u + v * v - 1.0));
  }
  ts.partition_dev = partition;

  if (b == 0.0) {
    // no truncation: the Newton tail is not square integrable, report the
    // divergent pieces as infinite
    ts.norm2 = std::numeric_limits<double>::infinity();
    ts.p_norm2 = 4.0 * pi * (ii.dpsi2 + c2 / r0);
    ts.p2_norm2 = 4.0 * pi * ii.lap2;
    ts.c1 = ts.p2_norm2 / ts.p_norm2;
    ts.c2 = 0.0;
    return ts;
  }

  const double r_in = 1.0 / b;
  // interior [0, r0] + Newton segment [r0, r_in] + cutoff annulus, all in
  // closed form except the smooth one-dimensional t-integrals
  const double i_u2 = quad12([](double t) { return ucut(t) * ucut(t); });
  const double i_du2 = quad12([](double t) {
    const double d = ucut_p(t) - ucut(t) / t;
    return d * d;
  });
  const double i_ddu2 =
      quad12([](double t) { return ucut_pp(t) * ucut_pp(t); });

  ts.norm2 = 4.0 * pi * (ii.psi2 + c2 * (r_in - r0) + c2 / b * i_u2);
  ts.p_norm2 =
      4.0 * pi * (ii.dpsi2 + c2 * (1.0 / r0 - 1.0 / r_in) + c2 * b * i_du2);
  ts.p2_norm2 = 4.0 * pi * (ii.lap2 + c2 * b * b * b * i_ddu2);
  ts.c1 = ts.p2_norm2 / ts.p_norm2;
  ts.c2 = ts.p_norm2 / (b * ts.norm2);
  return ts;
}

BindingReport binding_margin(const ResonanceResult& res, double lambda,
                             double alpha, double epsilon) {
  BindingReport br;
  br.lambda = lambda;
  br.alpha = alpha;
  br.epsilon = epsilon;
  br.state = truncate_state(res, alpha, epsilon);
  const double b = alpha * epsilon;
  const double r0 = res.pot.r0;
  const InteriorIntegrals ii = interior_integrals(res.pot, res.shoot);
  const double c2 = res.tail_c * res.tail_c;

  const double interior_energy = 4.0 * pi * (ii.dpsi2 + ii.vpsi2);
  if (b == 0.0) {
    br.energy = interior_energy + 4.0 * pi * c2 / r0;
    br.term_resonance = br.energy;
    br.margin = br.energy;
    br.d = 1.0 / (2.0 * (br.state.c1 + 1.0));
    return br;
  }
  const double r_in = 1.0 / b;

  const double i_du2 = quad12([](double t) {
    const double d = ucut_p(t) - ucut(t) / t;
    return d * d;
  });
  const double i_dv2 = quad12([](double t) {
    const double d = vcut_p(t) - vcut(t) / t;
    return d * d;
  });
  const double i_grad = quad12([](double t) {
    const double du = ucut_p(t), dv = vcut_p(t);
    return du * du + dv * dv;
  });

  br.energy = interior_energy + 4.0 * pi * c2 * (1.0 / r0 - 1.0 / r_in) +
              4.0 * pi * c2 * b * i_du2;
  br.term_resonance = interior_energy + 4.0 * pi * c2 / r0;
  br.term_v = 4.0 * pi * (c2 * b * i_dv2 + c2 * b / 2.0);
  br.term_grad = 4.0 * pi * c2 * b * i_grad;
  br.ims_rhs = br.term_resonance - br.term_v + br.term_grad;
  const double scale = std::abs(br.energy) + std::abs(br.term_v) +
                       std::abs(br.term_grad) + 1e-300;
  br.ims_residual = std::abs(br.energy - br.ims_rhs) / scale;

  br.d = 1.0 / (2.0 * (br.state.c1 + 1.0));
  br.margin = br.energy - alpha * std::log1p(lambda) /
                              (6.0 * pi * (br.state.c1 + 1.0)) *
                              br.state.p_norm2;
  br.nu = -br.margin / br.state.p_norm2;
  br.delta =
      alpha > 0.0 ? -br.margin / (alpha * alpha * br.state.norm2) : 0.0;
  // no photon gain term without coupling, so the flag is not left to the
  // sign of the resonance residual
  br.binding = alpha > 0.0 && br.margin < 0.0;

  br.exchange_closed =
      2.0 / (3.0 * pi) * std::log1p(lambda) * br.state.p_norm2;
  const QuadResult xq = quad_3d_generic(
      [](double p, double x, double) { return x * x / (1.0 + p); },
      {0.0, -1.0, 0.0}, {lambda, 1.0, 2.0 * pi}, 1e-10);
  br.exchange_quad = br.state.p_norm2 * xq.value / (2.0 * pi * pi);
  return br;
}

ScanResult scan_epsilon(const ResonanceResult& res, double lambda,
                        double alpha, int j_min, int j_max) {
  if (j_min > j_max)
    throw std::invalid_argument("scan_epsilon: empty j range");
  ScanResult sc;
  double best = std::numeric_limits<double>::infinity();
  for (int j = j_min; j <= j_max; ++j) {
    const double eps = std::ldexp(1.0, -j);
    if (alpha * eps > 0.0 && 1.0 / (alpha * eps) < 2.0 * res.pot.r0)
      continue;  // cutoff would start inside the potential support
    BindingReport br = binding_margin(res, lambda, alpha, eps);
    if (br.margin < best) {
      best = br.margin;
      sc.best_index = static_cast<int>(sc.rows.size());
    }
    sc.rows.push_back(std::move(br));
  }
  if (sc.rows.empty())
    throw std::invalid_argument("scan_epsilon: no admissible epsilon");
  return sc;
}

}  // namespace pflab
