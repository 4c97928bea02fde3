#include "pflab/coeffs.hpp"

#include <cmath>
#include <stdexcept>

namespace pflab {

double e1_closed(const Cutoff& cut) {
  const double lam = std::max(0.0, cut.lambda);
  return 2.0 / pi * (lam - std::log1p(lam));
}

double iee_closed(const Cutoff& cut) {
  const double lam = std::max(0.0, cut.lambda);
  return 2.0 / pi * (0.5 * lam * lam - lam + std::log1p(lam));
}

double n1_closed(const Cutoff& cut) {
  const double lam = std::max(0.0, cut.lambda);
  return 2.0 / pi * (std::log1p(lam) + 1.0 / (1.0 + lam) - 1.0);
}

namespace {

QuadResult vev2_impl(Kernel which, const Cutoff& cut, double tol, bool alt) {
  const double lam = cut.lambda;
  QuadResult zero;
  if (lam <= 0.0) return zero;
  const auto eval = alt ? reduced_kernel_alt : reduced_kernel;
  if (which == Kernel::IEE || which == Kernel::N1) {
    return quad_1d([&](double r) { return eval(which, r, 0.0, 0.0, cut); },
                   0.0, lam, tol);
  }
  return quad_3d_box(
      [&](double r1, double r2, double t) {
        return eval(which, r1, r2, t, cut);
      },
      cut, tol);
}

}  // namespace

QuadResult vev2(Kernel which, const Cutoff& cut, double tol) {
  return vev2_impl(which, cut, tol, false);
}

namespace {

E2Breakdown e2_assemble(const Cutoff& cut, double tol, bool alt) {
  E2Breakdown b;
  b.dd = vev2_impl(Kernel::DD, cut, tol, alt);
  b.eeee = vev2_impl(Kernel::EEEE, cut, tol, alt);
  b.epd = vev2_impl(Kernel::EPD, cut, tol, alt);
  b.eedd = vev2_impl(Kernel::EEDD, cut, tol, alt);
  b.iee = vev2_impl(Kernel::IEE, cut, tol * 0.01, alt);
  b.n1 = vev2_impl(Kernel::N1, cut, tol * 0.01, alt);
  b.value = -(b.dd.value + b.eeee.value + 4.0 * b.epd.value -
              2.0 * b.eedd.value - b.iee.value * b.n1.value);
  b.error = b.dd.error + b.eeee.error + 4.0 * b.epd.error +
            2.0 * b.eedd.error + std::abs(b.iee.value) * b.n1.error +
            std::abs(b.n1.value) * b.iee.error;
  b.converged = b.dd.converged && b.eeee.converged && b.epd.converged &&
                b.eedd.converged && b.iee.converged && b.n1.converged;
  return b;
}

}  // namespace

E2Breakdown e2_total(const Cutoff& cut, double tol) {
  return e2_assemble(cut, tol, false);
}

E2Breakdown e2_total_alt(const Cutoff& cut, double tol) {
  return e2_assemble(cut, tol, true);
}

SigmaPrediction sigma_prediction(double alpha, const Cutoff& cut, double tol) {
  if (alpha < 0.0) throw std::invalid_argument("sigma_prediction: alpha < 0");
  SigmaPrediction p;
  p.alpha = alpha;
  p.lambda = cut.lambda;
  p.e1 = e1_closed(cut);
  const E2Breakdown b = e2_total(cut, tol);
  p.e2 = b.value;
  p.sigma = alpha * p.e1 + alpha * alpha * p.e2;
  p.error = alpha * alpha * b.error;
  return p;
}

}  // namespace pflab
