#include "pflab/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pflab {

double chi(double r, const Cutoff& cut) {
  return (r <= cut.lambda && cut.lambda > 0.0) ? 1.0 : 0.0;
}

PolFrame pol_frame(const Vec3& k, const Vec3& axis) {
  const double r = k.norm();
  if (r <= 0.0) throw std::invalid_argument("pol_frame: |k| = 0");
  const Vec3 khat = k / r;
  Vec3 a = axis.normalized();
  Vec3 c = a.cross(k);
  if (c.norm() < 1e-12 * r) {
    // k parallel to the axis: fall back to the x direction
    a = Vec3::UnitX();
    c = a.cross(k);
  }
  PolFrame f;
  f.e1 = c.normalized();
  f.e2 = khat.cross(f.e1);
  return f;
}

Vec3 form_factor_g(const Vec3& k, const Cutoff& cut, int pol, const Vec3& axis) {
  const double r = k.norm();
  const double c = chi(r, cut);
  if (c == 0.0) return Vec3::Zero();
  const PolFrame f = pol_frame(k, axis);
  const Vec3& eps = (pol == 0) ? f.e1 : f.e2;
  return (c / (2.0 * pi * std::sqrt(r))) * eps;
}

Vec3 form_factor_u(const Vec3& k, const Cutoff& cut, int pol, const Vec3& axis) {
  return k.cross(form_factor_g(k, cut, pol, axis));
}

Mat3 pol_sum_gg(const Vec3& k, const Cutoff& cut) {
  const double r = k.norm();
  if (r <= 0.0) throw std::invalid_argument("pol_sum_gg: |k| = 0");
  const double c = chi(r, cut);
  if (c == 0.0) return Mat3::Zero();
  const Vec3 khat = k / r;
  return (c * c / (4.0 * pi * pi * r)) *
         (Mat3::Identity() - khat * khat.transpose());
}

double pol_sum_hh(const Vec3& k, const Cutoff& cut) {
  const double r = k.norm();
  const double c = chi(r, cut);
  return c * c * r / (2.0 * pi * pi);
}

double projector_trace_product(double t) { return 1.0 + t * t; }

double denom_q1(double r1) { return r1 * r1 + r1; }
double denom_r2(double r2) { return r2 * r2 + r2; }
double denom_q2(double r1, double r2, double t) {
  return r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * t + r1 + r2;
}

Kernel kernel_from_name(std::string_view name) {
  if (name == "DD") return Kernel::DD;
  if (name == "EEEE") return Kernel::EEEE;
  if (name == "EPD") return Kernel::EPD;
  if (name == "EEDD") return Kernel::EEDD;
  if (name == "IEE") return Kernel::IEE;
  if (name == "N1") return Kernel::N1;
  throw std::invalid_argument("unknown kernel name: " + std::string(name));
}

std::string_view kernel_name(Kernel which) {
  switch (which) {
    case Kernel::DD: return "DD";
    case Kernel::EEEE: return "EEEE";
    case Kernel::EPD: return "EPD";
    case Kernel::EEDD: return "EEDD";
    case Kernel::IEE: return "IEE";
    case Kernel::N1: return "N1";
  }
  throw std::invalid_argument("unknown kernel enum value");
}

namespace {

// shared guard: the kernels carry the chi^2 factors of both photons
bool outside(Kernel which, double r1, double r2, const Cutoff& cut) {
  if (cut.lambda <= 0.0 || r1 < 0.0 || r1 > cut.lambda) return true;
  if (which == Kernel::IEE || which == Kernel::N1) return false;
  return r2 < 0.0 || r2 > cut.lambda;
}

}  // namespace

double reduced_kernel(Kernel which, double r1, double r2, double t,
                      const Cutoff& cut) {
  if (outside(which, r1, r2, cut)) return 0.0;
  const double q1 = denom_q1(r1);
  const double rr2 = denom_r2(r2);
  const double q2 = denom_q2(r1, r2, t);
  const double ip2 = 1.0 / (pi * pi);
  switch (which) {
    case Kernel::IEE:
      return (2.0 / pi) * r1 * r1 / (1.0 + r1);
    case Kernel::N1:
      return (2.0 / pi) * r1 / ((1.0 + r1) * (1.0 + r1));
    case Kernel::DD:
      return ip2 * r1 * r2 * (1.0 + t * t) / q2;
    case Kernel::EEEE: {
      const double c3 = r1 * r1 * r1 * r2 * r2 * r2;
      return 2.0 * ip2 * c3 / (q1 * q1 * q2) +
             ip2 * c3 * (t * t - 1.0) / (q1 * rr2 * q2);
    }
    case Kernel::EPD: {
      const double s2 = 1.0 - t * t;
      return ip2 * s2 *
             (r1 * r1 * r1 * r1 * r1 * r2 / (q1 * q1 * q2) -
              0.5 * r1 * r1 * r1 * r2 * r2 * r2 / (q1 * rr2 * q2));
    }
    case Kernel::EEDD:
      return -2.0 * ip2 * r1 * r1 * r2 * r2 * t / (q1 * q2);
  }
  return 0.0;
}

double reduced_kernel_alt(Kernel which, double r1, double r2, double t,
                          const Cutoff& cut) {
  if (outside(which, r1, r2, cut)) return 0.0;
  const double q1 = denom_q1(r1);
  const double rr2 = denom_r2(r2);
  const double q2 = denom_q2(r1, r2, t);
  const double ip2 = 1.0 / (pi * pi);
  switch (which) {
    case Kernel::EEEE: {
      const double c3 = r1 * r1 * r1 * r2 * r2 * r2;
      return 2.0 * ip2 * c3 * (1.0 / (q1 * q1 * q2) + 1.0 / (q1 * rr2 * q2));
    }
    case Kernel::EPD: {
      const double s2 = 1.0 - t * t;
      const double c5 = r1 * r1 * r1 * r1 * r1 * r2;
      return ip2 * s2 * c5 * (1.0 / (q1 * q1 * q2) + 1.0 / (q1 * rr2 * q2));
    }
    default:
      return reduced_kernel(which, r1, r2, t, cut);
  }
}

}  // namespace pflab
