#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace pflab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = 3.14159265358979323846;

// hard radial momentum cutoff; lambda = 0 forces every field integral to zero
struct Cutoff {
  double lambda = 1.0;
};

// indicator of |k| <= lambda
double chi(double r, const Cutoff& cut);

// transverse frame attached to k: e1 = (axis ^ k)/|axis ^ k|, e2 = khat ^ e1.
// axis defaults to z with an x fallback when k is parallel to the axis.
struct PolFrame {
  Vec3 e1, e2;
};
PolFrame pol_frame(const Vec3& k, const Vec3& axis = Vec3::UnitZ());

// vector-potential amplitude chi(|k|)/(2 pi |k|^{1/2}) eps_pol(k)
Vec3 form_factor_g(const Vec3& k, const Cutoff& cut, int pol,
                   const Vec3& axis = Vec3::UnitZ());
// magnetic amplitude is -i u with u = k ^ g; the real vector u is returned
Vec3 form_factor_u(const Vec3& k, const Cutoff& cut, int pol,
                   const Vec3& axis = Vec3::UnitZ());

// sum over polarizations of g_i g_j = chi^2/(4 pi^2 |k|) (delta_ij - khat_i khat_j)
Mat3 pol_sum_gg(const Vec3& k, const Cutoff& cut);
// sum over polarizations of |u|^2 = chi^2 |k| / (2 pi^2)
double pol_sum_hh(const Vec3& k, const Cutoff& cut);
// tr[P(k1) P(k2)] = 1 + t^2 for transverse projectors, t = khat1.khat2
double projector_trace_product(double t);

// resolvent denominators shared by all second-order terms
double denom_q1(double r1);
double denom_r2(double r2);
double denom_q2(double r1, double r2, double t);

enum class Kernel { DD, EEEE, EPD, EEDD, IEE, N1 };
Kernel kernel_from_name(std::string_view name);  // throws std::invalid_argument
std::string_view kernel_name(Kernel which);

// scalar reduction of the named vacuum expectation value: integrating the
// kernel over (0,L]^2 x [-1,1] in (r1, r2, t) (r1 alone for IEE and N1)
// reproduces the six-dimensional polarization-summed integral
double reduced_kernel(Kernel which, double r1, double r2, double t,
                      const Cutoff& cut);
// alternate exchange forms for EEEE and EPD, kept as cross-check diagnostics;
// identical to reduced_kernel for the other names
double reduced_kernel_alt(Kernel which, double r1, double r2, double t,
                          const Cutoff& cut);

}  // namespace pflab
