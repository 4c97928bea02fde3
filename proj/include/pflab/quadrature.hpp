#pragma once

#include <array>
#include <functional>

#include "pflab/kernels.hpp"

namespace pflab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;      // nested-rule error estimate (upper estimate)
  long evals = 0;
  bool converged = true;   // false when the budget ran out above tolerance
};

// adaptive bisection with a nested 15/7 point pair per panel
QuadResult quad_1d(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_depth = 48);

// radial integral over (0,b] with the r = s^2 substitution regularizing the
// origin-adjacent panels
QuadResult quad_radial(const std::function<double(double)>& f, double b,
                       double tol, int max_depth = 48);

// adaptive tensor boxes over an arbitrary 3d box; error per box from the
// per-dimension nested-rule differences, worst dimension split first
QuadResult quad_3d_generic(const std::function<double(double, double, double)>& f,
                           const std::array<double, 3>& lo,
                           const std::array<double, 3>& hi, double tol,
                           long max_boxes = 40000);

// integral of f(r1, r2, t) over (0,L]^2 x [-1,1] with the radial substitution
// applied to both r axes
QuadResult quad_3d_box(const std::function<double(double, double, double)>& f,
                       const Cutoff& cut, double tol, long max_boxes = 40000);

}  // namespace pflab
