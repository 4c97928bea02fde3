#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pflab/kernels.hpp"
#include "pflab/mc.hpp"
#include "pflab/quadrature.hpp"

using namespace pflab;

TEST_CASE("adaptive 1D quadrature on closed-form integrals") {
  // integral of x^3/(x^2+x)^2 over (0,1] equals ln 2 - 1/2
  const QuadResult a = quad_1d(
      [](double x) {
        const double d = x * x + x;
        return x * x * x / (d * d);
      },
      0, 1, 1e-12);
  CHECK(a.converged);
  CHECK(std::abs(a.value - (std::log(2.0) - 0.5)) < 1e-11);

  const QuadResult b = quad_1d([](double x) { return std::sin(x); }, 0, pi,
                               1e-13);
  CHECK(b.converged);
  CHECK(std::abs(b.value - 2.0) < 1e-12);

  const QuadResult c = quad_1d([](double) { return 1.0; }, 2, 2, 1e-12);
  CHECK(c.value == 0.0);
}

TEST_CASE("radial substitution handles the inverse square root") {
  const QuadResult a =
      quad_radial([](double r) { return 1.0 / std::sqrt(r); }, 1.0, 1e-12);
  CHECK(a.converged);
  CHECK(std::abs(a.value - 2.0) < 1e-11);
  const QuadResult b =
      quad_radial([](double r) { return r * r; }, 2.0, 1e-12);
  CHECK(std::abs(b.value - 8.0 / 3.0) < 1e-11);
}

TEST_CASE("3D box quadrature on separable integrands") {
  const QuadResult a = quad_3d_generic(
      [](double, double, double) { return 1.0; }, {0, -1, 0}, {1, 1, 2 * pi},
      1e-10);
  CHECK(a.converged);
  CHECK(std::abs(a.value - 4 * pi) < 1e-9);

  const QuadResult b = quad_3d_generic(
      [](double x, double y, double z) { return x * y * y * z; }, {0, 0, 0},
      {1, 1, 1}, 1e-10);
  CHECK(std::abs(b.value - 1.0 / 12.0) < 1e-9);
}

TEST_CASE("pair kernel box quadrature hits the frozen value") {
  const Cutoff cut{1.0};
  const QuadResult dd = quad_3d_box(
      [&](double r1, double r2, double t) {
        return reduced_kernel(Kernel::DD, r1, r2, t, cut);
      },
      cut, 1e-9);
  CHECK(dd.converged);
  CHECK(std::abs(dd.value - 0.035274981) < 1e-6);
}

TEST_CASE("sampling route is deterministic and matches quadrature") {
  const Cutoff cut{1.0};
  const double frozen[6] = {0.035274981, 0.006926998, 0.001284896,
                            0.002336466, 0.122961314, 0.122961314};
  const Kernel ks[6] = {Kernel::DD,   Kernel::EEEE, Kernel::EPD,
                        Kernel::EEDD, Kernel::IEE,  Kernel::N1};
  for (int i = 0; i < 6; ++i) {
    const MCEstimate a = mc_vev(ks[i], cut, 200000, 20260800 + i);
    const MCEstimate b = mc_vev(ks[i], cut, 200000, 20260800 + i);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.n_samples == 200000);
    CHECK(a.std_error > 0);
    CHECK(std::abs(a.mean - frozen[i]) <= 3.0 * a.std_error + 1e-6);
    CHECK(a.imag_residual <=
          20.0 * a.std_error + 1e-12 * (1 + std::abs(a.mean)));
  }
}

TEST_CASE("sampling route input validation") {
  const Cutoff cut{1.0};
  CHECK_THROWS_AS((void)mc_vev(Kernel::DD, cut, 100, 1),
                  std::invalid_argument);
  const MCEstimate z = mc_vev(Kernel::DD, Cutoff{0.0}, 20000, 1);
  CHECK(z.mean == 0.0);
  CHECK(z.std_error == 0.0);
}

TEST_CASE("different seeds decorrelate the estimate") {
  const Cutoff cut{1.0};
  const MCEstimate a = mc_vev(Kernel::IEE, cut, 50000, 1);
  const MCEstimate b = mc_vev(Kernel::IEE, cut, 50000, 2);
  CHECK(a.mean != b.mean);
  CHECK(std::abs(a.mean - b.mean) < 6 * (a.std_error + b.std_error));
}
