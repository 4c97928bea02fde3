#include "pflab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace pflab {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1]
constexpr std::array<double, 8> kx = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kw = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gw = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
  double k15, g7;
};

PanelEval eval_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k15 = kw[7] * f(c);
  double g7 = gw[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double fa = f(c - h * kx[i]);
    const double fb = f(c + h * kx[i]);
    k15 += kw[i] * (fa + fb);
    if (i % 2 == 1) g7 += gw[i / 2] * (fa + fb);
  }
  return {k15 * h, g7 * h};
}

void adapt_1d(const std::function<double(double)>& f, double a, double b,
              double budget, int depth, int max_depth, QuadResult& out) {
  const PanelEval e = eval_panel(f, a, b);
  out.evals += 15;
  const double err = std::abs(e.k15 - e.g7);
  if (err <= budget || depth >= max_depth) {
    out.value += e.k15;
    out.error += err;
    if (err > budget) out.converged = false;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt_1d(f, a, m, 0.5 * budget, depth + 1, max_depth, out);
  adapt_1d(f, m, b, 0.5 * budget, depth + 1, max_depth, out);
}

}  // namespace

QuadResult quad_1d(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_depth) {
  QuadResult out;
  if (b <= a) return out;
  adapt_1d(f, a, b, tol, 0, max_depth, out);
  return out;
}

QuadResult quad_radial(const std::function<double(double)>& f, double b,
                       double tol, int max_depth) {
  if (b <= 0.0) return {};
  auto sub = [&f](double s) { return 2.0 * s * f(s * s); };
  return quad_1d(sub, 0.0, std::sqrt(b), tol, max_depth);
}

namespace {

struct Box {
  std::array<double, 3> lo, hi;
  double value = 0.0;
  double err = 0.0;
  int split_dim = 0;
  long seq = 0;
};

// tensor 15^3 evaluation with per-dimension embedded 7-point differences
void eval_box(const std::function<double(double, double, double)>& f, Box& box) {
  std::array<std::array<double, 15>, 3> node;
  std::array<std::array<double, 15>, 3> wk;
  std::array<std::array<double, 15>, 3> wg15;  // gauss weights padded with zeros
  double scale = 1.0;
  for (int d = 0; d < 3; ++d) {
    const double c = 0.5 * (box.lo[d] + box.hi[d]);
    const double h = 0.5 * (box.hi[d] - box.lo[d]);
    scale *= h;
    for (int i = 0; i < 7; ++i) {
      node[d][i] = c - h * kx[i];
      node[d][14 - i] = c + h * kx[i];
      wk[d][i] = wk[d][14 - i] = kw[i];
      wg15[d][i] = wg15[d][14 - i] = (i % 2 == 1) ? gw[i / 2] : 0.0;
    }
    node[d][7] = c;
    wk[d][7] = kw[7];
    wg15[d][7] = gw[3];
  }
  double sk = 0.0;
  std::array<double, 3> sg = {0.0, 0.0, 0.0};
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j)
      for (int l = 0; l < 15; ++l) {
        const double v = f(node[0][i], node[1][j], node[2][l]);
        const double w0 = wk[0][i], w1 = wk[1][j], w2 = wk[2][l];
        sk += w0 * w1 * w2 * v;
        sg[0] += wg15[0][i] * w1 * w2 * v;
        sg[1] += w0 * wg15[1][j] * w2 * v;
        sg[2] += w0 * w1 * wg15[2][l] * v;
      }
  box.value = sk * scale;
  box.err = 0.0;
  box.split_dim = 0;
  for (int d = 0; d < 3; ++d) {
    const double e = std::abs(sk - sg[d]) * scale;
    if (e > box.err) {
      box.err = e;
      box.split_dim = d;
    }
  }
}

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.seq > b.seq;  // older box first on ties, deterministic
  }
};

}  // namespace

QuadResult quad_3d_generic(const std::function<double(double, double, double)>& f,
                           const std::array<double, 3>& lo,
                           const std::array<double, 3>& hi, double tol,
                           long max_boxes) {
  QuadResult out;
  for (int d = 0; d < 3; ++d)
    if (hi[d] <= lo[d]) return out;

  std::priority_queue<Box, std::vector<Box>, BoxOrder> heap;
  long seq = 0;
  Box root{lo, hi};
  root.seq = seq++;
  eval_box(f, root);
  out.evals += 15 * 15 * 15;
  double total = root.value, toterr = root.err;
  heap.push(root);

  while (toterr > tol && seq < max_boxes) {
    Box worst = heap.top();
    heap.pop();
    total -= worst.value;
    toterr -= worst.err;
    const int d = worst.split_dim;
    const double mid = 0.5 * (worst.lo[d] + worst.hi[d]);
    for (int half = 0; half < 2; ++half) {
      Box child = worst;
      (half == 0 ? child.hi : child.lo)[d] = mid;
      child.seq = seq++;
      eval_box(f, child);
      out.evals += 15 * 15 * 15;
      total += child.value;
      toterr += child.err;
      heap.push(child);
    }
  }
  out.value = total;
  out.error = toterr;
  out.converged = toterr <= tol;
  return out;
}

QuadResult quad_3d_box(const std::function<double(double, double, double)>& f,
                       const Cutoff& cut, double tol, long max_boxes) {
  if (cut.lambda <= 0.0) return {};
  const double sb = std::sqrt(cut.lambda);
  auto sub = [&f](double s1, double s2, double t) {
    return 4.0 * s1 * s2 * f(s1 * s1, s2 * s2, t);
  };
  return quad_3d_generic(sub, {0.0, 0.0, -1.0}, {sb, sb, 1.0}, tol, max_boxes);
}

}  // namespace pflab
