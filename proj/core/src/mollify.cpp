#include "fracdeg/mollify.hpp"

#include <cmath>

#include "fracdeg/quadrature.hpp"

namespace fracdeg {

Mollifier::Mollifier(const Mapping& f, double eps, KernelOptions opt)
    : f_(f), eps_(eps), opt_(opt), domain_box_(f.domain().box()) {
  if (!(eps > 0.0)) throw std::invalid_argument("Mollifier: scale must be positive");
}

void Mollifier::quad_cell(const Pt& x, const Box& ycell, int order, const Pt& u0, Pt& val,
                          double grad[kMaxDim][kMaxDim]) const {
  const int n = f_.dim();
  const GaussRule& g = gauss_legendre(order);
  const Pt mid = ycell.center();
  const Pt half = 0.5 * ycell.extent();
  std::array<int, kMaxDim> idx{};
  Pt y(n), arg(n);
  double k1[kMaxDim], dk[kMaxDim];
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      y[i] = mid[i] + half[i] * g.nodes[idx[i]];
      w *= g.weights[idx[i]] * half[i];
      arg[i] = x[i] - eps_ * y[i];
      k1[i] = kernel(y[i]);
      dk[i] = kernel_derivative(y[i]);
    }
    const Pt u = f_.eval_extended(arg);
    double kprod = 1.0;
    for (int i = 0; i < n; ++i) kprod *= k1[i];
    val += (w * kprod) * u;
    // gradient columns: weight kappa'(y_j) prod_{i != j} kappa(y_i) / eps;
    // subtracting u0 removes the constant component exactly (its kernel
    // integral vanishes), which kills most of the quadrature bias.
    for (int j = 0; j < n; ++j) {
      double wj = dk[j];
      for (int i = 0; i < n; ++i)
        if (i != j) wj *= k1[i];
      wj *= w / eps_;
      if (wj != 0.0)
        for (int i = 0; i < n; ++i) grad[i][j] += wj * (u[i] - u0[i]);
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < order) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
}

void Mollifier::accumulate(const Pt& x, const Box& ycell, int depth, const Pt& u0, Pt& val,
                           double grad[kMaxDim][kMaxDim]) const {
  const int n = f_.dim();
  // Domain window {x - eps y : y in ycell}; note the orientation flip.
  Box win;
  win.lo = Pt(n);
  win.hi = Pt(n);
  bool inside_domain = true;
  for (int i = 0; i < n; ++i) {
    win.lo[i] = x[i] - eps_ * ycell.hi[i];
    win.hi[i] = x[i] - eps_ * ycell.lo[i];
    if (win.lo[i] < domain_box_.lo[i] || win.hi[i] > domain_box_.hi[i]) inside_domain = false;
  }
  if (inside_domain && f_.analytic_patch(win, 0.0)) {
    quad_cell(x, ycell, opt_.smooth_order, u0, val, grad);
    return;
  }
  if (depth >= opt_.max_depth) {
    quad_cell(x, ycell, opt_.rough_order, u0, val, grad);
    return;
  }
  const unsigned children = 1u << n;
  for (unsigned mask = 0; mask < children; ++mask)
    accumulate(x, ycell.child(mask), depth + 1, u0, val, grad);
}

Mollifier::Result Mollifier::value_and_jacobian(const Pt& x) const {
  const int n = f_.dim();
  Result res;
  res.value = Pt(n);
  double grad[kMaxDim][kMaxDim] = {};
  const Pt u0 = f_.eval_extended(x);

  Box window;
  window.lo = Pt(n, -1.0);
  window.hi = Pt(n, 1.0);
  const int s = opt_.base_split;
  std::array<int, kMaxDim> cell{};
  while (true) {
    Box sub;
    sub.lo = Pt(n);
    sub.hi = Pt(n);
    for (int i = 0; i < n; ++i) {
      sub.lo[i] = -1.0 + 2.0 * cell[i] / s;
      sub.hi[i] = -1.0 + 2.0 * (cell[i] + 1) / s;
    }
    accumulate(x, sub, 0, u0, res.value, grad);
    int i = 0;
    for (; i < n; ++i) {
      if (++cell[i] < s) break;
      cell[i] = 0;
    }
    if (i == n) break;
  }

  // determinant of the smoothed gradient
  double m[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = grad[i][j];
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) {
      det = 0.0;
      break;
    }
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m[piv][c], m[col][c]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  res.jacobian = det;
  return res;
}

Pt Mollifier::value(const Pt& x) const { return value_and_jacobian(x).value; }

}  // namespace fracdeg
