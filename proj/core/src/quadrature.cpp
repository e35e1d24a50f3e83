#include "fracdeg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fracdeg {

namespace {

GaussRule make_rule(int m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton on P_m.
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[m - 1 - i] = x;
    rule.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int m) {
  if (m < 1 || m > 64) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, make_rule(m)).first;
  return it->second;
}

double gauss_box(const Box& box, int order, const std::function<double(const Pt&)>& f) {
  const GaussRule& g = gauss_legendre(order);
  const int n = box.dim();
  std::array<int, kMaxDim> idx{};
  Pt x(n);
  double sum = 0.0;
  const Pt mid = box.center();
  const Pt half = 0.5 * box.extent();
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = mid[i] + half[i] * g.nodes[idx[i]];
      w *= g.weights[idx[i]] * half[i];
    }
    sum += w * f(x);
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < order) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return sum;
}

double gauss_composite(const Box& box, int cells_per_axis, int order,
                       const std::function<double(const Pt&)>& f) {
  const int n = box.dim();
  std::array<int, kMaxDim> cell{};
  double sum = 0.0;
  const Pt ext = box.extent();
  while (true) {
    Box sub;
    sub.lo = box.lo;
    sub.hi = box.lo;
    for (int i = 0; i < n; ++i) {
      sub.lo[i] = box.lo[i] + ext[i] * cell[i] / cells_per_axis;
      sub.hi[i] = box.lo[i] + ext[i] * (cell[i] + 1) / cells_per_axis;
    }
    sum += gauss_box(sub, order, f);
    int i = 0;
    for (; i < n; ++i) {
      if (++cell[i] < cells_per_axis) break;
      cell[i] = 0;
    }
    if (i == n) break;
  }
  return sum;
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return adapt(f, a, fa, b, fb, m, fm, simpson(f, a, fa, b, fb, m, fm), tol, max_depth);
}

}  // namespace fracdeg
