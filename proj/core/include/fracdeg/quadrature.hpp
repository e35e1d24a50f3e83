#pragma once

#include <functional>
#include <vector>

#include "fracdeg/point.hpp"

namespace fracdeg {

// Gauss-Legendre rule on [-1,1]; nodes by Newton iteration on P_m, cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int m);

// Tensor-product Gauss quadrature over a box.
double gauss_box(const Box& box, int order, const std::function<double(const Pt&)>& f);

// Composite tensor Gauss: cells_per_axis^n cells, `order` points per axis each.
double gauss_composite(const Box& box, int cells_per_axis, int order,
                       const std::function<double(const Pt&)>& f);

// Adaptive 1-D Simpson; tolerance is absolute.  Used as an independent
// cross-check oracle for smooth one-dimensional integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40);

}  // namespace fracdeg
