#pragma once

#include "fracdeg/mapping.hpp"

namespace fracdeg {

// Convolution smoothing with the tensor-product polynomial bump
//   kappa(t) = (315/256) (1 - t^2)^4 on [-1,1],
// scaled to eps.  Values and gradients are kernel-space quadratures that
// refine adaptively where the kernel window crosses a non-analytic set of
// the map, so the smoothed Jacobian is reliable right up to the interfaces.
struct KernelOptions {
  int base_split = 2;    // initial subdivision of the kernel window per axis
  int max_depth = 3;     // extra adaptive depth across interfaces
  int smooth_order = 5;  // Gauss order on analytic subwindows (exact for kappa)
  int rough_order = 2;   // Gauss order on subwindows still cut at max depth
};

class Mollifier {
 public:
  Mollifier(const Mapping& f, double eps, KernelOptions opt = {});

  struct Result {
    Pt value;
    double jacobian = 0.0;
  };
  Result value_and_jacobian(const Pt& x) const;
  Pt value(const Pt& x) const;

  double eps() const { return eps_; }
  const Mapping& map() const { return f_; }

  static double kernel(double t) {
    if (std::fabs(t) >= 1.0) return 0.0;
    const double u = 1.0 - t * t;
    return (315.0 / 256.0) * u * u * u * u;
  }
  static double kernel_derivative(double t) {
    if (std::fabs(t) >= 1.0) return 0.0;
    const double u = 1.0 - t * t;
    return (315.0 / 256.0) * (-8.0) * t * u * u * u;
  }

 private:
  void accumulate(const Pt& x, const Box& ycell, int depth, const Pt& u0, Pt& val,
                  double grad[kMaxDim][kMaxDim]) const;
  void quad_cell(const Pt& x, const Box& ycell, int order, const Pt& u0, Pt& val,
                 double grad[kMaxDim][kMaxDim]) const;

  const Mapping& f_;
  double eps_;
  KernelOptions opt_;
  Box domain_box_;
};

}  // namespace fracdeg
