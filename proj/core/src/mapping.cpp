#include "fracdeg/mapping.hpp"

namespace fracdeg {

double Mapping::patch_jacobian(const AnalyticPatch& patch, const Pt& x) const {
  (void)patch;
  auto j = pointwise_jacobian(x);
  if (!j) throw std::logic_error("Mapping::patch_jacobian: no jacobian available");
  return *j;
}

Pt Mapping::patch_eval(const AnalyticPatch& patch, const Pt& x) const {
  (void)patch;
  return eval(x);
}

Pt Mapping::eval_extended(const Pt& x) const {
  const SupCube dom = domain();
  const double t = sup_dist(x, dom.center) / dom.half_side;
  if (t <= 1.0) return eval(x);
  // Sup-norm radial reflection across the boundary sphere: t -> 2 - t.
  const double tr = std::max(2.0 - t, 1e-9);
  return eval(dom.center + (tr / t) * (x - dom.center));
}

}  // namespace fracdeg
