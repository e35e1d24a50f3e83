#pragma once

// Test-only reference evaluator for the construction maps.  Follows the
// textbook recursion literally: enumerate every generation-k index path,
// compute its center from the explicit sum, classify the point against the
// open cubes, and recurse for the center images.  Slow on purpose; shares no
// code path with the production evaluator.

#include <cmath>
#include <vector>

#include "fracdeg/cantor.hpp"
#include "fracdeg/geometry.hpp"

namespace fracdeg::testing {

inline Pt reference_center(const CantorMapSpec& spec, const VertexPath& path) {
  Pt z(spec.n);
  for (int j = 1; j <= path.level(); ++j) {
    const double r_prev = spec.domain_radius(j - 1);
    for (int i = 0; i < spec.n; ++i)
      z[i] += 0.5 * r_prev * vertex_component(path.entries[static_cast<size_t>(j - 1)], i);
  }
  return z;
}

inline Pt reference_eval(const CantorMapSpec& spec, int k, const Pt& x) {
  if (k == 0) return x;
  const double r_k = spec.domain_radius(k);
  const double r_prev = spec.domain_radius(k - 1);
  const double ri_k = spec.image_radius(k);
  const double ri_prev = spec.image_radius(k - 1);
  // alpha_k r_k + beta_k = r~_k ; alpha_k r_{k-1}/2 + beta_k = r~_{k-1}/2
  const double alpha = (ri_k - 0.5 * ri_prev) / (r_k - 0.5 * r_prev);
  const double beta = ri_k - alpha * r_k;

  for (const VertexPath& path : all_vertex_paths(spec.n, k)) {
    const Pt z = reference_center(spec, path);
    const double t = sup_dist(x, z);
    if (t >= 0.5 * r_prev) continue;  // outside this outer cube
    const Pt center_image = reference_eval(spec, k - 1, z);
    if (t <= r_k) {
      Pt y = center_image;
      for (int i = 0; i < spec.n; ++i) y[i] += (ri_k / r_k) * (x[i] - z[i]);
      return y;
    }
    Pt y = center_image;
    const double rho = alpha * t + beta;
    for (int i = 0; i < spec.n; ++i) y[i] += rho * (x[i] - z[i]) / t;
    return y;
  }
  return reference_eval(spec, k - 1, x);
}

}  // namespace fracdeg::testing
