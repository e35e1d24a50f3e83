#include "fracdeg/grid_function.hpp"

#include <algorithm>
#include <numeric>

#include "fracdeg/rng.hpp"

namespace fracdeg {

GridFunction::GridFunction(RegularGrid grid, std::vector<Pt> values, Modulus modulus)
    : grid_(std::move(grid)), values_(std::move(values)), modulus_(modulus) {
  if (static_cast<std::int64_t>(values_.size()) != grid_.node_count())
    throw std::invalid_argument("GridFunction: value count does not match the grid");
  for (const Pt& v : values_)
    for (int i = 0; i < v.dim(); ++i)
      if (!std::isfinite(v[i])) throw std::invalid_argument("GridFunction: non-finite value");
  compute_edge_oscillation();
}

void GridFunction::compute_edge_oscillation() {
  const int n = grid_.dim();
  const int N = grid_.subdivisions();
  double worst = 0.0;
  const std::int64_t count = grid_.node_count();
  for (std::int64_t lin = 0; lin < count; ++lin) {
    const auto multi = grid_.node_multi(lin);
    for (int axis = 0; axis < n; ++axis) {
      if (multi[axis] >= N) continue;
      auto nb = multi;
      nb[axis] += 1;
      worst = std::max(worst, sup_dist(values_[static_cast<size_t>(lin)],
                                       values_[static_cast<size_t>(grid_.node_linear(nb))]));
    }
  }
  edge_osc_ = worst;
}

double GridFunction::pl_error_bound() const {
  const double fallback = 2.0 * modulus_.slack(grid_.spacing());
  if (pl_defect_ >= 0.0) return std::min(pl_defect_, fallback);
  return fallback;
}

double GridFunction::node_cover_slack() const {
  const double via_modulus = modulus_.slack(0.5 * grid_.spacing());
  const double via_data = grid_.dim() * edge_osc_ + pl_error_bound();
  return std::min(via_modulus, via_data);
}

GridFunction GridFunction::sample(const Mapping& f, const SupCube& cube, int subdivisions) {
  return sample(f, cube, subdivisions, f.modulus());
}

GridFunction GridFunction::sample(const Mapping& f, const SupCube& cube, int subdivisions,
                                  Modulus modulus) {
  RegularGrid grid(cube, subdivisions);
  std::vector<Pt> values;
  values.reserve(static_cast<size_t>(grid.node_count()));
  const std::int64_t count = grid.node_count();
  for (std::int64_t lin = 0; lin < count; ++lin) values.push_back(f.eval(grid.node(grid.node_multi(lin))));
  GridFunction g(std::move(grid), std::move(values), modulus);
  g.set_name(f.name() + "@N" + std::to_string(subdivisions));

  // Measured interpolation defect: probe the source at cell centers (and a
  // few interior offsets) against the interpolant, inflate for safety.
  const std::int64_t cells = g.grid().cell_count();
  const std::int64_t stride = std::max<std::int64_t>(1, cells / 200000);
  double defect = 0.0;
  Rng rng(0xdefec7);
  const double h = g.grid().spacing();
  for (std::int64_t c = 0; c < cells; c += stride) {
    const auto multi = g.grid().cell_multi(c);
    Pt center = g.grid().node(multi);
    for (int i = 0; i < g.dim(); ++i) center[i] += 0.5 * h;
    defect = std::max(defect, sup_dist(f.eval(center), g.eval(center)));
  }
  for (int it = 0; it < 2000; ++it) {
    const Pt x = rng.point_in(cube.box());
    defect = std::max(defect, sup_dist(f.eval(x), g.eval(x)));
  }
  g.set_pl_defect(1.5 * defect);
  return g;
}

Pt GridFunction::eval(const Pt& x) const {
  const int n = dim();
  const double h = grid_.spacing();
  const int N = grid_.subdivisions();
  std::array<int, kMaxDim> cell{};
  double local[kMaxDim];
  for (int i = 0; i < n; ++i) {
    double u = (x[i] - (grid_.cube().center[i] - grid_.cube().half_side)) / h;
    int c = static_cast<int>(std::floor(u));
    c = std::clamp(c, 0, N - 1);
    cell[i] = c;
    local[i] = std::clamp(u - c, 0.0, 1.0);
  }
  // Kuhn simplex containing x: sort local coordinates descending.
  std::array<int, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::sort(order.begin(), order.begin() + n,
            [&](int a, int b) { return local[a] > local[b]; });
  // Barycentric weights along the vertex chain v0 = corner, v_{j+1} = v_j + e_{order[j]}.
  double prev = 1.0;
  Pt result(n);
  std::array<int, kMaxDim> idx = cell;
  for (int j = 0; j <= n; ++j) {
    const double cur = (j < n) ? local[order[j]] : 0.0;
    const double w = prev - cur;
    if (w != 0.0) result += w * value(grid_.node_linear(idx));
    if (j < n) idx[order[j]] += 1;
    prev = cur;
  }
  return result;
}

double GridFunction::spot_check_modulus(int pairs, std::uint64_t seed) const {
  Rng rng(seed);
  const std::int64_t count = grid_.node_count();
  double worst = 0.0;
  for (int it = 0; it < pairs; ++it) {
    const std::int64_t a = static_cast<std::int64_t>(rng.next_u64() % count);
    const std::int64_t b = static_cast<std::int64_t>(rng.next_u64() % count);
    if (a == b) continue;
    const Pt xa = grid_.node(grid_.node_multi(a));
    const Pt xb = grid_.node(grid_.node_multi(b));
    const double d = sup_dist(xa, xb);
    if (d <= 0.0) continue;
    worst = std::max(worst, sup_dist(value(a), value(b)) / modulus_.slack(d));
  }
  return worst;
}

}  // namespace fracdeg
