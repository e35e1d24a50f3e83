#include "fracdeg/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace fracdeg {

std::string Pt::str() const {
  std::string s = "(";
  char buf[32];
  for (int i = 0; i < dim_; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", c_[i]);
    s += buf;
    if (i + 1 < dim_) s += ",";
  }
  return s + ")";
}

std::vector<VertexPath> all_vertex_paths(int dim, int level) {
  const std::uint64_t per_level = std::uint64_t(1) << dim;
  std::uint64_t total = 1;
  for (int k = 0; k < level; ++k) total *= per_level;
  if (total > (std::uint64_t(1) << 24))
    throw std::invalid_argument("all_vertex_paths: generation too large to enumerate");
  std::vector<VertexPath> out;
  out.reserve(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    VertexPath p;
    p.dim = dim;
    p.entries.resize(level);
    std::uint64_t c = code;
    for (int k = level - 1; k >= 0; --k) {
      p.entries[k] = static_cast<VertexLabel>(c % per_level);
      c /= per_level;
    }
    out.push_back(std::move(p));
  }
  return out;
}

SupCube child_cube(const Pt& parent_center, double parent_level_radius, VertexLabel vertex,
                   double child_radius) {
  if (!(parent_level_radius > 0.0) || !(child_radius > 0.0))
    throw std::invalid_argument("child_cube: radii must be positive");
  Pt c = parent_center;
  for (int i = 0; i < c.dim(); ++i) c[i] += 0.5 * parent_level_radius * vertex_component(vertex, i);
  return SupCube(c, child_radius);
}

RationalCube child_cube_exact(const RationalCube& parent, Rational parent_level_radius,
                              VertexLabel vertex, Rational child_radius) {
  if (!(Rational(0) < parent_level_radius) || !(Rational(0) < child_radius))
    throw std::invalid_argument("child_cube_exact: radii must be positive");
  RationalCube c;
  c.center = parent.center;
  const Rational half = parent_level_radius * Rational(1, 2);
  for (size_t i = 0; i < c.center.size(); ++i) {
    int v = vertex_component(vertex, static_cast<int>(i));
    c.center[i] = c.center[i] + (v > 0 ? half : Rational(0) - half);
  }
  c.half_side = child_radius;
  return c;
}

std::vector<KuhnSimplex> simplices_of_cell(const RegularGrid& grid,
                                           const std::array<int, kMaxDim>& cell) {
  if (!grid.cell_in_range(cell)) throw std::invalid_argument("simplices_of_cell: cell out of range");
  const int n = grid.dim();
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + n, 0);

  std::vector<KuhnSimplex> out;
  do {
    KuhnSimplex s;
    s.vertices[0] = cell;
    for (int j = 0; j < n; ++j) {
      s.vertices[j + 1] = s.vertices[j];
      s.vertices[j + 1][perm[j]] += 1;
    }
    // permutation parity by counting inversions (n <= 8, quadratic is fine)
    int inv = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inv;
    s.sign = (inv % 2 == 0) ? +1 : -1;
    out.push_back(s);
  } while (std::next_permutation(perm.begin(), perm.begin() + n));
  return out;
}

double simplex_signed_volume(const RegularGrid& grid, const KuhnSimplex& s) {
  const int n = grid.dim();
  // det of edge matrix / n!
  double m[kMaxDim][kMaxDim];
  const Pt v0 = grid.node(s.vertices[0]);
  for (int j = 0; j < n; ++j) {
    const Pt vj = grid.node(s.vertices[j + 1]);
    for (int i = 0; i < n; ++i) m[i][j] = vj[i] - v0[i];
  }
  // Gaussian elimination with partial pivoting
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
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
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return det / fact;
}

}  // namespace fracdeg
