#pragma once

#include <cstdint>
#include <vector>

#include "fracdeg/point.hpp"
#include "fracdeg/rational.hpp"

namespace fracdeg {

// Open axis-aligned cube in the supremum norm: Q(c,r) = {x : max_i |x_i - c_i| < r}.
struct SupCube {
  Pt center;
  double half_side = 0.0;

  SupCube() = default;
  SupCube(Pt c, double r) : center(std::move(c)), half_side(r) {
    if (!(half_side > 0.0)) throw std::invalid_argument("SupCube: half_side must be positive");
  }
  static SupCube unit(int dim) { return SupCube(Pt(dim), 1.0); }

  int dim() const { return center.dim(); }
  bool contains(const Pt& x) const { return sup_dist(x, center) < half_side; }
  bool contains_closed(const Pt& x) const { return sup_dist(x, center) <= half_side; }
  bool on_boundary(const Pt& x, double tol = 0.0) const {
    return std::fabs(sup_dist(x, center) - half_side) <= tol;
  }
  double side() const { return 2.0 * half_side; }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= side();
    return v;
  }
  Box box() const {
    Box b;
    b.lo = center;
    b.hi = center;
    for (int i = 0; i < dim(); ++i) {
      b.lo[i] -= half_side;
      b.hi[i] += half_side;
    }
    return b;
  }
  SupCube scaled(double factor) const { return SupCube(center, half_side * factor); }
};

// Vertex of [-1,1]^n encoded as a bitmask: bit i set means coordinate +1.
using VertexLabel = std::uint32_t;

inline int vertex_component(VertexLabel v, int axis) { return (v >> axis & 1u) ? +1 : -1; }

inline Pt vertex_point(VertexLabel v, int dim) {
  Pt p(dim);
  for (int i = 0; i < dim; ++i) p[i] = vertex_component(v, i);
  return p;
}

// A word over the vertex alphabet; indexes one cube of the level-k generation.
struct VertexPath {
  int dim = 0;
  std::vector<VertexLabel> entries;

  int level() const { return static_cast<int>(entries.size()); }
  VertexPath child(VertexLabel v) const {
    VertexPath p = *this;
    p.entries.push_back(v);
    return p;
  }
  // Packed form used as a region identity key (n * level bits).
  std::uint64_t packed() const {
    std::uint64_t key = 1;  // leading 1 keeps different levels distinct
    for (VertexLabel v : entries) key = (key << dim) | v;
    return key;
  }
};

// Enumerates all |V|^k index paths at a given level (test/diagnostic sizes only).
std::vector<VertexPath> all_vertex_paths(int dim, int level);

// Q(z_w + (parent_level_radius/2) * v, child_radius); the generation step of
// the nested cube family.
SupCube child_cube(const Pt& parent_center, double parent_level_radius, VertexLabel vertex,
                   double child_radius);

// Exact-rational variant for zero-tolerance nesting/disjointness checks.
struct RationalCube {
  std::vector<Rational> center;
  Rational half_side;
};
RationalCube child_cube_exact(const RationalCube& parent, Rational parent_level_radius,
                              VertexLabel vertex, Rational child_radius);

// Hyperplane {x : <u, x> = t} with unit euclidean normal.
struct Hyperplane {
  Pt normal;
  double offset = 0.0;

  Hyperplane() = default;
  Hyperplane(Pt u, double t) : normal(std::move(u)), offset(t) {
    if (std::fabs(normal.norm2() - 1.0) > 1e-12)
      throw std::invalid_argument("Hyperplane: normal must be a unit vector");
  }
  static Hyperplane axis(int dim, int axis_index, double t) {
    Pt u(dim);
    u[axis_index] = 1.0;
    return Hyperplane(u, t);
  }
  double signed_dist(const Pt& x) const { return normal.dot(x) - offset; }
};

// Uniform lattice of (N+1)^n nodes over the closed cube; spacing 2r/N.
class RegularGrid {
 public:
  RegularGrid(SupCube cube, int subdivisions)
      : cube_(std::move(cube)), n_(subdivisions) {
    if (n_ < 1) throw std::invalid_argument("RegularGrid: subdivisions must be positive");
  }

  const SupCube& cube() const { return cube_; }
  int dim() const { return cube_.dim(); }
  int subdivisions() const { return n_; }
  double spacing() const { return cube_.side() / n_; }
  std::int64_t node_count() const {
    std::int64_t c = 1;
    for (int i = 0; i < dim(); ++i) c *= n_ + 1;
    return c;
  }
  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int i = 0; i < dim(); ++i) c *= n_;
    return c;
  }

  Pt node(const std::array<int, kMaxDim>& idx) const {
    Pt x(dim());
    const double h = spacing();
    for (int i = 0; i < dim(); ++i) x[i] = cube_.center[i] - cube_.half_side + idx[i] * h;
    return x;
  }
  std::int64_t node_linear(const std::array<int, kMaxDim>& idx) const {
    std::int64_t lin = 0;
    for (int i = dim() - 1; i >= 0; --i) lin = lin * (n_ + 1) + idx[i];
    return lin;
  }
  std::array<int, kMaxDim> node_multi(std::int64_t lin) const {
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < dim(); ++i) {
      idx[i] = static_cast<int>(lin % (n_ + 1));
      lin /= (n_ + 1);
    }
    return idx;
  }
  std::array<int, kMaxDim> cell_multi(std::int64_t lin) const {
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < dim(); ++i) {
      idx[i] = static_cast<int>(lin % n_);
      lin /= n_;
    }
    return idx;
  }
  bool cell_in_range(const std::array<int, kMaxDim>& cell) const {
    for (int i = 0; i < dim(); ++i)
      if (cell[i] < 0 || cell[i] >= n_) return false;
    return true;
  }

 private:
  SupCube cube_;
  int n_;
};

// One simplex of the Kuhn (Freudenthal) decomposition of a grid cell.  The
// vertices are grid node multi-indices; `sign` is the permutation parity and
// equals the sign of the affine volume, so the decomposition is consistently
// oriented and shared faces cancel.
struct KuhnSimplex {
  std::array<std::array<int, kMaxDim>, kMaxDim + 1> vertices;
  int sign = +1;
};

// Kuhn decomposition of one cell into n! simplices.
std::vector<KuhnSimplex> simplices_of_cell(const RegularGrid& grid,
                                           const std::array<int, kMaxDim>& cell);

// Signed volume of the simplex with the given geometric vertices.
double simplex_signed_volume(const RegularGrid& grid, const KuhnSimplex& s);

}  // namespace fracdeg
