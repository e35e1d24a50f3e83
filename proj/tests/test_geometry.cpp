#include <doctest.h>

#include <map>
#include <set>

#include "fracdeg/cantor.hpp"
#include "fracdeg/geometry.hpp"
#include "fracdeg/rng.hpp"

using namespace fracdeg;

TEST_CASE("child_cube follows the generation rule") {
  // center 0, parent radius r0 = 1, vertex (+1,+1), child radius 1/4
  SupCube c = child_cube(Pt(2), 1.0, 0b11, 0.25);
  CHECK(c.center == Pt{0.5, 0.5});
  CHECK(c.half_side == 0.25);

  // vertex all -1 with child radius = parent/2 is tangent at the parent corner
  Pt parent_center{0.3, -0.2, 0.7};
  SupCube tangent = child_cube(parent_center, 0.5, 0, 0.25);
  for (int i = 0; i < 3; ++i)
    CHECK(tangent.center[i] - tangent.half_side == doctest::Approx(parent_center[i] - 0.5).epsilon(1e-15));

  // two-step recursion with the alpha = 1/2 radii: r0 = 1, r1 = 1/4
  SupCube first = child_cube(Pt(2), 1.0, 0b01, 0.25);  // vertex (+1,-1)
  CHECK(first.center == Pt{0.5, -0.5});
  SupCube second = child_cube(first.center, 0.25, 0b11, 1.0 / 16.0);
  CHECK(second.center == Pt{0.625, -0.375});

  CHECK_THROWS_AS(child_cube(Pt(2), -1.0, 0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(child_cube(Pt(2), 1.0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("kuhn decomposition: counts, volumes, orientation") {
  RegularGrid g2(SupCube::unit(2), 4);
  auto tris = simplices_of_cell(g2, {1, 2});
  CHECK(tris.size() == 2);
  double vol2 = 0.0;
  for (const auto& s : tris) {
    const double v = simplex_signed_volume(g2, s);
    CHECK(v * s.sign > 0.0);  // consistent orientation
    vol2 += v * s.sign;
  }
  const double cell2 = std::pow(g2.spacing(), 2);
  CHECK(vol2 == doctest::Approx(cell2).epsilon(1e-14));

  RegularGrid g3(SupCube::unit(3), 3);
  auto tets = simplices_of_cell(g3, {0, 1, 2});
  CHECK(tets.size() == 6);
  double vol3 = 0.0;
  for (const auto& s : tets) vol3 += simplex_signed_volume(g3, s) * s.sign;
  CHECK(vol3 == doctest::Approx(std::pow(g3.spacing(), 3)).epsilon(1e-14));

  CHECK_THROWS_AS(simplices_of_cell(g2, {4, 0}), std::invalid_argument);
}

TEST_CASE("kuhn decomposition: interior faces cancel") {
  RegularGrid g(SupCube::unit(2), 2);
  // oriented boundary of the simplicial chain of one cell: interior faces
  // appear twice with opposite sign
  auto tris = simplices_of_cell(g, {0, 0});
  std::map<std::pair<std::int64_t, std::int64_t>, int> face_count;
  for (const auto& s : tris) {
    for (int drop = 0; drop <= 2; ++drop) {
      std::vector<std::int64_t> ids;
      for (int j = 0; j <= 2; ++j)
        if (j != drop) ids.push_back(g.node_linear(s.vertices[j]));
      int orient = (drop % 2 == 0) ? 1 : -1;
      if (ids[0] > ids[1]) {
        std::swap(ids[0], ids[1]);
        orient = -orient;
      }
      face_count[{ids[0], ids[1]}] += orient * s.sign;
    }
  }
  // the shared diagonal face must cancel exactly
  int nonzero = 0;
  for (const auto& [k, v] : face_count)
    if (v != 0) ++nonzero;
  CHECK(nonzero == 4);  // only the four outer edges survive
}

TEST_CASE("generation cubes: exact disjointness and nesting") {
  // alpha = 1/2 construction: A = 2, all radii dyadic
  const CantorMapSpec spec = CantorMapSpec::lusin_n(2, 0.5, 4);
  REQUIRE(spec.exact());

  for (int level = 1; level <= 3; ++level) {
    const auto paths = all_vertex_paths(2, level);
    CHECK(static_cast<int>(paths.size()) == 1 << (2 * level));

    std::vector<RationalCube> inner, outer;
    for (const auto& p : paths) {
      RationalCube cube{{Rational(0), Rational(0)}, Rational(1)};
      RationalCube prime = cube;
      for (int j = 1; j <= p.level(); ++j) {
        prime = child_cube_exact(cube, spec.domain_radius_exact(j - 1),
                                 p.entries[static_cast<size_t>(j - 1)],
                                 spec.domain_radius_exact(j - 1) * Rational(1, 2));
        cube = prime;
        cube.half_side = spec.domain_radius_exact(j);
      }
      inner.push_back(cube);
      outer.push_back(prime);
    }
    // Q_v subset Q'_v (same center, r_k < r_{k-1}/2)
    for (size_t i = 0; i < inner.size(); ++i) {
      CHECK(inner[i].center == outer[i].center);
      CHECK(inner[i].half_side < outer[i].half_side);
    }
    // Q'_v sits inside the closed parent core Q_w
    for (const auto& p : paths) {
      if (p.level() < 2) continue;
      RationalCube parent{{Rational(0), Rational(0)}, Rational(1)};
      for (int j = 1; j < p.level(); ++j) {
        parent = child_cube_exact(parent, spec.domain_radius_exact(j - 1),
                                  p.entries[static_cast<size_t>(j - 1)],
                                  spec.domain_radius_exact(j));
      }
      RationalCube prime = child_cube_exact(
          parent, spec.domain_radius_exact(p.level() - 1),
          p.entries[static_cast<size_t>(p.level() - 1)],
          spec.domain_radius_exact(p.level() - 1) * Rational(1, 2));
      for (int i = 0; i < 2; ++i) {
        Rational diff = prime.center[static_cast<size_t>(i)] -
                        parent.center[static_cast<size_t>(i)];
        if (diff < Rational(0)) diff = Rational(0) - diff;
        CHECK(diff + prime.half_side <= parent.half_side);
      }
    }
    // pairwise disjoint: some axis separates the open cubes
    for (size_t a = 0; a < inner.size(); ++a) {
      for (size_t b = a + 1; b < inner.size(); ++b) {
        bool separated = false;
        for (int i = 0; i < 2 && !separated; ++i) {
          Rational diff = inner[a].center[static_cast<size_t>(i)] -
                          inner[b].center[static_cast<size_t>(i)];
          if (diff < Rational(0)) diff = Rational(0) - diff;
          if (inner[a].half_side + inner[b].half_side <= diff) separated = true;
        }
        CHECK(separated);
      }
    }
  }
}

TEST_CASE("vertex paths and labels") {
  VertexPath root;
  root.dim = 2;
  CHECK(root.level() == 0);
  VertexPath p = root.child(0b10);
  CHECK(p.level() == 1);
  CHECK(vertex_component(0b10, 0) == -1);
  CHECK(vertex_component(0b10, 1) == +1);
  CHECK(vertex_point(0b01, 2) == Pt{1.0, -1.0});
  CHECK(root.packed() != p.packed());
  CHECK(p.packed() != p.child(0).packed());
}

TEST_CASE("hyperplane and grid basics") {
  CHECK_THROWS_AS(Hyperplane(Pt{1.0, 1.0}, 0.0), std::invalid_argument);
  Hyperplane h = Hyperplane::axis(2, 1, 0.25);
  CHECK(h.signed_dist(Pt{0.7, 0.5}) == doctest::Approx(0.25));

  RegularGrid g(SupCube(Pt{1.0, -1.0}, 2.0), 8);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.node_count() == 81);
  CHECK(g.node({0, 0}) == Pt{-1.0, -3.0});
  CHECK(g.node({8, 8}) == Pt{3.0, 1.0});
  const auto multi = g.node_multi(g.node_linear({3, 5}));
  CHECK(multi[0] == 3);
  CHECK(multi[1] == 5);
  CHECK_THROWS_AS(RegularGrid(SupCube::unit(2), 0), std::invalid_argument);
}

TEST_CASE("rational arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational::pow2(-4) == Rational(1, 16));
  CHECK(Rational(3, 4).pow(2) == Rational(9, 16));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
  CHECK(Rational(1, 1 << 30) * Rational(1, 1 << 30) ==
        Rational(1, std::int64_t(1) << 60));
  CHECK_THROWS_AS(Rational::pow2(80), RationalOverflow);
}
