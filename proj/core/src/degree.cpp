#include "fracdeg/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fracdeg/quadrature.hpp"
#include "fracdeg/rng.hpp"

namespace fracdeg {

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::kCertified: return "certified";
    case CertStatus::kInconclusive: return "inconclusive";
    default: return "failed";
  }
}

namespace {
constexpr double kBoxTol = 1e-12;

bool cell_inside(const Box& cell, const SupCube& domain) {
  for (int i = 0; i < cell.dim(); ++i) {
    if (cell.lo[i] < domain.center[i] - domain.half_side - kBoxTol) return false;
    if (cell.hi[i] > domain.center[i] + domain.half_side + kBoxTol) return false;
  }
  return true;
}

bool cell_meets(const Box& cell, const SupCube& domain) {
  for (int i = 0; i < cell.dim(); ++i) {
    if (cell.hi[i] <= domain.center[i] - domain.half_side + kBoxTol) return false;
    if (cell.lo[i] >= domain.center[i] + domain.half_side - kBoxTol) return false;
  }
  return true;
}
}  // namespace

DegreeSolver::DegreeSolver(const GridFunction& f, const SupCube& domain)
    : DegreeSolver(f, domain, CellPredicate{}, CellPredicate{}) {}

DegreeSolver::DegreeSolver(const GridFunction& f, const SupCube& domain, CellPredicate include,
                           CellPredicate relevant)
    : f_(f), domain_(domain), h_(f.grid().spacing()) {
  if (domain_.dim() != f.dim()) throw std::invalid_argument("DegreeSolver: dimension mismatch");
  build(include, relevant);
}

void DegreeSolver::build(const CellPredicate& include, const CellPredicate& relevant) {
  const RegularGrid& grid = f_.grid();
  const int n = grid.dim();
  const int N = grid.subdivisions();

  // All permutations of the Kuhn decomposition, shared across cells.
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + n, 0);
  do {
    int inv = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inv;
    perms_.push_back(perm);
    perm_signs_.push_back(inv % 2 == 0 ? +1 : -1);
  } while (std::next_permutation(perm.begin(), perm.begin() + n));

  // Select covered cells; collect fringe nodes (skipped cells meeting the
  // domain) for the additivity certificate.
  const std::int64_t cell_count = grid.cell_count();
  std::vector<char> in(static_cast<size_t>(cell_count), 0);
  std::set<std::int64_t> fringe;
  for (std::int64_t c = 0; c < cell_count; ++c) {
    const auto multi = grid.cell_multi(c);
    Box cb;
    cb.lo = grid.node(multi);
    auto hi_multi = multi;
    for (int i = 0; i < n; ++i) hi_multi[i] += 1;
    cb.hi = grid.node(hi_multi);
    const bool covered = cell_inside(cb, domain_) && (!include || include(cb));
    if (covered) {
      in[static_cast<size_t>(c)] = 1;
      included_cells_.push_back(c);
    } else if (cell_meets(cb, domain_) && (!relevant || relevant(cb))) {
      // every point of this cell is within h/2 of one of its corner nodes
      std::array<int, kMaxDim> corner = multi;
      const unsigned corners = 1u << n;
      for (unsigned mask = 0; mask < corners; ++mask) {
        for (int i = 0; i < n; ++i) corner[i] = multi[i] + (mask >> i & 1u);
        fringe.insert(grid.node_linear(corner));
      }
    }
  }
  fringe_nodes_.assign(fringe.begin(), fringe.end());

  // Boundary nodes of the covered region: faces whose neighbor is skipped.
  std::set<std::int64_t> bdry;
  for (std::int64_t c : included_cells_) {
    const auto multi = grid.cell_multi(c);
    for (int axis = 0; axis < n; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        auto nb = multi;
        nb[axis] += dir;
        bool neighbor_in = grid.cell_in_range(nb);
        if (neighbor_in) {
          std::int64_t lin = 0;
          for (int i = n - 1; i >= 0; --i) lin = lin * N + nb[i];
          neighbor_in = in[static_cast<size_t>(lin)] != 0;
        }
        if (neighbor_in) continue;
        // collect the 2^{n-1} nodes of this face and its value diameter
        std::array<int, kMaxDim> corner = multi;
        const unsigned corners = 1u << n;
        std::vector<std::int64_t> face_nodes;
        for (unsigned mask = 0; mask < corners; ++mask) {
          bool on_face = true;
          for (int i = 0; i < n; ++i) {
            corner[i] = multi[i] + (mask >> i & 1u);
            if (i == axis && static_cast<int>(mask >> i & 1u) != (dir > 0 ? 1 : 0))
              on_face = false;
          }
          if (on_face) {
            const std::int64_t lin = grid.node_linear(corner);
            bdry.insert(lin);
            face_nodes.push_back(lin);
          }
        }
        for (size_t a = 0; a < face_nodes.size(); ++a)
          for (size_t b = a + 1; b < face_nodes.size(); ++b)
            boundary_face_osc_ = std::max(
                boundary_face_osc_, sup_dist(f_.value(face_nodes[a]), f_.value(face_nodes[b])));
      }
    }
  }
  boundary_nodes_.assign(bdry.begin(), bdry.end());

  // Image-space bins over the covered simplices.
  const std::int64_t nfact = static_cast<std::int64_t>(perms_.size());
  if (!included_cells_.empty()) {
    bool first = true;
    for (std::int64_t c : included_cells_) {
      const auto multi = grid.cell_multi(c);
      std::array<int, kMaxDim> corner = multi;
      const unsigned corners = 1u << n;
      for (unsigned mask = 0; mask < corners; ++mask) {
        for (int i = 0; i < n; ++i) corner[i] = multi[i] + (mask >> i & 1u);
        const Pt& v = f_.value(grid.node_linear(corner));
        if (first) {
          image_bbox_.lo = v;
          image_bbox_.hi = v;
          first = false;
        } else {
          for (int i = 0; i < n; ++i) {
            image_bbox_.lo[i] = std::min(image_bbox_.lo[i], v[i]);
            image_bbox_.hi[i] = std::max(image_bbox_.hi[i], v[i]);
          }
        }
      }
    }
    const double target_per_bin = 4.0;
    const double total = static_cast<double>(included_cells_.size()) * nfact;
    bins_per_axis_ = std::clamp(
        static_cast<int>(std::ceil(std::pow(total / target_per_bin, 1.0 / n))), 1, 512);
  }
  bins_.assign(static_cast<size_t>(std::pow(bins_per_axis_, n)) + 1, {});

  auto bin_range = [&](double lo, double hi, int axis, int& b0, int& b1) {
    const double w = image_bbox_.hi[axis] - image_bbox_.lo[axis];
    if (w <= 0.0) {
      b0 = 0;
      b1 = 0;
      return;
    }
    b0 = std::clamp(static_cast<int>((lo - image_bbox_.lo[axis]) / w * bins_per_axis_), 0,
                    bins_per_axis_ - 1);
    b1 = std::clamp(static_cast<int>((hi - image_bbox_.lo[axis]) / w * bins_per_axis_), 0,
                    bins_per_axis_ - 1);
  };

  std::array<int, kMaxDim> vtx{};
  for (std::int64_t c : included_cells_) {
    const auto multi = grid.cell_multi(c);
    for (std::int64_t p = 0; p < nfact; ++p) {
      // bbox of the simplex image
      Pt lo(f_.dim()), hi(f_.dim());
      vtx = multi;
      for (int j = 0; j <= n; ++j) {
        const Pt& v = f_.value(grid.node_linear(vtx));
        for (int i = 0; i < n; ++i) {
          if (j == 0 || v[i] < lo[i]) lo[i] = v[i];
          if (j == 0 || v[i] > hi[i]) hi[i] = v[i];
        }
        if (j < n) vtx[perms_[static_cast<size_t>(p)][j]] += 1;
      }
      std::array<int, kMaxDim> b0{}, b1{};
      for (int i = 0; i < n; ++i) bin_range(lo[i], hi[i], i, b0[i], b1[i]);
      std::array<int, kMaxDim> it = b0;
      while (true) {
        std::int64_t lin = 0;
        for (int i = n - 1; i >= 0; --i) lin = lin * bins_per_axis_ + it[i];
        bins_[static_cast<size_t>(lin)].push_back(c * nfact + p);
        int i = 0;
        for (; i < n; ++i) {
          if (++it[i] <= b1[i]) break;
          it[i] = b0[i];
        }
        if (i == n) break;
      }
    }
  }
}

int DegreeSolver::sign_sum(const Pt& y, bool& tie) const {
  tie = false;
  const RegularGrid& grid = f_.grid();
  const int n = grid.dim();
  for (int i = 0; i < n; ++i)
    if (y[i] < image_bbox_.lo[i] || y[i] > image_bbox_.hi[i]) return 0;

  std::int64_t bin = 0;
  for (int i = n - 1; i >= 0; --i) {
    const double w = image_bbox_.hi[i] - image_bbox_.lo[i];
    int b = w <= 0.0 ? 0
                     : std::clamp(static_cast<int>((y[i] - image_bbox_.lo[i]) / w *
                                                   bins_per_axis_),
                                  0, bins_per_axis_ - 1);
    bin = bin * bins_per_axis_ + b;
  }

  const std::int64_t nfact = static_cast<std::int64_t>(perms_.size());
  int sum = 0;
  std::array<int, kMaxDim> vtx{};
  for (std::int64_t id : bins_[static_cast<size_t>(bin)]) {
    const std::int64_t c = id / nfact;
    const int p = static_cast<int>(id % nfact);
    const auto multi = grid.cell_multi(c);
    // gather image vertices
    Pt verts[kMaxDim + 1];
    vtx = multi;
    for (int j = 0; j <= n; ++j) {
      verts[j] = f_.value(grid.node_linear(vtx));
      if (j < n) vtx[perms_[static_cast<size_t>(p)][j]] += 1;
    }
    // solve barycentric coordinates of y in the image simplex
    double m[kMaxDim][kMaxDim + 1];
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        m[i][j] = verts[j + 1][i] - verts[0][i];
        scale = std::max(scale, std::fabs(m[i][j]));
      }
      m[i][n] = y[i] - verts[0][i];
    }
    if (scale == 0.0) continue;  // collapsed simplex image cannot contain y generically
    double det = 1.0;
    bool singular = false;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
      if (std::fabs(m[piv][col]) <= 1e-14 * scale) {
        singular = true;
        break;
      }
      if (piv != col) {
        for (int cc = col; cc <= n; ++cc) std::swap(m[piv][cc], m[col][cc]);
        det = -det;
      }
      det *= m[col][col];
      for (int r = col + 1; r < n; ++r) {
        const double fct = m[r][col] / m[col][col];
        for (int cc = col; cc <= n; ++cc) m[r][cc] -= fct * m[col][cc];
      }
    }
    if (singular) {
      // collapsed image simplex: a tie only if y sits (numerically) on it
      const double tol = 1e-9 * std::max(scale, 1.0);
      if (n == 2) {
        double dist = std::numeric_limits<double>::infinity();
        for (int a = 0; a <= n; ++a) {
          for (int b = a + 1; b <= n; ++b) {
            const Pt& p = verts[a];
            const Pt& q = verts[b];
            const Pt d = q - p;
            const double len2 = d.dot(d);
            double t = len2 > 0.0 ? std::clamp((y - p).dot(d) / len2, 0.0, 1.0) : 0.0;
            dist = std::min(dist, euclid_dist(y, p + t * d));
          }
        }
        if (dist <= tol) tie = true;
      } else {
        bool maybe = true;
        for (int i = 0; i < n; ++i) {
          double lo = verts[0][i], hi = verts[0][i];
          for (int j = 1; j <= n; ++j) {
            lo = std::min(lo, verts[j][i]);
            hi = std::max(hi, verts[j][i]);
          }
          if (y[i] < lo - tol || y[i] > hi + tol) maybe = false;
        }
        if (maybe) tie = true;
      }
      continue;
    }
    double lambda[kMaxDim];
    double lam_sum = 0.0;
    for (int r = n - 1; r >= 0; --r) {
      double v = m[r][n];
      for (int cc = r + 1; cc < n; ++cc) v -= m[r][cc] * lambda[cc];
      lambda[r] = v / m[r][r];
      lam_sum += lambda[r];
    }
    const double tie_eps = 1e-12;
    bool inside = true;
    bool this_tie = false;
    for (int r = 0; r < n; ++r) {
      if (std::fabs(lambda[r]) <= tie_eps) this_tie = true;
      if (lambda[r] <= 0.0) inside = false;
    }
    if (std::fabs(1.0 - lam_sum) <= tie_eps) this_tie = true;
    if (lam_sum >= 1.0) inside = false;
    if (this_tie) tie = true;
    if (inside) sum += (det > 0 ? 1 : -1) * perm_signs_[static_cast<size_t>(p)];
  }
  return sum;
}

double DegreeSolver::boundary_gap(const Pt& y) const {
  const Modulus mod = f_.modulus();
  double gap = std::numeric_limits<double>::infinity();
  for (std::int64_t node : boundary_nodes_)
    gap = std::min(gap, sup_dist(f_.value(node), y));
  // two lower bounds on dist(y, f(covered-region boundary)): the modulus
  // route and the measured interpolant route; take the better one
  const double via_modulus = gap - mod.slack(0.5 * h_);
  const double via_data = gap - (boundary_face_osc_ + f_.pl_error_bound());
  return std::max(via_modulus, via_data);
}

double DegreeSolver::fringe_gap(const Pt& y) const {
  if (fringe_nodes_.empty()) return std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (std::int64_t node : fringe_nodes_)
    gap = std::min(gap, sup_dist(f_.value(node), y));
  return gap - f_.node_cover_slack();
}

DegreeReport DegreeSolver::degree(const Pt& y) const {
  const Modulus mod = f_.modulus();
  DegreeReport rep;
  rep.target = y;
  rep.domain = domain_;
  rep.resolution = f_.grid().subdivisions();

  const double gap_b = boundary_gap(y);
  const double gap_f = fringe_gap(y);
  rep.boundary_gap = std::min(gap_b, gap_f);
  const double pl_error = f_.pl_error_bound();
  if (!(rep.boundary_gap > 0.0) || !(pl_error < gap_b)) {
    // estimated resolution for which 2 C h^alpha drops below half the raw gap
    const double raw = rep.boundary_gap + mod.slack(0.5 * h_);
    int required = -1;
    if (raw > 0.0) {
      const double h_req = std::pow(0.5 * raw / (2.0 * mod.C), 1.0 / mod.alpha);
      required = static_cast<int>(std::ceil(f_.grid().cube().side() / h_req));
    }
    throw RefineGridError(
        "degree: boundary gap not certifiable at this resolution (target " + y.str() + ")",
        required);
  }

  Pt target = y;
  double perturb = 1e-8 * h_;
  for (int attempt = 0; attempt < 10; ++attempt) {
    bool tie = false;
    const int sum = sign_sum(target, tie);
    if (!tie) {
      rep.value = sum;
      rep.status = CertStatus::kCertified;
      return rep;
    }
    // deterministic tie-break, a fresh direction each retry: a fixed
    // direction can ride along an exact edge line of the PL image
    Rng dir_rng(0xf00dULL + static_cast<std::uint64_t>(attempt));
    Pt shifted = y;
    const double step = std::min(perturb, 1e-3 * rep.boundary_gap);
    for (int i = 0; i < y.dim(); ++i) shifted[i] += step * (0.5 + dir_rng.uniform01());
    target = shifted;
    perturb *= 8.0;
  }
  throw std::runtime_error("degree: persistent facet ties after perturbation retries");
}

DegreeReport degree(const GridFunction& f, const SupCube& domain, const Pt& y) {
  return DegreeSolver(f, domain).degree(y);
}

AdditivityReport degree_additivity_check(const GridFunction& f, const SupCube& U,
                                         const SupCube& U1, const SupCube& U2, const Pt& y) {
  const int n = f.dim();
  for (int i = 0; i < n; ++i) {
    const bool disjoint = U1.center[i] + U1.half_side <= U2.center[i] - U2.half_side + kBoxTol ||
                          U2.center[i] + U2.half_side <= U1.center[i] - U1.half_side + kBoxTol;
    if (disjoint) break;
    if (i == n - 1) throw std::invalid_argument("degree_additivity_check: subdomains overlap");
  }

  AdditivityReport rep;
  DegreeSolver whole(f, U);
  DegreeSolver part1(f, U1);
  DegreeSolver part2(f, U2);

  // Certify y not in f(U \ (U1 u U2)): sample nodes of cells inside U that
  // are not strictly inside either part.
  const RegularGrid& grid = f.grid();
  double gap = std::numeric_limits<double>::infinity();
  const std::int64_t cells = grid.cell_count();
  for (std::int64_t c = 0; c < cells; ++c) {
    const auto multi = grid.cell_multi(c);
    Box cb;
    cb.lo = grid.node(multi);
    auto hi_multi = multi;
    for (int i = 0; i < n; ++i) hi_multi[i] += 1;
    cb.hi = grid.node(hi_multi);
    if (!cell_meets(cb, U)) continue;
    if (cell_inside(cb, U1) || cell_inside(cb, U2)) continue;
    std::array<int, kMaxDim> corner = multi;
    const unsigned corners = 1u << n;
    for (unsigned mask = 0; mask < corners; ++mask) {
      for (int i = 0; i < n; ++i) corner[i] = multi[i] + (mask >> i & 1u);
      gap = std::min(gap, sup_dist(f.value(grid.node_linear(corner)), y));
    }
  }
  rep.separation_gap = gap - f.node_cover_slack();

  try {
    rep.deg_whole = whole.degree(y).value;
    rep.deg_first = part1.degree(y).value;
    rep.deg_second = part2.degree(y).value;
  } catch (const RefineGridError&) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }
  if (!(rep.separation_gap > 0.0)) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }
  rep.equal = rep.deg_whole == rep.deg_first + rep.deg_second;
  rep.status = CertStatus::kCertified;
  return rep;
}

StabilityReport degree_stability_check(const GridFunction& f, const GridFunction& g,
                                       const SupCube& domain, const Pt& y) {
  if (f.grid().subdivisions() != g.grid().subdivisions())
    throw std::invalid_argument("degree_stability_check: grids must match");
  StabilityReport rep;
  const std::int64_t count = f.grid().node_count();
  double sup = 0.0;
  for (std::int64_t i = 0; i < count; ++i) sup = std::max(sup, sup_dist(f.value(i), g.value(i)));
  rep.sup_difference = sup + f.node_cover_slack() + g.node_cover_slack();

  DegreeSolver sf(f, domain);
  try {
    const DegreeReport rf = sf.degree(y);
    rep.gap = rf.boundary_gap;
    if (!(rep.sup_difference < rep.gap)) {
      rep.status = CertStatus::kInconclusive;
      return rep;
    }
    rep.deg_f = rf.value;
    rep.deg_g = DegreeSolver(g, domain).degree(y).value;
  } catch (const RefineGridError&) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }
  rep.equal = rep.deg_f == rep.deg_g;
  rep.status = CertStatus::kCertified;
  return rep;
}

CovReport degree_change_of_variables(const Mapping& f, const SupCube& G, const BumpFn& psi,
                                     const CovOptions& opt) {
  const int n = f.dim();
  if (!f.pointwise_jacobian(Pt(n, 0.123456789)))
    throw std::invalid_argument("degree_change_of_variables: map must supply a jacobian");

  CovReport rep;
  rep.lhs = gauss_composite(G.box(), opt.lhs_cells, opt.lhs_order, [&](const Pt& x) {
    const auto j = f.pointwise_jacobian(x);
    if (!j) return 0.0;  // measure-zero kink sets
    return *j * psi(f.eval(x));
  });

  GridFunction gf = GridFunction::sample(f, G, opt.grid_n);
  DegreeSolver solver(gf, G);

  // quadrature box: image samples inflated by the modulus slack
  Box ibox;
  bool first = true;
  for (std::int64_t i = 0; i < gf.grid().node_count(); ++i) {
    const Pt& v = gf.value(i);
    if (first) {
      ibox.lo = v;
      ibox.hi = v;
      first = false;
    } else {
      for (int d = 0; d < n; ++d) {
        ibox.lo[d] = std::min(ibox.lo[d], v[d]);
        ibox.hi[d] = std::max(ibox.hi[d], v[d]);
      }
    }
  }
  ibox = ibox.expanded(f.modulus().slack(0.5 * gf.grid().spacing()));

  double failures = 0.0, total_weight = 0.0, rhs = 0.0;
  const GaussRule& rule = gauss_legendre(opt.rhs_order);
  const Pt ext = ibox.extent();
  std::array<int, kMaxDim> cell{};
  while (true) {
    Box sub;
    sub.lo = ibox.lo;
    sub.hi = ibox.lo;
    for (int i = 0; i < n; ++i) {
      sub.lo[i] = ibox.lo[i] + ext[i] * cell[i] / opt.rhs_cells;
      sub.hi[i] = ibox.lo[i] + ext[i] * (cell[i] + 1) / opt.rhs_cells;
    }
    const Pt mid = sub.center();
    const Pt half = 0.5 * sub.extent();
    std::array<int, kMaxDim> q{};
    while (true) {
      Pt y(n);
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        y[i] = mid[i] + half[i] * rule.nodes[q[i]];
        w *= rule.weights[q[i]] * half[i];
      }
      const double p = psi(y);
      if (p != 0.0) {
        total_weight += std::fabs(w * p);
        try {
          rhs += w * p * solver.degree(y).value;
        } catch (const RefineGridError&) {
          failures += std::fabs(w * p);
        }
      }
      int i = 0;
      for (; i < n; ++i) {
        if (++q[i] < opt.rhs_order) break;
        q[i] = 0;
      }
      if (i == n) break;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++cell[i] < opt.rhs_cells) break;
      cell[i] = 0;
    }
    if (i == n) break;
  }
  rep.failure_weight = total_weight > 0.0 ? failures / total_weight : 0.0;
  if (rep.failure_weight > opt.max_failure_weight)
    throw std::runtime_error(
        "degree_change_of_variables: uncertifiable degree queries carry weight " +
        std::to_string(rep.failure_weight));
  rep.rhs = rhs;
  rep.difference = rep.lhs - rep.rhs;
  return rep;
}

SplitReport hyperplane_split_test(const GridFunction& f, const SupCube& U, const Pt& y,
                                  const Hyperplane& H) {
  SplitReport rep;
  const RegularGrid& grid = f.grid();
  const int n = grid.dim();
  const double h = grid.spacing();
  const double margin = 0.5 * h;

  auto side_pred = [&](int side) {
    return [&H, side, margin](const Box& cell) {
      for (unsigned mask = 0; mask < (1u << cell.dim()); ++mask) {
        Pt corner = cell.lo;
        for (int i = 0; i < cell.dim(); ++i)
          if (mask >> i & 1u) corner[i] = cell.hi[i];
        const double s = H.signed_dist(corner);
        if (side < 0 && !(s < -margin)) return false;
        if (side > 0 && !(s > margin)) return false;
      }
      return true;
    };
  };
  // a skipped cell belongs to a side's fringe only if it meets that open side
  auto side_meets = [&](int side) {
    return [&H, side](const Box& cell) {
      for (unsigned mask = 0; mask < (1u << cell.dim()); ++mask) {
        Pt corner = cell.lo;
        for (int i = 0; i < cell.dim(); ++i)
          if (mask >> i & 1u) corner[i] = cell.hi[i];
        const double s = H.signed_dist(corner);
        if (side < 0 && s < 0.0) return true;
        if (side > 0 && s > 0.0) return true;
      }
      return false;
    };
  };

  DegreeSolver whole(f, U);
  DegreeSolver side_a(f, U, side_pred(-1), side_meets(-1));
  DegreeSolver side_b(f, U, side_pred(+1), side_meets(+1));

  // Certify y stays away from the image of the slab (and of any fringe).
  double gap = std::numeric_limits<double>::infinity();
  const std::int64_t count = grid.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    const Pt x = grid.node(grid.node_multi(i));
    if (!U.contains_closed(x)) continue;
    if (std::fabs(H.signed_dist(x)) > margin + h * std::sqrt(static_cast<double>(n))) continue;
    gap = std::min(gap, sup_dist(f.value(i), y));
  }
  rep.slab_gap = gap - f.node_cover_slack();

  try {
    rep.deg_total = whole.degree(y).value;
    rep.deg_side_a = side_a.degree(y).value;
    rep.deg_side_b = side_b.degree(y).value;
  } catch (const RefineGridError&) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }
  if (!(rep.slab_gap > 0.0)) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }
  rep.multiplicity_flag = std::abs(rep.deg_side_a) >= 1 && std::abs(rep.deg_side_b) >= 1;
  rep.status = CertStatus::kCertified;
  return rep;
}

}  // namespace fracdeg
