#include "fracdeg/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <thread>

#include "fracdeg/quadrature.hpp"
#include "fracdeg/rng.hpp"
#include "fracdeg/seminorm.hpp"

namespace fracdeg {

namespace {

double quintic_step(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// v(e) ~ v0 + c e fitted on the two finest scales
double linear_extrapolate(double e1, double v1, double e2, double v2) {
  if (e1 == e2) return v2;
  const double c = (v1 - v2) / (e1 - e2);
  return v2 - c * e2;
}

double aitken_limit(const std::vector<double>& v) {
  if (v.size() < 3) return v.empty() ? 0.0 : v.back();
  const size_t m = v.size();
  const double d1 = v[m - 1] - v[m - 2];
  const double d0 = v[m - 2] - v[m - 3];
  const double denom = d1 - d0;
  if (std::fabs(denom) < 1e-300) return v.back();
  return v[m - 1] - d1 * d1 / denom;
}

void finish_pairing(JacobianPairing& p) {
  const size_t m = p.per_scale.size();
  if (m == 1) {
    p.extrapolated = p.per_scale[0].value;
    p.error_indicator = std::fabs(p.extrapolated);
    return;
  }
  p.extrapolated = linear_extrapolate(p.per_scale[m - 2].eps, p.per_scale[m - 2].value,
                                      p.per_scale[m - 1].eps, p.per_scale[m - 1].value);
  double prev_extrap = p.extrapolated;
  if (m >= 3)
    prev_extrap = linear_extrapolate(p.per_scale[m - 3].eps, p.per_scale[m - 3].value,
                                     p.per_scale[m - 2].eps, p.per_scale[m - 2].value);
  p.error_indicator = std::fabs(p.per_scale[m - 1].value - p.extrapolated) / 4.0 +
                      std::fabs(p.extrapolated - prev_extrap);
  p.cauchy = true;
  for (size_t i = 2; i < m; ++i) {
    const double d_new = std::fabs(p.per_scale[i].value - p.per_scale[i - 1].value);
    const double d_old = std::fabs(p.per_scale[i - 1].value - p.per_scale[i - 2].value);
    if (d_new > 1.5 * d_old + 1e-12) p.cauchy = false;
  }
}

}  // namespace

TestFn bump_test_fn(const BumpFn& bump) {
  TestFn t;
  t.fn = [bump](const Pt& x) { return bump(x); };
  t.grad_sup = bump.grad_sup();
  t.name = "bump";
  t.support = bump.support().box();
  return t;
}

TestFn constant_one(int dim) {
  (void)dim;
  TestFn t;
  t.fn = [](const Pt&) { return 1.0; };
  t.grad_sup = 0.0;
  t.name = "one";
  return t;
}

MollifiedSequence MollifiedSequence::geometric(std::shared_ptr<const Mapping> source, double eps0,
                                               int count, double ratio) {
  MollifiedSequence seq;
  seq.source = std::move(source);
  double e = eps0;
  for (int i = 0; i < count; ++i, e *= ratio) seq.scales.push_back(e);
  seq.validate();
  return seq;
}

void MollifiedSequence::validate() const {
  if (!source) throw std::invalid_argument("MollifiedSequence: missing source map");
  if (scales.empty()) throw std::invalid_argument("MollifiedSequence: need at least one scale");
  for (size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::invalid_argument("MollifiedSequence: scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1]))
      throw std::invalid_argument("MollifiedSequence: scales must decrease");
  }
}

// ---------------------------------------------------------------------------
// quadtree sweep

namespace {

struct SweepCtx {
  const Mapping& f;
  double eps;
  const std::vector<PairingWeight>& weights;
  const PairingOptions& opt;
  Mollifier moll;
  Box domain_box;
  double rough_leaf;
};

void sweep_cell(const SweepCtx& ctx, const Box& cell, int depth, std::vector<double>& acc) {
  const int n = cell.dim();
  bool clear_of_boundary = true;
  for (int i = 0; i < n && clear_of_boundary; ++i)
    if (cell.lo[i] - ctx.eps < ctx.domain_box.lo[i] || cell.hi[i] + ctx.eps > ctx.domain_box.hi[i])
      clear_of_boundary = false;

  std::optional<AnalyticPatch> patch;
  if (clear_of_boundary) patch = ctx.f.analytic_patch(cell, ctx.eps);

  if (patch && ctx.opt.smooth_leaf > 0.0 && cell.max_side() > ctx.opt.smooth_leaf &&
      depth < ctx.opt.max_depth &&
      (!ctx.opt.refine_zone || ctx.opt.refine_zone(cell))) {
    const unsigned children = 1u << n;
    for (unsigned mask = 0; mask < children; ++mask)
      sweep_cell(ctx, cell.child(mask), depth + 1, acc);
    return;
  }

  if (patch) {
    // f_eps == f on this cell; integrate the exact region Jacobian.
    const GaussRule& g = gauss_legendre(ctx.opt.smooth_order);
    const Pt mid = cell.center();
    const Pt half = 0.5 * cell.extent();
    std::array<int, kMaxDim> idx{};
    Pt x(n);
    while (true) {
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        x[i] = mid[i] + half[i] * g.nodes[idx[i]];
        w *= g.weights[idx[i]] * half[i];
      }
      const double jac = ctx.f.patch_jacobian(*patch, x);
      const Pt fx = ctx.f.patch_eval(*patch, x);
      for (size_t m = 0; m < ctx.weights.size(); ++m) acc[m] += w * jac * ctx.weights[m](x, fx);
      int i = 0;
      for (; i < n; ++i) {
        if (++idx[i] < ctx.opt.smooth_order) break;
        idx[i] = 0;
      }
      if (i == n) break;
    }
    return;
  }

  if (cell.max_side() > ctx.rough_leaf && depth < ctx.opt.max_depth) {
    const unsigned children = 1u << n;
    for (unsigned mask = 0; mask < children; ++mask)
      sweep_cell(ctx, cell.child(mask), depth + 1, acc);
    return;
  }

  // Rough leaf: the kernel window crosses an interface (or the boundary);
  // use the smoothed Jacobian itself.
  const GaussRule& g = gauss_legendre(ctx.opt.rough_order);
  const Pt mid = cell.center();
  const Pt half = 0.5 * cell.extent();
  std::array<int, kMaxDim> idx{};
  Pt x(n);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = mid[i] + half[i] * g.nodes[idx[i]];
      w *= g.weights[idx[i]] * half[i];
    }
    const Mollifier::Result r = ctx.moll.value_and_jacobian(x);
    for (size_t m = 0; m < ctx.weights.size(); ++m)
      acc[m] += w * r.jacobian * ctx.weights[m](x, r.value);
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < ctx.opt.rough_order) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
}

}  // namespace

std::vector<double> mollified_pairing_sweep(const Mapping& f, double eps, const Box& region,
                                            const std::vector<PairingWeight>& weights,
                                            const PairingOptions& opt) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollified_pairing_sweep: scale must be positive");
  const int n = region.dim();
  SweepCtx ctx{f, eps, weights, opt, Mollifier(f, eps, opt.kernel), f.domain().box(),
               std::max(opt.leaf_factor * eps, opt.min_leaf)};

  // Fixed 4-per-axis partition; deterministic combine at any thread count.
  const int split = 4;
  std::int64_t boxes = 1;
  for (int i = 0; i < n; ++i) boxes *= split;
  std::vector<std::vector<double>> partial(static_cast<size_t>(boxes),
                                           std::vector<double>(weights.size(), 0.0));
  auto run_box = [&](std::int64_t lin) {
    std::int64_t rest = lin;
    Box sub;
    sub.lo = Pt(n);
    sub.hi = Pt(n);
    const Pt ext = region.extent();
    for (int i = 0; i < n; ++i) {
      const int c = static_cast<int>(rest % split);
      rest /= split;
      sub.lo[i] = region.lo[i] + ext[i] * c / split;
      sub.hi[i] = region.lo[i] + ext[i] * (c + 1) / split;
    }
    sweep_cell(ctx, sub, 0, partial[static_cast<size_t>(lin)]);
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    for (std::int64_t b = 0; b < boxes; ++b) run_box(b);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t]() {
        for (std::int64_t b = t; b < boxes; b += threads) run_box(b);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<double> out(weights.size(), 0.0);
  for (std::int64_t b = 0; b < boxes; ++b)
    for (size_t m = 0; m < weights.size(); ++m) out[m] += partial[static_cast<size_t>(b)][m];
  return out;
}

JacobianPairing distributional_jacobian(const MollifiedSequence& seq, const TestFn& phi,
                                        const PairingOptions& opt) {
  seq.validate();
  const Mapping& f = *seq.source;
  Box region = f.domain().box();
  if (phi.support) {
    // intersect the sweep region with the test-function support
    for (int i = 0; i < region.dim(); ++i) {
      region.lo[i] = std::max(region.lo[i], phi.support->lo[i]);
      region.hi[i] = std::min(region.hi[i], phi.support->hi[i]);
      if (region.lo[i] >= region.hi[i]) {
        JacobianPairing empty;
        for (double e : seq.scales) empty.per_scale.push_back({e, 0.0});
        finish_pairing(empty);
        return empty;
      }
    }
  }
  PairingOptions o = opt;
  o.kernel = seq.kernel;
  std::vector<PairingWeight> weights{[&phi](const Pt& x, const Pt&) { return phi.fn(x); }};
  JacobianPairing p;
  for (double eps : seq.scales) {
    const std::vector<double> vals = mollified_pairing_sweep(f, eps, region, weights, o);
    if (!std::isfinite(vals[0]))
      throw std::runtime_error("distributional_jacobian: quadrature returned a non-finite value");
    p.per_scale.push_back({eps, vals[0]});
  }
  finish_pairing(p);
  return p;
}

// ---------------------------------------------------------------------------
// image measures

MeasureEstimate image_measure(const GridFunction& f, const SupCube& U, const RasterOptions& opt) {
  const Modulus mod = f.modulus();
  if (!(mod.C > 0.0) || !(mod.alpha > 0.0))
    throw std::invalid_argument("image_measure: map carries no usable modulus");
  const RegularGrid& grid = f.grid();
  const int n = grid.dim();
  for (int i = 0; i < n; ++i)
    if (U.center[i] - U.half_side < grid.cube().center[i] - grid.cube().half_side - 1e-12 ||
        U.center[i] + U.half_side > grid.cube().center[i] + grid.cube().half_side + 1e-12)
      throw std::invalid_argument("image_measure: sampling grid does not cover U");

  const double h = grid.spacing();
  const double rho = f.node_cover_slack();

  // collect image samples of nodes inside the closed U
  std::vector<Pt> imgs;
  const std::int64_t count = grid.node_count();
  Box bbox;
  bool first = true;
  for (std::int64_t lin = 0; lin < count; ++lin) {
    const Pt x = grid.node(grid.node_multi(lin));
    if (sup_dist(x, U.center) > U.half_side + 0.5 * h) continue;
    const Pt v = f.value(lin);
    imgs.push_back(v);
    if (first) {
      bbox.lo = v;
      bbox.hi = v;
      first = false;
    } else {
      for (int i = 0; i < n; ++i) {
        bbox.lo[i] = std::min(bbox.lo[i], v[i]);
        bbox.hi[i] = std::max(bbox.hi[i], v[i]);
      }
    }
  }
  MeasureEstimate est;
  est.method = MeasureMethod::kRasterImage;
  if (imgs.empty()) return est;
  bbox = bbox.expanded(rho);

  double extent = 0.0;
  for (int i = 0; i < n; ++i) extent = std::max(extent, bbox.hi[i] - bbox.lo[i]);
  int cells = static_cast<int>(std::ceil(extent / std::max(rho * 0.5, 1e-12)));
  // keep the raster affordable in any dimension
  const double budget = 64.0 * 1024 * 1024;
  while (std::pow(static_cast<double>(cells), n) > budget) cells /= 2;
  cells = std::clamp(cells, opt.min_cells_per_axis, opt.max_cells_per_axis);
  const double g = extent / cells;

  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= cells;
  std::vector<std::uint8_t> cover(static_cast<size_t>(total), 0);

  auto cell_index = [&](const std::array<int, kMaxDim>& c) {
    std::int64_t lin = 0;
    for (int i = n - 1; i >= 0; --i) lin = lin * cells + c[i];
    return lin;
  };

  for (const Pt& v : imgs) {
    std::array<int, kMaxDim> lo{}, hi{};
    for (int i = 0; i < n; ++i) {
      lo[i] = std::clamp(static_cast<int>(std::floor((v[i] - rho - bbox.lo[i]) / g)), 0, cells - 1);
      hi[i] = std::clamp(static_cast<int>(std::floor((v[i] + rho - bbox.lo[i]) / g)), 0, cells - 1);
    }
    std::array<int, kMaxDim> it = lo;
    while (true) {
      cover[static_cast<size_t>(cell_index(it))] = 1;
      int i = 0;
      for (; i < n; ++i) {
        if (++it[i] <= hi[i]) break;
        it[i] = lo[i];
      }
      if (i == n) break;
    }
  }

  // Lower bound by erosion: keep cells whose whole rho-neighborhood is
  // covered.  The covered set contains f(U) only up to the modulus radius, so
  // eroding by that radius cannot reach outside the image unless the image
  // complement has gaps thinner than rho (morphological closing caveat).
  const int radius = static_cast<int>(std::ceil(rho / g));
  std::vector<std::uint8_t> eroded = cover;
  std::vector<std::uint8_t> next(eroded.size());
  for (int axis = 0; axis < n; ++axis) {
    std::array<int, kMaxDim> it{};
    for (std::int64_t lin = 0; lin < total; ++lin) {
      std::int64_t rest = lin;
      for (int i = 0; i < n; ++i) {
        it[i] = static_cast<int>(rest % cells);
        rest /= cells;
      }
      std::uint8_t keep = 1;
      for (int d = -radius; d <= radius && keep; ++d) {
        auto nb = it;
        nb[axis] += d;
        if (nb[axis] < 0 || nb[axis] >= cells) {
          keep = 0;
          break;
        }
        if (!eroded[static_cast<size_t>(cell_index(nb))]) keep = 0;
      }
      next[static_cast<size_t>(lin)] = keep;
    }
    std::swap(eroded, next);
  }

  std::int64_t n_upper = 0, n_lower = 0;
  for (std::int64_t lin = 0; lin < total; ++lin) {
    if (cover[static_cast<size_t>(lin)]) ++n_upper;
    if (eroded[static_cast<size_t>(lin)]) ++n_lower;
  }
  const double cell_vol = std::pow(g, n);
  est.lower = static_cast<double>(n_lower) * cell_vol;
  est.upper = static_cast<double>(n_upper) * cell_vol;
  return est;
}

MeasureEstimate degree_measure(const GridFunction& f, const SupCube& U, int raster_n) {
  const int n = f.dim();
  DegreeSolver solver(f, U);
  // bounding box of the sampled image of U
  Box bbox;
  bool first = true;
  const RegularGrid& grid = f.grid();
  for (std::int64_t lin = 0; lin < grid.node_count(); ++lin) {
    const Pt x = grid.node(grid.node_multi(lin));
    if (sup_dist(x, U.center) > U.half_side + grid.spacing()) continue;
    const Pt v = f.value(lin);
    if (first) {
      bbox.lo = v;
      bbox.hi = v;
      first = false;
    } else {
      for (int i = 0; i < n; ++i) {
        bbox.lo[i] = std::min(bbox.lo[i], v[i]);
        bbox.hi[i] = std::max(bbox.hi[i], v[i]);
      }
    }
  }
  bbox = bbox.expanded(f.modulus().slack(0.5 * grid.spacing()));

  MeasureEstimate est;
  est.method = MeasureMethod::kQuadrature;
  std::array<int, kMaxDim> it{};
  const Pt ext = bbox.extent();
  double cell_vol = 1.0;
  for (int i = 0; i < n; ++i) cell_vol *= ext[i] / raster_n;
  std::int64_t nonzero = 0, uncertain = 0;
  while (true) {
    Pt y(n);
    for (int i = 0; i < n; ++i) y[i] = bbox.lo[i] + ext[i] * (it[i] + 0.5) / raster_n;
    try {
      if (solver.degree(y).value != 0) ++nonzero;
    } catch (const RefineGridError&) {
      ++uncertain;
    } catch (const std::runtime_error&) {
      ++uncertain;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++it[i] < raster_n) break;
      it[i] = 0;
    }
    if (i == n) break;
  }
  est.lower = static_cast<double>(nonzero) * cell_vol;
  est.upper = static_cast<double>(nonzero + uncertain) * cell_vol;
  return est;
}

int preimage_count(const GridFunction& f, const Pt& y, double epsilon) {
  const RegularGrid& grid = f.grid();
  const int n = grid.dim();
  const double min_usable = 2.0 * f.node_cover_slack();
  if (!(epsilon > min_usable))
    throw EpsilonTooSmall("preimage_count: epsilon below the grid interpolation error; minimum usable is " +
                              std::to_string(min_usable),
                          min_usable);

  const std::int64_t count = grid.node_count();
  std::vector<std::uint8_t> hit(static_cast<size_t>(count), 0);
  for (std::int64_t lin = 0; lin < count; ++lin)
    hit[static_cast<size_t>(lin)] = sup_dist(f.value(lin), y) < epsilon ? 1 : 0;

  int components = 0;
  std::vector<std::int64_t> stack;
  const int N = grid.subdivisions();
  for (std::int64_t seed = 0; seed < count; ++seed) {
    if (hit[static_cast<size_t>(seed)] != 1) continue;
    ++components;
    hit[static_cast<size_t>(seed)] = 2;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::int64_t cur = stack.back();
      stack.pop_back();
      const auto multi = grid.node_multi(cur);
      for (int axis = 0; axis < n; ++axis) {
        for (int dir = -1; dir <= 1; dir += 2) {
          auto nb = multi;
          nb[axis] += dir;
          if (nb[axis] < 0 || nb[axis] > N) continue;
          const std::int64_t lin = grid.node_linear(nb);
          if (hit[static_cast<size_t>(lin)] == 1) {
            hit[static_cast<size_t>(lin)] = 2;
            stack.push_back(lin);
          }
        }
      }
    }
  }
  return components;
}

// ---------------------------------------------------------------------------
// cutoffs and Ciarlet-Nečas checks

std::string to_string(CnVerdict v) {
  switch (v) {
    case CnVerdict::kHolds: return "CN_HOLDS";
    case CnVerdict::kFails: return "CN_FAILS";
    default: return "INCONCLUSIVE";
  }
}

namespace {

TestFn cutoff_fn(const SupCube& U, double delta) {
  const Box b = U.box();
  TestFn t;
  t.fn = [b, delta](const Pt& x) {
    double v = 1.0;
    for (int i = 0; i < b.dim(); ++i) {
      v *= quintic_step((b.hi[i] - x[i]) / delta);
      v *= quintic_step((x[i] - b.lo[i]) / delta);
      if (v == 0.0) return 0.0;
    }
    return v;
  };
  t.grad_sup = 1.875 / delta * b.dim();
  t.name = "cutoff";
  t.support = b;
  return t;
}

struct CutoffFamily {
  std::vector<double> deltas;
  std::vector<TestFn> fns;
};

CutoffFamily make_cutoffs(const SupCube& U, const std::vector<double>& factors, double base) {
  if (factors.empty()) throw std::invalid_argument("cutoffs: need at least one factor");
  for (size_t i = 1; i < factors.size(); ++i)
    if (!(factors[i] < factors[i - 1]))
      throw std::invalid_argument("cutoffs: cutoff sequence must be strictly monotone");
  CutoffFamily fam;
  for (double f : factors) {
    const double delta = f * base;
    if (!(delta > 0.0) || delta >= U.half_side)
      throw std::invalid_argument("cutoffs: delta must lie in (0, half_side)");
    fam.deltas.push_back(delta);
    fam.fns.push_back(cutoff_fn(U, delta));
  }
  return fam;
}

// P(eps, delta) table -> extrapolate eps per cutoff, then delta -> 0.
struct CutoffExtrapolation {
  std::vector<std::pair<double, double>> per_cutoff;  // (delta, eps-limit)
  std::vector<JacobianPairing> pairings;
  double limit = 0.0;
};

CutoffExtrapolation cutoff_pairing(const Mapping& f, const SupCube& U,
                                   const std::vector<double>& scales, const CutoffFamily& fam,
                                   const PairingOptions& opt) {
  if (scales.empty()) throw std::invalid_argument("cutoff_pairing: need smoothing scales");
  std::vector<PairingWeight> weights;
  for (const TestFn& t : fam.fns)
    weights.push_back([&t](const Pt& x, const Pt&) { return t.fn(x); });

  // the cutoffs only vary in a collar along the boundary of U; resolve the
  // steepest ramp there and leave the plateau to the coarse analytic cells
  PairingOptions po = opt;
  const double delta_min = fam.deltas.back();
  const double delta_max = fam.deltas.front();
  po.smooth_leaf = std::min(po.smooth_leaf, 0.5 * delta_min);
  const double collar = delta_max + po.smooth_leaf;
  po.refine_zone = [U, collar](const Box& cell) {
    for (int i = 0; i < cell.dim(); ++i) {
      const double inner_lo = U.center[i] - U.half_side + collar;
      const double inner_hi = U.center[i] + U.half_side - collar;
      if (cell.lo[i] < inner_lo || cell.hi[i] > inner_hi) return true;
    }
    return false;
  };

  std::vector<JacobianPairing> pairings(fam.fns.size());
  for (double eps : scales) {
    const std::vector<double> vals = mollified_pairing_sweep(f, eps, U.box(), weights, po);
    for (size_t j = 0; j < fam.fns.size(); ++j) pairings[j].per_scale.push_back({eps, vals[j]});
  }
  CutoffExtrapolation ex;
  for (size_t j = 0; j < pairings.size(); ++j) {
    finish_pairing(pairings[j]);
    ex.per_cutoff.emplace_back(fam.deltas[j], pairings[j].extrapolated);
  }
  ex.pairings = std::move(pairings);
  const size_t m = ex.per_cutoff.size();
  if (m >= 2)
    ex.limit = linear_extrapolate(ex.per_cutoff[m - 2].first, ex.per_cutoff[m - 2].second,
                                  ex.per_cutoff[m - 1].first, ex.per_cutoff[m - 1].second);
  else
    ex.limit = ex.per_cutoff.back().second;
  return ex;
}

}  // namespace

CnReport ciarlet_necas_check(const Mapping& f, const SupCube& U, const CnOptions& opt) {
  const SupCube dom = f.domain();
  for (int i = 0; i < dom.dim(); ++i)
    if (U.center[i] - U.half_side < dom.center[i] - dom.half_side - 1e-12 ||
        U.center[i] + U.half_side > dom.center[i] + dom.half_side + 1e-12)
      throw std::invalid_argument("ciarlet_necas_check: U must lie inside the domain");

  CnOptions o = opt;
  if (o.scales.empty()) o.scales = {0.02, 0.01, 0.005};

  const CutoffFamily fam = make_cutoffs(U, o.cutoff_factors, o.cutoff_base);
  const CutoffExtrapolation ex = cutoff_pairing(f, U, o.scales, fam, o.pairing);

  CnReport rep;
  rep.cutoff_values = ex.per_cutoff;
  rep.pairings = ex.pairings;
  rep.jacobian_measure = ex.limit;

  GridFunction sampled = GridFunction::sample(f, U, o.measure_grid_n);
  rep.image = image_measure(sampled, U, o.raster);
  rep.ratio = rep.image.midpoint() > 0.0 ? rep.jacobian_measure / rep.image.midpoint() : 0.0;

  const double lo_hold = rep.image.lower * (1.0 - o.hold_tolerance);
  const double hi_hold = rep.image.upper * (1.0 + o.hold_tolerance);
  const double lo_inc = rep.image.lower * (1.0 - o.inconclusive_tolerance);
  const double hi_inc = rep.image.upper * (1.0 + o.inconclusive_tolerance);
  if (rep.jacobian_measure >= lo_hold && rep.jacobian_measure <= hi_hold)
    rep.verdict = CnVerdict::kHolds;
  else if (rep.jacobian_measure >= lo_inc && rep.jacobian_measure <= hi_inc)
    rep.verdict = CnVerdict::kInconclusive;
  else
    rep.verdict = CnVerdict::kFails;
  return rep;
}

CnStabilityReport cn_stability_experiment(const CantorMapSpec& spec,
                                          const std::vector<int>& levels, const SupCube& U,
                                          const CnOptions& opt, int degree_raster_n) {
  if (levels.empty()) throw std::invalid_argument("cn_stability_experiment: need levels");
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("cn_stability_experiment: levels must increase");
  if (spec.variant != CantorVariant::kLusinN)
    throw std::invalid_argument("cn_stability_experiment: homeomorphism family required");

  CnStabilityReport rep;
  const SupCube dom = SupCube::unit(spec.n);
  bool degenerate = U.half_side <= 2.0 * opt.cutoff_factors.front() * opt.cutoff_base;
  for (int i = 0; i < spec.n; ++i)
    if (U.center[i] - U.half_side < dom.center[i] - dom.half_side - 1e-12 ||
        U.center[i] + U.half_side > dom.center[i] + dom.half_side + 1e-12)
      degenerate = true;

  // Common continuity certificate across all levels: the worst case is valid
  // for every truncation, and identical certification data keeps the measure
  // estimator from injecting level-dependent noise into the gap sequence.
  std::vector<std::unique_ptr<PiecewiseRadialMap>> maps;
  std::vector<GridFunction> sampled;
  Modulus common{spec.alpha, 0.0};
  double common_defect = 0.0, common_edge = 0.0;
  if (!degenerate) {
    for (int level : levels) {
      CantorMapSpec s = spec;
      s.truncation_level = level;
      maps.push_back(std::make_unique<PiecewiseRadialMap>(s));
      sampled.push_back(GridFunction::sample(*maps.back(), dom, opt.measure_grid_n));
      common.C = std::max(common.C, maps.back()->modulus().C);
      common_defect = std::max(common_defect, sampled.back().pl_error_bound());
      common_edge = std::max(common_edge, sampled.back().max_edge_oscillation());
    }
  }

  for (size_t idx = 0; idx < levels.size(); ++idx) {
    CnStabilityRow row;
    row.level = levels[idx];
    if (degenerate) {
      row.verdict = CnVerdict::kInconclusive;
      rep.rows.push_back(row);
      continue;
    }
    const CnReport cn = ciarlet_necas_check(*maps[idx], U, opt);
    row.verdict = cn.verdict;
    row.jacobian_measure = cn.jacobian_measure;
    GridFunction g(sampled[idx].grid(), sampled[idx].values(), common);
    g.set_pl_defect(common_defect);
    g.set_edge_oscillation_floor(common_edge);
    row.image = degree_measure(g, U, degree_raster_n);
    row.image_midpoint = row.image.midpoint();
    rep.rows.push_back(row);
  }
  if (degenerate) {
    rep.cauchy_ok = false;
    return rep;
  }

  for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
    rep.gaps.push_back(std::fabs(rep.rows[i + 1].image_midpoint - rep.rows[i].image_midpoint));
  rep.cauchy_ok = true;
  for (size_t i = 0; i + 1 < rep.gaps.size(); ++i)
    if (!(rep.gaps[i + 1] <= std::max(rep.gaps[i] / 1.5, rep.gap_floor))) rep.cauchy_ok = false;
  return rep;
}

// ---------------------------------------------------------------------------
// difference bound

namespace {
class DifferenceMap : public Mapping {
 public:
  DifferenceMap(std::shared_ptr<const Mapping> f, std::shared_ptr<const Mapping> g)
      : f_(std::move(f)), g_(std::move(g)) {
    if (f_->dim() != g_->dim()) throw std::invalid_argument("DifferenceMap: dimension mismatch");
  }
  int dim() const override { return f_->dim(); }
  std::string name() const override { return f_->name() + "-minus-" + g_->name(); }
  SupCube domain() const override { return f_->domain(); }
  Pt eval(const Pt& x) const override { return f_->eval(x) - g_->eval(x); }
  Modulus modulus() const override {
    const Modulus a = f_->modulus(), b = g_->modulus();
    return {std::min(a.alpha, b.alpha), a.C + b.C};
  }

 private:
  std::shared_ptr<const Mapping> f_, g_;
};
}  // namespace

BnReport bn_difference_ratio(std::shared_ptr<const Mapping> f, std::shared_ptr<const Mapping> g,
                             const BumpFn& psi, const BnOptions& opt) {
  if (!f || !g) throw std::invalid_argument("bn_difference_ratio: null map");
  const int n = f->dim();
  const double s = static_cast<double>(n - 1) / n;
  const double p = static_cast<double>(n);

  SeminormParams sp;
  sp.s = s;
  sp.p = p;
  sp.grid_n = opt.seminorm_grid_n;
  sp.refinements = opt.seminorm_refinements;
  const SupCube dom = f->domain();

  BnReport rep;
  DifferenceMap diff(f, g);
  rep.seminorm_diff = std::pow(gagliardo_seminorm(diff, dom, sp).value, 1.0 / p);
  rep.seminorm_f = std::pow(gagliardo_seminorm(*f, dom, sp).value, 1.0 / p);
  rep.seminorm_g = std::pow(gagliardo_seminorm(*g, dom, sp).value, 1.0 / p);

  MollifiedSequence seq_f{f, opt.scales, opt.pairing.kernel};
  MollifiedSequence seq_g{g, opt.scales, opt.pairing.kernel};
  const TestFn phi = bump_test_fn(psi);
  const JacobianPairing pf = distributional_jacobian(seq_f, phi, opt.pairing);
  const JacobianPairing pg = distributional_jacobian(seq_g, phi, opt.pairing);

  rep.pairing_difference = std::fabs(pf.extrapolated - pg.extrapolated);
  rep.seminorm_product_bound =
      rep.seminorm_diff *
      (std::pow(rep.seminorm_f, n - 1) + std::pow(rep.seminorm_g, n - 1)) * psi.grad_sup();
  rep.ratio = rep.seminorm_product_bound > 0.0 ? rep.pairing_difference / rep.seminorm_product_bound
                                               : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// change of variables

CovCheckReport change_of_variables_check(std::shared_ptr<const Mapping> f, const SupCube& Omega,
                                         const BumpFn& psi, const CovCheckOptions& opt) {
  CovCheckReport rep;
  const int n = f->dim();
  const Box support = psi.support().box();

  // certified distance between supp psi and the sampled image of the boundary
  const int per_face = 512;
  double gap = std::numeric_limits<double>::infinity();
  const double face_h = Omega.side() / per_face;
  for (int axis = 0; axis < n; ++axis) {
    for (int side = -1; side <= 1; side += 2) {
      std::array<int, kMaxDim> it{};
      while (true) {
        Pt x = Omega.center;
        x[axis] += side * Omega.half_side;
        int j = 0;
        for (int i = 0; i < n; ++i) {
          if (i == axis) continue;
          x[i] = Omega.center[i] - Omega.half_side + (it[j] + 0.5) * face_h;
          ++j;
        }
        const Pt v = f->eval(x);
        double dist = 0.0;  // sup distance from v to the support box
        for (int i = 0; i < n; ++i) {
          double d = 0.0;
          if (v[i] < support.lo[i]) d = support.lo[i] - v[i];
          if (v[i] > support.hi[i]) d = v[i] - support.hi[i];
          dist = std::max(dist, d);
        }
        gap = std::min(gap, dist);
        int i = 0;
        for (; i < n - 1; ++i) {
          if (++it[i] < per_face) break;
          it[i] = 0;
        }
        if (i == n - 1 || n == 1) break;
      }
    }
  }
  rep.support_gap = gap - f->modulus().slack(0.5 * face_h);
  if (!(rep.support_gap > 0.0)) {
    rep.status = CertStatus::kInconclusive;
    return rep;
  }

  // left side: smoothed Jacobians against psi(f_eps)
  std::vector<PairingWeight> weights{[&psi](const Pt&, const Pt& fx) { return psi(fx); }};
  PairingOptions po = opt.pairing;
  for (double eps : opt.scales) {
    const std::vector<double> vals = mollified_pairing_sweep(*f, eps, Omega.box(), weights, po);
    rep.lhs_pairing.per_scale.push_back({eps, vals[0]});
  }
  finish_pairing(rep.lhs_pairing);
  rep.lhs = rep.lhs_pairing.extrapolated;

  // right side: degree-weighted quadrature over the support of psi
  GridFunction gf = GridFunction::sample(*f, Omega, opt.grid_n);
  DegreeSolver solver(gf, Omega);
  double rhs = 0.0, failures = 0.0, total = 0.0;
  const GaussRule& rule = gauss_legendre(opt.rhs_order);
  const Pt ext = support.extent();
  std::array<int, kMaxDim> cell{};
  while (true) {
    Box sub;
    sub.lo = Pt(n);
    sub.hi = Pt(n);
    for (int i = 0; i < n; ++i) {
      sub.lo[i] = support.lo[i] + ext[i] * cell[i] / opt.rhs_cells;
      sub.hi[i] = support.lo[i] + ext[i] * (cell[i] + 1) / opt.rhs_cells;
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
      const double pv = psi(y);
      if (pv != 0.0) {
        total += std::fabs(w * pv);
        try {
          rhs += w * pv * solver.degree(y).value;
        } catch (const RefineGridError&) {
          failures += std::fabs(w * pv);
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
  if (total > 0.0 && failures / total > opt.max_failure_weight)
    throw std::runtime_error("change_of_variables_check: uncertifiable degree queries carry weight " +
                             std::to_string(failures / total));
  rep.rhs = rhs;
  rep.difference = rep.lhs - rep.rhs;
  rep.status = CertStatus::kCertified;
  return rep;
}

// ---------------------------------------------------------------------------
// construction-map experiments

CantorRegionIntegral cantor_jacobian_integral(const PiecewiseRadialMap& f, const PairingWeight& w,
                                              int t_order, int v_order, int t_cells) {
  const CantorMapSpec& spec = f.spec();
  const int n = spec.n;
  const int cap = f.descent_cap();
  CantorRegionIntegral out;
  out.annulus_by_level.assign(static_cast<size_t>(std::max(cap, 0)), 0.0);

  const GaussRule& gt = gauss_legendre(t_order);
  const GaussRule& gv = gauss_legendre(v_order);

  struct Frame {
    Pt z, zi;
  };
  std::function<void(int, const Frame&)> rec = [&](int k, const Frame& fr) {
    const double r_prev = spec.domain_radius(k - 1);
    const double ri_prev = spec.image_radius(k - 1);
    const double r_k = spec.domain_radius(k);
    const double alpha = f.annulus_alpha(k);
    const double beta = f.annulus_beta(k);
    const double stretch = f.core_stretch(k);
    const unsigned children = 1u << n;
    for (unsigned label = 0; label < children; ++label) {
      Frame child;
      child.z = fr.z;
      child.zi = fr.zi;
      for (int i = 0; i < n; ++i) {
        const int v = (label >> i & 1u) ? +1 : -1;
        child.z[i] += 0.5 * r_prev * v;
        child.zi[i] += 0.5 * ri_prev * v;
      }
      // annulus between r_k and r_prev/2, face by face in sup-polar form
      double annulus_sum = 0.0;
      for (int axis = 0; axis < n; ++axis) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          for (int tc = 0; tc < t_cells; ++tc) {
            const double t0 = r_k + (0.5 * r_prev - r_k) * tc / t_cells;
            const double t1 = r_k + (0.5 * r_prev - r_k) * (tc + 1) / t_cells;
            for (int qt = 0; qt < t_order; ++qt) {
              const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gt.nodes[qt];
              const double wt = 0.5 * (t1 - t0) * gt.weights[qt];
              const double rho = alpha * t + beta;
              const double jac = alpha * std::pow(rho / t, n - 1);
              const double dmeas = std::pow(t, n - 1);
              // transverse coordinates: v in [-1,1]^{n-1}
              std::array<int, kMaxDim> q{};
              while (true) {
                Pt x = child.z;
                Pt unit(n);
                x[axis] += sgn * t;
                unit[axis] = static_cast<double>(sgn);
                double wv = 1.0;
                int j = 0;
                for (int i = 0; i < n; ++i) {
                  if (i == axis) continue;
                  const double vi = gv.nodes[q[j]];
                  wv *= gv.weights[q[j]];
                  x[i] += t * vi;
                  unit[i] = vi;
                  ++j;
                }
                const Pt fx = child.zi + rho * unit;
                annulus_sum += wt * wv * dmeas * jac * w(x, fx);
                int i = 0;
                for (; i < n - 1; ++i) {
                  if (++q[i] < v_order) break;
                  q[i] = 0;
                }
                if (i == n - 1 || n == 1) break;
              }
            }
          }
        }
      }
      out.annulus_by_level[static_cast<size_t>(k - 1)] += annulus_sum;

      if (k < cap) {
        rec(k + 1, child);
      } else {
        // level-cap core cube: homogeneous stretch
        const double jac = std::pow(stretch, n);
        Box core;
        core.lo = child.z;
        core.hi = child.z;
        for (int i = 0; i < n; ++i) {
          core.lo[i] -= r_k;
          core.hi[i] += r_k;
        }
        const Pt mid = core.center();
        const Pt half = 0.5 * core.extent();
        std::array<int, kMaxDim> q{};
        while (true) {
          Pt x(n);
          double wq = 1.0;
          for (int i = 0; i < n; ++i) {
            x[i] = mid[i] + half[i] * gv.nodes[q[i]];
            wq *= gv.weights[q[i]] * half[i];
          }
          const Pt fx = child.zi + stretch * (x - child.z);
          out.core_at_cap += wq * jac * w(x, fx);
          int i = 0;
          for (; i < n; ++i) {
            if (++q[i] < v_order) break;
            q[i] = 0;
          }
          if (i == n) break;
        }
      }
    }
  };

  if (cap >= 1) {
    Frame root{Pt(n), Pt(n)};
    rec(1, root);
  } else {
    // identity: single global "core"
    out.core_at_cap = gauss_box(SupCube::unit(n).box(), v_order, [&](const Pt& x) {
      return w(x, x);
    });
  }
  for (double v : out.annulus_by_level) out.total += v;
  out.total += out.core_at_cap;
  return out;
}

LusinMassReport lusin_mass_experiment(const CantorMapSpec& spec, const LusinOptions& opt) {
  if (spec.variant != CantorVariant::kLusinN)
    throw std::invalid_argument("lusin_mass_experiment: lusin-n construction required");
  LusinMassReport rep;

  // per-level pointwise Jacobian integral: image-shell measures, summed
  double running = 0.0;
  std::vector<double> closed;
  for (int k = 1; k <= spec.truncation_level; ++k) {
    const double shell = std::pow(2.0, spec.n * k) *
                         (std::pow(spec.image_radius(k - 1), spec.n) -
                          std::pow(2.0 * spec.image_radius(k), spec.n));
    running += shell;
    LusinLevelRow row;
    row.level = k;
    row.analytic_regions = running;
    row.closed_form = pointwise_jacobian_integral(spec, k).value;
    rep.rows.push_back(row);
    closed.push_back(row.closed_form);
  }
  rep.pointwise_limit = aitken_limit(closed);

  PiecewiseRadialMap map(spec);
  const SupCube U = SupCube::unit(spec.n);
  const CutoffFamily fam = make_cutoffs(U, opt.cutoff_factors, opt.cutoff_base);
  const CutoffExtrapolation ex = cutoff_pairing(map, U, opt.scales, fam, opt.pairing);
  rep.cutoff_values = ex.per_cutoff;
  rep.pairings = ex.pairings;
  rep.jacobian_total = ex.limit;
  rep.singular_gap = rep.jacobian_total - rep.pointwise_limit;
  return rep;
}

OrientationReport orientation_experiment(const CantorMapSpec& spec, std::int64_t jacobian_samples,
                                         int degree_targets, int grid_n, std::uint64_t seed) {
  if (spec.variant != CantorVariant::kOrientation)
    throw std::invalid_argument("orientation_experiment: orientation construction required");
  auto base = make_cantor_map(spec);
  OrientationReport rep;
  rep.samples = jacobian_samples;

  Rng rng(seed);
  const Box dom = base->domain().box();
  for (std::int64_t i = 0; i < jacobian_samples; ++i) {
    const Pt z = rng.point_in(dom);
    try {
      const Differential d = base->analytic_differential(z);
      if (d.tag.kind == RegionKind::kCoreCube) continue;  // settled only by deeper generations
      ++rep.resolved;
      // reflected map: J_ref(x) = -J(flip x); sampling z = flip x is uniform too
      if (-d.jacobian > 0.0) ++rep.positive;
    } catch (const UndefinedDerivative&) {
      // boundary/cross points: excluded
    }
  }
  rep.positive_fraction =
      rep.resolved > 0 ? static_cast<double>(rep.positive) / static_cast<double>(rep.resolved) : 0.0;

  ReflectedMap reflected(base);
  GridFunction gf = GridFunction::sample(reflected, base->domain(), grid_n);
  DegreeSolver solver(gf, base->domain());
  rep.all_degree_minus_one = true;
  for (int t = 0; t < degree_targets; ++t) {
    Pt y(spec.n);
    for (int i = 0; i < spec.n; ++i) y[i] = rng.uniform(-0.8, 0.8);
    const int deg = solver.degree(y).value;
    rep.degrees.push_back(deg);
    if (deg != -1) rep.all_degree_minus_one = false;
  }
  return rep;
}

}  // namespace fracdeg
