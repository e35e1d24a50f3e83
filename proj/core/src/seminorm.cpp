#include "fracdeg/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fracdeg/rng.hpp"

namespace fracdeg {

namespace {

// surface measure of the euclidean unit sphere S^{d-1}
double sphere_surface(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default: {
      // 2 pi^{d/2} / Gamma(d/2)
      return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
    }
  }
}

// Contribution of the excised diagonal shell |x-y| < h under the local
// Hölder model |f(x)-f(y)| ~ c(x) |x-y|^alpha, with c(x) measured from the
// nearest samples.  The certified global constant would be a valid but wildly
// conservative stand-in; the local coefficients make the correction track the
// actual missing mass.
double diagonal_correction(const Mapping& f, const SupCube& dom, double s, double p, double h,
                           double h_min = 0.0) {
  const Modulus mod = f.modulus();
  const int d = dom.dim();
  const double q = (mod.alpha - s) * p;  // radial exponent after the surface factor
  if (q <= 0.0) return 0.0;              // modulus too weak to control the diagonal
  const double upper = std::pow(h, q);
  const double lower = h_min > 0.0 ? std::pow(h_min, q) : 0.0;
  if (upper <= lower) return 0.0;

  // mean of the local coefficient^p over a probe lattice
  const int probe_n = 24;
  const double ph = dom.side() / probe_n;
  double cp_sum = 0.0;
  std::int64_t cp_count = 0;
  std::array<int, kMaxDim> idx{};
  while (true) {
    Pt x(d);
    for (int i = 0; i < d; ++i) x[i] = dom.center[i] - dom.half_side + (idx[i] + 0.5) * ph;
    const Pt fx = f.eval(x);
    double local = 0.0;
    int dirs = 0;
    for (int axis = 0; axis < d; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        Pt y = x;
        y[axis] += dir * h;
        if (std::fabs(y[axis] - dom.center[axis]) > dom.half_side) continue;
        local += std::pow(euclid_dist(fx, f.eval(y)) / std::pow(h, mod.alpha), p);
        ++dirs;
      }
    }
    if (dirs > 0) {
      cp_sum += local / dirs;
      ++cp_count;
    }
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < probe_n) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  const double cp_mean = cp_count > 0 ? cp_sum / static_cast<double>(cp_count) : 0.0;
  return dom.volume() * cp_mean * sphere_surface(d) * (upper - lower) / q;
}

double grid_pass(const Mapping& f, const SupCube& dom, double s, double p, int n_cells,
                 int threads) {
  const int d = dom.dim();
  const double h = dom.side() / n_cells;
  const double w = std::pow(h, d);

  // cell-center sample points
  std::int64_t count = 1;
  for (int i = 0; i < d; ++i) count *= n_cells;
  std::vector<Pt> xs(static_cast<size_t>(count), Pt(d));
  std::vector<Pt> vals(static_cast<size_t>(count), Pt(f.dim()));
  for (std::int64_t lin = 0; lin < count; ++lin) {
    std::int64_t rest = lin;
    Pt x(d);
    for (int i = 0; i < d; ++i) {
      const int ci = static_cast<int>(rest % n_cells);
      rest /= n_cells;
      x[i] = dom.center[i] - dom.half_side + (ci + 0.5) * h;
    }
    xs[static_cast<size_t>(lin)] = x;
    vals[static_cast<size_t>(lin)] = f.eval(x);
  }

  const double exponent = d + s * p;
  const double excl2 = h * h;
  auto chunk_sum = [&](std::int64_t lo, std::int64_t hi) {
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const Pt& xi = xs[static_cast<size_t>(i)];
      const Pt& fi = vals[static_cast<size_t>(i)];
      for (std::int64_t j = i + 1; j < count; ++j) {
        double r2 = 0.0;
        const Pt& xj = xs[static_cast<size_t>(j)];
        for (int c = 0; c < d; ++c) {
          const double dd = xi[c] - xj[c];
          r2 += dd * dd;
        }
        if (r2 < excl2) continue;
        const Pt& fj = vals[static_cast<size_t>(j)];
        double df = 0.0;
        for (int c = 0; c < fi.dim(); ++c) {
          const double dd = fi[c] - fj[c];
          df += dd * dd;
        }
        acc += std::pow(df, 0.5 * p) / std::pow(r2, 0.5 * exponent);
      }
    }
    return acc;
  };

  double sum = 0.0;
  if (threads <= 1) {
    sum = chunk_sum(0, count);
  } else {
    const int nt = std::min<std::int64_t>(threads, count);
    std::vector<double> partial(static_cast<size_t>(nt), 0.0);
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      // strided ranges balance the triangular loop reasonably well
      pool.emplace_back([&, t]() {
        double acc = 0.0;
        for (std::int64_t i = t; i < count; i += nt) acc += chunk_sum(i, i + 1);
        partial[static_cast<size_t>(t)] = acc;
      });
    }
    for (auto& th : pool) th.join();
    for (double v : partial) sum += v;  // fixed combine order
  }
  return 2.0 * sum * w * w;  // unordered pairs counted once above
}

double monte_carlo_pass(const Mapping& f, const SupCube& dom, double s, double p,
                        std::int64_t samples, std::uint64_t seed, double h_min,
                        double alpha_cert) {
  const int d = dom.dim();
  Rng rng(seed);
  const Box box = dom.box();
  const double diam = dom.side() * std::sqrt(static_cast<double>(d));
  const double q = p * (alpha_cert - s);
  if (q <= 0.0)
    throw std::invalid_argument("gagliardo_seminorm: monte carlo importance sampling needs alpha_cert > s");
  const double tq_lo = std::pow(h_min, q);
  const double tq_hi = std::pow(diam, q);
  const double surface = sphere_surface(d);

  double acc = 0.0;
  for (std::int64_t it = 0; it < samples; ++it) {
    const Pt x = rng.point_in(box);
    const double t = std::pow(tq_lo + rng.uniform01() * (tq_hi - tq_lo), 1.0 / q);
    const Pt dir = rng.direction(d);
    Pt y = x;
    for (int i = 0; i < d; ++i) y[i] += t * dir[i];
    if (!dom.contains_closed(y)) continue;  // integrand extended by zero
    const Pt fx = f.eval(x);
    const Pt fy = f.eval(y);
    double df = 0.0;
    for (int c = 0; c < fx.dim(); ++c) {
      const double dd = fx[c] - fy[c];
      df += dd * dd;
    }
    // radial pdf of t: q t^{q-1} / (tq_hi - tq_lo); vector pdf divides by the
    // sphere area t^{d-1} surface
    const double pdf = q * std::pow(t, q - 1.0) / (tq_hi - tq_lo) / (surface * std::pow(t, d - 1));
    acc += std::pow(df, 0.5 * p) / std::pow(t, d + s * p) / pdf;
  }
  return dom.volume() * acc / static_cast<double>(samples);
}

}  // namespace

SliceMapping::SliceMapping(const Mapping& f, int axis, double offset)
    : f_(f), axis_(axis), offset_(offset) {
  if (axis < 0 || axis >= f.dim()) throw std::invalid_argument("SliceMapping: bad axis");
  if (f.dim() < 2) throw std::invalid_argument("SliceMapping: map must have dim >= 2");
}

std::string SliceMapping::name() const {
  return f_.name() + "-slice" + std::to_string(axis_);
}

SupCube SliceMapping::domain() const {
  const SupCube d = f_.domain();
  Pt c(d.dim() - 1);
  for (int i = 0, j = 0; i < d.dim(); ++i)
    if (i != axis_) c[j++] = d.center[i];
  return SupCube(c, d.half_side);
}

Pt SliceMapping::eval(const Pt& u) const {
  Pt x(f_.dim());
  for (int i = 0, j = 0; i < f_.dim(); ++i) x[i] = (i == axis_) ? offset_ : u[j++];
  return f_.eval(x);
}

SeminormEstimate gagliardo_seminorm(const Mapping& f, const SupCube& dom,
                                    const SeminormParams& params) {
  if (!(params.s > 0.0 && params.s < 1.0 && params.p > 1.0))
    throw std::invalid_argument("gagliardo_seminorm: need s in (0,1) and p > 1");
  if (dom.dim() < 1 || !(dom.half_side > 0.0))
    throw std::invalid_argument("gagliardo_seminorm: degenerate domain");

  SeminormEstimate est;
  if (params.method == SeminormMethod::kGrid) {
    est.method = "grid";
    int n = params.grid_n;
    const int steps = std::max(3, params.refinements);
    for (int r = 0; r < steps; ++r, n *= 2) {
      const double h = dom.side() / n;
      const double value =
          grid_pass(f, dom, params.s, params.p, n, params.threads) +
          diagonal_correction(f, dom, params.s, params.p, h);
      est.history.emplace_back(n, value);
    }
  } else {
    est.method = "monte-carlo";
    std::int64_t m = params.mc_samples / 4;
    const int steps = std::max(3, params.refinements);
    for (int r = 0; r < steps; ++r, m *= 2) {
      const double value = monte_carlo_pass(f, dom, params.s, params.p, std::max<std::int64_t>(m, 16),
                                            params.seed + static_cast<std::uint64_t>(r),
                                            params.mc_min_dist, f.modulus().alpha) +
                           diagonal_correction(f, dom, params.s, params.p, params.mc_min_dist);
      est.history.emplace_back(static_cast<int>(std::min<std::int64_t>(m, INT32_MAX)), value);
    }
  }
  est.value = est.history.back().second;
  est.diagonal_correction =
      diagonal_correction(f, dom, params.s, params.p, dom.side() / est.history.back().first);
  for (size_t i = 1; i < est.history.size(); ++i)
    if (est.history[i].first <= est.history[i - 1].first)
      throw std::logic_error("gagliardo_seminorm: refinement history not monotone");
  return est;
}

EmbeddingReport holder_vs_gagliardo(const Mapping& f, const SupCube& cube,
                                    const SeminormParams& params) {
  const int d = cube.dim();
  if (!(params.s * params.p > d))
    throw EmbeddingInapplicable("holder_vs_gagliardo: requires s p > d");
  EmbeddingReport rep;
  rep.alpha = params.s - d / params.p;

  // sampled Hölder seminorm: grid pairs plus random pairs at mixed scales
  const int n = std::min(params.grid_n, 24);
  std::vector<Pt> xs;
  std::int64_t count = 1;
  for (int i = 0; i < d; ++i) count *= n;
  const double h = cube.side() / n;
  for (std::int64_t lin = 0; lin < count; ++lin) {
    std::int64_t rest = lin;
    Pt x(d);
    for (int i = 0; i < d; ++i) {
      x[i] = cube.center[i] - cube.half_side + (static_cast<int>(rest % n) + 0.5) * h;
      rest /= n;
    }
    xs.push_back(x);
  }
  double holder = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const Pt fi = f.eval(xs[i]);
    for (size_t j = i + 1; j < xs.size(); ++j) {
      const double dist = euclid_dist(xs[i], xs[j]);
      holder = std::max(holder, euclid_dist(fi, f.eval(xs[j])) / std::pow(dist, rep.alpha));
    }
  }
  Rng rng(params.seed);
  for (int it = 0; it < 20000; ++it) {
    const Pt x = rng.point_in(cube.box());
    Pt y = x;
    const double scale = std::exp(rng.uniform(std::log(1e-6), std::log(cube.side())));
    for (int i = 0; i < d; ++i)
      y[i] = std::clamp(x[i] + scale * rng.uniform(-1.0, 1.0),
                        cube.center[i] - cube.half_side, cube.center[i] + cube.half_side);
    const double dist = euclid_dist(x, y);
    if (dist <= 0.0) continue;
    holder = std::max(holder, euclid_dist(f.eval(x), f.eval(y)) / std::pow(dist, rep.alpha));
  }
  rep.holder_seminorm = holder;

  const SeminormEstimate g = gagliardo_seminorm(f, cube, params);
  rep.gagliardo_value = std::pow(g.value, 1.0 / params.p);
  rep.ratio = rep.gagliardo_value > 0.0 ? rep.holder_seminorm / rep.gagliardo_value : 0.0;
  return rep;
}

SliceSeminormReport slice_seminorm(const Mapping& f, const SupCube& dom, int axis,
                                   const std::vector<double>& offsets,
                                   const SeminormParams& params) {
  if (offsets.empty()) throw std::invalid_argument("slice_seminorm: need at least one offset");
  const double lo = dom.center[axis] - dom.half_side;
  const double hi = dom.center[axis] + dom.half_side;
  for (double r : offsets)
    if (r < lo || r > hi) throw std::invalid_argument("slice_seminorm: offset outside the domain");

  SliceMapping probe(f, axis, offsets.front());
  const SupCube slice_dom = probe.domain();

  SliceSeminormReport rep;
  for (double r : offsets) {
    SliceMapping slice(f, axis, r);
    rep.per_offset.emplace_back(r, gagliardo_seminorm(slice, slice_dom, params).value);
  }
  if (offsets.size() == 1) {
    rep.integrated = rep.per_offset.front().second * dom.side();
  } else {
    for (size_t i = 0; i + 1 < offsets.size(); ++i)
      rep.integrated += 0.5 * (rep.per_offset[i].second + rep.per_offset[i + 1].second) *
                        (offsets[i + 1] - offsets[i]);
  }
  rep.full_domain = gagliardo_seminorm(f, dom, params).value;
  rep.ratio = rep.full_domain > 0.0 ? rep.integrated / rep.full_domain : 0.0;
  return rep;
}

}  // namespace fracdeg
