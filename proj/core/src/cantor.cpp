#include "fracdeg/cantor.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "fracdeg/rng.hpp"

namespace fracdeg {

std::string to_string(CantorVariant v) {
  return v == CantorVariant::kLusinN ? "lusin-n" : "orientation";
}

CantorVariant cantor_variant_from_string(const std::string& s) {
  if (s == "lusin-n" || s == "lusin_n" || s == "lusinN") return CantorVariant::kLusinN;
  if (s == "orientation") return CantorVariant::kOrientation;
  throw std::invalid_argument("unknown construction variant: " + s);
}

CantorMapSpec CantorMapSpec::lusin_n(int n, double alpha, int level) {
  CantorMapSpec s;
  s.n = n;
  s.variant = CantorVariant::kLusinN;
  s.alpha = alpha;
  s.A = std::pow(2.0, (1.0 - alpha) / alpha);
  s.B = 0.0;
  s.truncation_level = level;
  s.validate();
  return s;
}

CantorMapSpec CantorMapSpec::orientation(int n, double alpha, double A, double B, int level) {
  CantorMapSpec s;
  s.n = n;
  s.variant = CantorVariant::kOrientation;
  s.alpha = alpha;
  s.A = A;
  s.B = B;
  s.truncation_level = level;
  s.validate();
  return s;
}

void CantorMapSpec::validate() const {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("CantorMapSpec: need 2 <= n <= 8");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("CantorMapSpec: alpha must lie in (0,1)");
  if (truncation_level < 0) throw std::invalid_argument("CantorMapSpec: level must be >= 0");
  if (!(A > 0.0)) throw std::invalid_argument("CantorMapSpec: A must be positive");
  if (variant == CantorVariant::kLusinN) {
    if (std::fabs(2.0 - std::pow(2.0 * A, alpha)) > 1e-12)
      throw std::invalid_argument("CantorMapSpec: lusin-n requires 2 = (2A)^alpha");
  } else {
    if (!(B > 0.0 && B < 1.0)) throw std::invalid_argument("CantorMapSpec: B must lie in (0,1)");
    if (!(B + A < (1.0 + A) * (1.0 - alpha)))
      throw std::invalid_argument("CantorMapSpec: orientation requires B + A < (1+A)(1-alpha)");
  }
}

double CantorMapSpec::a(int k) const {
  if (variant == CantorVariant::kLusinN) return std::pow(A, -k);
  return std::pow(2.0, -A * k);
}

double CantorMapSpec::b(int k) const {
  if (k == 0) return 1.0;  // glue level 1 to the identity on the outer shell
  if (variant == CantorVariant::kLusinN) return 0.5 * (1.0 - 1.0 / A) + std::pow(A, -k);
  return std::pow(2.0, B * k);
}

double CantorMapSpec::domain_radius(int k) const { return a(k) * std::pow(2.0, -k); }
double CantorMapSpec::image_radius(int k) const { return b(k) * std::pow(2.0, -k); }

namespace {
// A = 2^m for integer m >= 1, detected within 1e-12.
int dyadic_exponent(double A) {
  const double m = std::log2(A);
  const double mr = std::round(m);
  if (mr >= 1.0 && mr <= 40.0 && std::fabs(m - mr) < 1e-12) return static_cast<int>(mr);
  return 0;
}
}  // namespace

bool CantorMapSpec::exact() const {
  return variant == CantorVariant::kLusinN && dyadic_exponent(A) > 0;
}

Rational CantorMapSpec::a_exact(int k) const {
  if (!exact()) throw std::logic_error("CantorMapSpec: no exact backbone for these parameters");
  return Rational::pow2(-dyadic_exponent(A) * k);
}

Rational CantorMapSpec::b_exact(int k) const {
  if (!exact()) throw std::logic_error("CantorMapSpec: no exact backbone for these parameters");
  if (k == 0) return Rational(1);
  const int m = dyadic_exponent(A);
  return (Rational(1) - Rational::pow2(-m)) * Rational(1, 2) + Rational::pow2(-m * k);
}

Rational CantorMapSpec::domain_radius_exact(int k) const { return a_exact(k) * Rational::pow2(-k); }
Rational CantorMapSpec::image_radius_exact(int k) const { return b_exact(k) * Rational::pow2(-k); }

std::string CantorMapSpec::to_config() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "n=%d\nvariant=%s\nalpha=%.17g\nA=%.17g\nB=%.17g\nK=%d\nseed=%llu\n", n,
                to_string(variant).c_str(), alpha, A, B, truncation_level,
                static_cast<unsigned long long>(seed));
  return buf;
}

CantorMapSpec CantorMapSpec::from_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  CantorMapSpec s;
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument(std::string("config: missing key ") + key);
    return it->second;
  };
  s.n = std::stoi(need("n"));
  s.variant = cantor_variant_from_string(need("variant"));
  s.alpha = std::stod(need("alpha"));
  s.A = std::stod(need("A"));
  s.B = std::stod(need("B"));
  s.truncation_level = std::stoi(need("K"));
  if (kv.count("seed")) s.seed = std::stoull(kv["seed"]);
  s.validate();
  return s;
}

LevelMeasure level_union_measure(const CantorMapSpec& spec, ConstructionSide side, int k) {
  if (k < 1) throw std::invalid_argument("level_union_measure: level must be >= 1");
  LevelMeasure out;
  const double r =
      side == ConstructionSide::kDomain ? spec.domain_radius(k) : spec.image_radius(k);
  out.value = std::pow(std::pow(2.0, k) * 2.0 * r, spec.n);
  if (spec.exact()) {
    const Rational rr = side == ConstructionSide::kDomain ? spec.domain_radius_exact(k)
                                                          : spec.image_radius_exact(k);
    out.exact = (Rational::pow2(k + 1) * rr).pow(spec.n);
  }
  return out;
}

LevelMeasure pointwise_jacobian_integral(const CantorMapSpec& spec, int k) {
  if (k < 0) throw std::invalid_argument("pointwise_jacobian_integral: level must be >= 0");
  LevelMeasure out;
  const double img = std::pow(std::pow(2.0, k) * 2.0 * spec.image_radius(k), spec.n);
  out.value = std::pow(2.0, spec.n) - img;
  if (spec.exact()) {
    const Rational imgr = (Rational::pow2(k + 1) * spec.image_radius_exact(k)).pow(spec.n);
    out.exact = Rational::pow2(spec.n) - imgr;
  }
  return out;
}

// ---------------------------------------------------------------------------
// PiecewiseRadialMap

PiecewiseRadialMap::PiecewiseRadialMap(CantorMapSpec spec, EvalMode mode, double limit_tolerance)
    : spec_(std::move(spec)), mode_(mode), limit_tol_(limit_tolerance) {
  spec_.validate();
  if (mode_ == EvalMode::kLimit && !(limit_tol_ > 0.0))
    throw std::invalid_argument("PiecewiseRadialMap: limit tolerance must be positive");

  // Tail of the uniform convergence bound: moving a point at generation k can
  // relocate it only within image shells of diameter ~ r~_i, i > k.
  auto tail_at = [&](int k) {
    double t = 0.0;
    for (int i = k + 200; i > k; --i) t += 2.0 * spec_.image_radius(i);
    return t;
  };

  cap_ = spec_.truncation_level;
  if (mode_ == EvalMode::kLimit) {
    int k = 0;
    while (k < 64 && tail_at(k) >= limit_tol_) ++k;
    cap_ = std::max(cap_, k);
  }

  coef_.resize(cap_ + 1);
  tail_.resize(cap_ + 1);
  coef_[0] = {spec_.domain_radius(0), spec_.image_radius(0), 1.0, 0.0, 1.0};
  tail_[0] = tail_at(0);
  for (int k = 1; k <= cap_; ++k) {
    Coef& c = coef_[k];
    c.r = spec_.domain_radius(k);
    c.r_img = spec_.image_radius(k);
    const double r_out = 0.5 * coef_[k - 1].r;       // outer annulus radius r_{k-1}/2
    const double ri_out = 0.5 * coef_[k - 1].r_img;  // its image radius
    if (!(c.r < r_out))
      throw std::invalid_argument("PiecewiseRadialMap: generation cubes do not nest (r_k >= r_{k-1}/2)");
    c.alpha = (c.r_img - ri_out) / (c.r - r_out);
    c.beta = c.r_img - c.alpha * c.r;
    c.stretch = c.r_img / c.r;
    tail_[k] = tail_at(k);
  }

  // Sampled Hölder certificate with a safety factor; analytic constants for
  // the construction exist but are not sharp enough to be useful.
  modulus_.alpha = spec_.alpha;
  modulus_.C = 1.0;
  HolderCertificate cert = holder_certificate(4096, spec_.seed ^ 0x5eedULL);
  modulus_.C = 1.5 * std::max(cert.seminorm, 1.0);
}

std::string PiecewiseRadialMap::name() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s-a%g-K%d%s", to_string(spec_.variant).c_str(), spec_.alpha,
                spec_.truncation_level, mode_ == EvalMode::kLimit ? "-limit" : "");
  return buf;
}

RegionPoint PiecewiseRadialMap::classify_to(const Pt& x, int cap) const {
  const int n = spec_.n;
  RegionPoint rp;
  rp.domain_center = Pt(n);
  rp.image_center = Pt(n);
  std::uint64_t path = 1;

  Pt z(n), zi(n);
  for (int k = 1; k <= cap; ++k) {
    const double r_prev = coef_[k - 1].r;
    const double ri_prev = coef_[k - 1].r_img;
    VertexLabel label = 0;
    bool strict = true;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - z[i];
      if (d > 0.0)
        label |= 1u << i;
      if (d == 0.0 || std::fabs(d) >= r_prev) strict = false;
    }
    if (!strict) {
      // On the separating cross (or the root boundary): governed by the
      // enclosing core formula, level k-1.
      rp.tag.kind = (k == 1) ? RegionKind::kOutside : RegionKind::kCoreCube;
      rp.tag.level = k - 1;
      rp.tag.path = path;
      rp.domain_center = z;
      rp.image_center = zi;
      rp.t = sup_dist(x, z);
      return rp;
    }
    Pt zc = z, zci = zi;
    for (int i = 0; i < n; ++i) {
      const int v = (label >> i & 1u) ? +1 : -1;
      zc[i] += 0.5 * r_prev * v;
      zci[i] += 0.5 * ri_prev * v;
    }
    path = (path << n) | label;
    const double t = sup_dist(x, zc);
    if (t >= coef_[k].r) {
      rp.tag.kind = RegionKind::kAnnulus;
      rp.tag.level = k;
      rp.tag.path = path;
      rp.domain_center = zc;
      rp.image_center = zci;
      rp.t = t;
      return rp;
    }
    if (k == cap) {
      rp.tag.kind = RegionKind::kCoreCube;
      rp.tag.level = k;
      rp.tag.path = path;
      rp.domain_center = zc;
      rp.image_center = zci;
      rp.t = t;
      return rp;
    }
    z = zc;
    zi = zci;
  }
  // cap == 0: the identity map.
  rp.tag.kind = RegionKind::kOutside;
  rp.tag.level = 0;
  rp.tag.path = path;
  rp.t = x.sup_norm();
  return rp;
}

RegionPoint PiecewiseRadialMap::classify(const Pt& x) const {
  if (x.dim() != spec_.n) throw std::invalid_argument("classify: dimension mismatch");
  if (x.sup_norm() > 1.0) throw std::domain_error("classify: point outside [-1,1]^n");
  RegionPoint rp = classify_to(x, cap_);
  if (mode_ == EvalMode::kLimit && rp.tag.kind == RegionKind::kCoreCube &&
      rp.tag.level == cap_)
    rp.tag.kind = RegionKind::kResidual;
  return rp;
}

Pt PiecewiseRadialMap::eval(const Pt& x) const {
  if (x.dim() != spec_.n) throw std::invalid_argument("eval: dimension mismatch");
  if (x.sup_norm() > 1.0) throw std::domain_error("eval: point outside [-1,1]^n");
  const RegionPoint rp = classify_to(x, cap_);
  switch (rp.tag.kind) {
    case RegionKind::kOutside:
      return x;
    case RegionKind::kAnnulus: {
      const Coef& c = coef_[rp.tag.level];
      const double rho = c.alpha * rp.t + c.beta;
      return rp.image_center + (rho / rp.t) * (x - rp.domain_center);
    }
    default: {  // core cube (possibly a cross point governed by its core)
      const Coef& c = coef_[rp.tag.level];
      return rp.image_center + c.stretch * (x - rp.domain_center);
    }
  }
}

Differential PiecewiseRadialMap::analytic_differential(const Pt& x) const {
  const RegionPoint rp = classify(x);
  const int n = spec_.n;
  Differential d;
  d.tag = rp.tag;
  switch (rp.tag.kind) {
    case RegionKind::kOutside:
      throw UndefinedDerivative("derivative undefined on the root boundary/cross");
    case RegionKind::kResidual:
      throw UndefinedDerivative("derivative unresolved at this truncation (residual set)");
    case RegionKind::kCoreCube: {
      if (rp.tag.level < cap_)
        throw UndefinedDerivative("derivative undefined on a region boundary (cross)");
      const Coef& c = coef_[rp.tag.level];
      d.operator_norm = c.stretch;
      d.jacobian = std::pow(c.stretch, n);
      break;
    }
    case RegionKind::kAnnulus: {
      const Coef& c = coef_[rp.tag.level];
      const double r_in = c.r;
      const double r_out = 0.5 * coef_[rp.tag.level - 1].r;
      if (rp.t == r_in || rp.t == r_out)
        throw UndefinedDerivative("derivative undefined on a region boundary");
      int attain = 0;
      for (int i = 0; i < n; ++i)
        if (std::fabs(x[i] - rp.domain_center[i]) == rp.t) ++attain;
      if (attain != 1)
        throw UndefinedDerivative("derivative undefined on a sup-norm wedge diagonal");
      const double rho = c.alpha * rp.t + c.beta;
      d.operator_norm = std::max(std::fabs(c.alpha), rho / rp.t);
      d.jacobian = c.alpha * std::pow(rho / rp.t, n - 1);
      break;
    }
    default:
      throw UndefinedDerivative("derivative undefined here");
  }

  // Centered finite differences, step clipped to stay inside the region.
  double margin;
  if (rp.tag.kind == RegionKind::kAnnulus) {
    const double r_out = 0.5 * coef_[rp.tag.level - 1].r;
    margin = std::min(rp.t - coef_[rp.tag.level].r, r_out - rp.t);
    double wedge = 1e300;
    for (int i = 0; i < n; ++i) {
      const double di = std::fabs(x[i] - rp.domain_center[i]);
      if (di < rp.t) wedge = std::min(wedge, rp.t - di);
    }
    margin = std::min(margin, wedge);
  } else {
    margin = coef_[rp.tag.level].r - rp.t;
  }
  const double step = std::min(1e-6 * coef_[rp.tag.level].r, 0.4 * margin);
  if (step > 0.0) {
    double grad[kMaxDim][kMaxDim];
    for (int j = 0; j < n; ++j) {
      Pt xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      const Pt fp = eval(xp), fm = eval(xm);
      for (int i = 0; i < n; ++i) grad[i][j] = (fp[i] - fm[i]) / (2.0 * step);
    }
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::fabs(grad[r][col]) > std::fabs(grad[piv][col])) piv = r;
      if (piv != col) {
        for (int cc = 0; cc < n; ++cc) std::swap(grad[piv][cc], grad[col][cc]);
        det = -det;
      }
      if (grad[col][col] == 0.0) {
        det = 0.0;
        break;
      }
      det *= grad[col][col];
      for (int r = col + 1; r < n; ++r) {
        const double f = grad[r][col] / grad[col][col];
        for (int cc = col; cc < n; ++cc) grad[r][cc] -= f * grad[col][cc];
      }
    }
    d.fd_jacobian = det;
  } else {
    d.fd_jacobian = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

std::optional<double> PiecewiseRadialMap::pointwise_jacobian(const Pt& x) const {
  try {
    return analytic_differential(x).jacobian;
  } catch (const UndefinedDerivative&) {
    return std::nullopt;
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

std::optional<AnalyticPatch> PiecewiseRadialMap::analytic_patch(const Box& box,
                                                                double margin) const {
  const int n = spec_.n;
  if (box.dim() != n) return std::nullopt;
  const Box eb = box.expanded(margin);

  Pt z(n), zi(n);
  for (int k = 1; k <= cap_; ++k) {
    const double r_prev = coef_[k - 1].r;
    const double ri_prev = coef_[k - 1].r_img;
    // The box (expanded) must land strictly inside one child quadrant.
    VertexLabel label = 0;
    for (int i = 0; i < n; ++i) {
      const double a = eb.lo[i] - z[i];
      const double b = eb.hi[i] - z[i];
      if (a > 0.0 && b < r_prev) {
        label |= 1u << i;
      } else if (!(b < 0.0 && a > -r_prev)) {
        return std::nullopt;  // straddles the cross or the quadrant boundary
      }
    }
    Pt zc = z, zci = zi;
    for (int i = 0; i < n; ++i) {
      const int v = (label >> i & 1u) ? +1 : -1;
      zc[i] += 0.5 * r_prev * v;
      zci[i] += 0.5 * ri_prev * v;
    }
    // Per-axis sup-distance intervals over the expanded box.
    double dlo[kMaxDim], dhi[kMaxDim];
    double tmin = 0.0, tmax = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = eb.lo[i] - zc[i];
      const double b = eb.hi[i] - zc[i];
      dlo[i] = (a > 0.0) ? a : (b < 0.0 ? -b : 0.0);
      dhi[i] = std::max(b, -a);
      tmin = std::max(tmin, dlo[i]);
      tmax = std::max(tmax, dhi[i]);
    }
    const double r_k = coef_[k].r;
    if (tmin > r_k) {
      // Whole box in the open annulus; additionally require one wedge so the
      // radial profile is smooth throughout.
      int wedge = -1;
      for (int i = 0; i < n && wedge < 0; ++i) {
        bool dominant = true;
        for (int j = 0; j < n; ++j)
          if (j != i && !(dlo[i] > dhi[j])) dominant = false;
        if (dominant) wedge = i;
      }
      if (wedge < 0) return std::nullopt;
      AnalyticPatch p;
      p.kind = RegionKind::kAnnulus;
      p.level = k;
      p.domain_center = zc;
      p.image_center = zci;
      p.coef_a = coef_[k].alpha;
      p.coef_b = coef_[k].beta;
      p.stretch = coef_[k].stretch;
      p.wedge_axis = wedge;
      return p;
    }
    if (tmax < r_k) {
      if (k == cap_) {
        AnalyticPatch p;
        p.kind = RegionKind::kCoreCube;
        p.level = k;
        p.domain_center = zc;
        p.image_center = zci;
        p.stretch = coef_[k].stretch;
        return p;
      }
      z = zc;
      zi = zci;
      continue;
    }
    return std::nullopt;  // straddles the core boundary
  }
  if (cap_ == 0) {
    AnalyticPatch p;  // identity map
    p.kind = RegionKind::kGlobal;
    p.stretch = 1.0;
    p.domain_center = Pt(n);
    p.image_center = Pt(n);
    return p;
  }
  return std::nullopt;
}

double PiecewiseRadialMap::patch_jacobian(const AnalyticPatch& patch, const Pt& x) const {
  const int n = spec_.n;
  if (patch.kind == RegionKind::kAnnulus) {
    const double t = std::fabs(x[patch.wedge_axis] - patch.domain_center[patch.wedge_axis]);
    const double rho = patch.coef_a * t + patch.coef_b;
    return patch.coef_a * std::pow(rho / t, n - 1);
  }
  return std::pow(patch.stretch, n);
}

Pt PiecewiseRadialMap::patch_eval(const AnalyticPatch& patch, const Pt& x) const {
  if (patch.kind == RegionKind::kAnnulus) {
    const double t = std::fabs(x[patch.wedge_axis] - patch.domain_center[patch.wedge_axis]);
    const double rho = patch.coef_a * t + patch.coef_b;
    return patch.image_center + (rho / t) * (x - patch.domain_center);
  }
  return patch.image_center + patch.stretch * (x - patch.domain_center);
}

double PiecewiseRadialMap::tail_sup_bound(int k) const {
  if (k < 0) k = 0;
  if (k < static_cast<int>(tail_.size())) return tail_[k];
  double t = 0.0;
  for (int i = k + 200; i > k; --i) t += 2.0 * spec_.image_radius(i);
  return t;
}

double PiecewiseRadialMap::analytic_lipschitz() const {
  double lip = 1.0;
  for (int k = 1; k <= cap_; ++k)
    lip = std::max({lip, std::fabs(coef_[k].alpha), coef_[k].stretch,
                    coef_[k].r_img / coef_[k].r});
  return lip;
}

HolderCertificate PiecewiseRadialMap::holder_certificate(std::int64_t sample_pairs,
                                                         std::uint64_t rng_seed,
                                                         double exponent) const {
  if (sample_pairs <= 0)
    throw std::invalid_argument("holder_certificate: need a positive number of pairs");
  if (exponent <= 0.0) exponent = spec_.alpha;
  Rng rng(rng_seed);
  const int n = spec_.n;
  const Box dom = domain().box();
  HolderCertificate cert;
  cert.pairs = sample_pairs;
  const double scale_lo = std::log(std::max(1e-12, 0.25 * coef_[cap_].r));
  const double scale_hi = std::log(2.0);
  for (std::int64_t it = 0; it < sample_pairs; ++it) {
    Pt x = rng.point_in(dom);
    Pt y(n);
    if (it % 4 == 0) {
      y = rng.point_in(dom);
    } else {
      // log-uniform offset scale probes every generation of the construction
      const double s = std::exp(rng.uniform(scale_lo, scale_hi));
      for (int i = 0; i < n; ++i) {
        y[i] = x[i] + s * rng.uniform(-1.0, 1.0);
        y[i] = std::clamp(y[i], -1.0, 1.0);
      }
    }
    const double dx = sup_dist(x, y);
    if (dx <= 0.0) continue;
    const double dfx = sup_dist(eval(x), eval(y));
    cert.seminorm = std::max(cert.seminorm, dfx / std::pow(dx, exponent));
  }
  return cert;
}

std::shared_ptr<PiecewiseRadialMap> make_cantor_map(const CantorMapSpec& spec, EvalMode mode,
                                                    double limit_tolerance) {
  return std::make_shared<PiecewiseRadialMap>(spec, mode, limit_tolerance);
}

}  // namespace fracdeg
