#include <doctest.h>

#include <cmath>

#include "fracdeg/cantor.hpp"
#include "fracdeg/quadrature.hpp"
#include "fracdeg/rng.hpp"
#include "fracdeg/seminorm.hpp"
#include "fracdeg/testmaps.hpp"

using namespace fracdeg;

namespace {
// 1-D analytic value of the double integral for f(x) = x over (0,1):
// int int |x-y|^{p - 1 - sp} dx dy = 2 / ((q+1)(q+2)), q = p - 1 - sp.
double linear_1d_exact(double s, double p) {
  const double q = p - 1.0 - s * p;
  return 2.0 / ((q + 1.0) * (q + 2.0));
}

// independent oracle: reduce to one dimension and integrate adaptively,
// excising the endpoint singularity scale
double linear_1d_oracle(double s, double p) {
  const double q = p - 1.0 - s * p;
  // int_0^1 2 (1-u) u^q du
  return adaptive_simpson([q](double u) { return 2.0 * (1.0 - u) * std::pow(u, q); }, 1e-12,
                          1.0, 1e-12);
}
}  // namespace

TEST_CASE("gagliardo seminorm: constant map vanishes, parameters validated") {
  ScaleMap constant(2, 0.0);
  SeminormParams params;
  params.s = 0.4;
  params.p = 2.0;
  params.grid_n = 8;
  const SeminormEstimate est = gagliardo_seminorm(constant, SupCube::unit(2), params);
  CHECK(est.value < 1e-12);
  CHECK(est.history.size() >= 3);
  for (size_t i = 1; i < est.history.size(); ++i)
    CHECK(est.history[i].first > est.history[i - 1].first);

  SeminormParams bad = params;
  bad.s = 1.2;
  CHECK_THROWS_AS(gagliardo_seminorm(constant, SupCube::unit(2), bad), std::invalid_argument);
  bad = params;
  bad.p = 0.5;
  CHECK_THROWS_AS(gagliardo_seminorm(constant, SupCube::unit(2), bad), std::invalid_argument);
}

TEST_CASE("gagliardo seminorm: 1-d linear map against the adaptive oracle") {
  IdentityMap line(1);
  SupCube dom(Pt{0.5}, 0.5);
  SeminormParams params;
  params.s = 0.5;
  params.p = 2.0;
  params.grid_n = 64;
  params.refinements = 3;
  const SeminormEstimate est = gagliardo_seminorm(line, dom, params);
  const double oracle = linear_1d_oracle(params.s, params.p);
  CHECK(oracle == doctest::Approx(linear_1d_exact(params.s, params.p)).epsilon(1e-9));
  CHECK(est.value == doctest::Approx(oracle).epsilon(0.01));

  // second exponent pair, integrand no longer constant
  params.s = 0.3;
  params.p = 2.5;
  const SeminormEstimate est2 = gagliardo_seminorm(line, dom, params);
  CHECK(est2.value == doctest::Approx(linear_1d_oracle(0.3, 2.5)).epsilon(0.01));
}

TEST_CASE("gagliardo integrand is symmetric under pair swap") {
  CantorMapSpec spec = CantorMapSpec::lusin_n(2, 0.5, 3);
  PiecewiseRadialMap f(spec);
  Rng rng(5);
  const double s = 0.3, p = 2.0;
  for (int it = 0; it < 1000; ++it) {
    Pt x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    Pt y{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (euclid_dist(x, y) < 1e-6) continue;
    const double fwd = std::pow(euclid_dist(f.eval(x), f.eval(y)), p) /
                       std::pow(euclid_dist(x, y), 2.0 + s * p);
    const double bwd = std::pow(euclid_dist(f.eval(y), f.eval(x)), p) /
                       std::pow(euclid_dist(y, x), 2.0 + s * p);
    CHECK(fwd == bwd);
  }
}

TEST_CASE("gagliardo seminorm: domain monotonicity and scaling law") {
  IdentityMap id(2);
  SeminormParams params;
  params.s = 0.5;
  params.p = 2.0;
  params.grid_n = 16;
  const double inner = gagliardo_seminorm(id, SupCube(Pt(2), 0.5), params).value;
  const double outer = gagliardo_seminorm(id, SupCube(Pt(2), 1.0), params).value;
  CHECK(inner < outer * 1.02);

  // p-th power scales like R^{n + p - sp} for the linear map
  const double exponent = 2.0 + params.p - params.s * params.p;
  const double r2 = gagliardo_seminorm(id, SupCube(Pt(2), 2.0), params).value;
  CHECK(r2 / outer == doctest::Approx(std::pow(2.0, exponent)).epsilon(0.02));
}

TEST_CASE("monte carlo estimator agrees with the grid estimator") {
  IdentityMap id(2);
  SeminormParams grid_params;
  grid_params.s = 0.4;
  grid_params.p = 2.0;
  grid_params.grid_n = 24;
  const double grid_value = gagliardo_seminorm(id, SupCube::unit(2), grid_params).value;

  SeminormParams mc_params = grid_params;
  mc_params.method = SeminormMethod::kMonteCarlo;
  mc_params.mc_samples = 400000;
  mc_params.seed = 7;
  const SeminormEstimate mc = gagliardo_seminorm(id, SupCube::unit(2), mc_params);
  CHECK(mc.value == doctest::Approx(grid_value).epsilon(0.10));
  // same seed, same value
  const SeminormEstimate mc2 = gagliardo_seminorm(id, SupCube::unit(2), mc_params);
  CHECK(mc.value == mc2.value);
}

TEST_CASE("construction map seminorm: stable refinement history for s < alpha") {
  CantorMapSpec spec = CantorMapSpec::lusin_n(2, 0.5, 6);
  PiecewiseRadialMap f(spec);
  SeminormParams params;
  params.s = 0.3;
  params.p = 2.0;
  params.grid_n = 16;
  params.refinements = 3;
  params.threads = 2;
  const SeminormEstimate est = gagliardo_seminorm(f, SupCube::unit(2), params);
  REQUIRE(est.history.size() == 3);
  const double a = est.history[1].second;
  const double b = est.history[2].second;
  CHECK(std::fabs(b - a) / b < 0.2);
  CHECK(est.value > 0.0);
}

TEST_CASE("holder embedding comparison: scale-free ratio for the linear map") {
  IdentityMap id(2);
  SeminormParams params;
  params.s = 0.8;
  params.p = 4.0;  // s p = 3.2 > d = 2
  params.grid_n = 12;
  std::vector<double> ratios;
  for (double R : {0.5, 1.0, 2.0}) {
    const EmbeddingReport rep = holder_vs_gagliardo(id, SupCube(Pt(2), R), params);
    CHECK(rep.alpha == doctest::Approx(params.s - 2.0 / params.p));
    CHECK(rep.ratio > 0.0);
    ratios.push_back(rep.ratio);
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK((hi - lo) / hi < 0.2);

  ScaleMap constant(2, 0.0);
  const EmbeddingReport zero = holder_vs_gagliardo(constant, SupCube::unit(2), params);
  CHECK(zero.holder_seminorm == doctest::Approx(0.0));
  CHECK(zero.gagliardo_value == doctest::Approx(0.0));

  SeminormParams weak = params;
  weak.s = 0.4;  // s p = 1.6 < 2
  CHECK_THROWS_AS(holder_vs_gagliardo(id, SupCube::unit(2), weak), EmbeddingInapplicable);
}

TEST_CASE("slice seminorms integrate against the bulk seminorm") {
  SeminormParams params;
  params.s = 0.5;
  params.p = 4.0;
  params.grid_n = 16;
  IdentityMap id(2);
  const std::vector<double> offsets = {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75};

  ScaleMap constant(2, 0.0);
  const SliceSeminormReport zero =
      slice_seminorm(constant, SupCube::unit(2), 0, offsets, params);
  CHECK(zero.integrated == doctest::Approx(0.0));
  CHECK(zero.integrated <= zero.full_domain + 1e-12);

  const SliceSeminormReport coarse = slice_seminorm(id, SupCube::unit(2), 0, offsets, params);
  SeminormParams fine = params;
  fine.grid_n = 32;
  const SliceSeminormReport refined = slice_seminorm(id, SupCube::unit(2), 0, offsets, fine);
  CHECK(coarse.ratio > 0.0);
  CHECK(refined.ratio == doctest::Approx(coarse.ratio).epsilon(0.15));

  // construction map: the slicing inequality's numerical shadow stays finite
  CantorMapSpec spec = CantorMapSpec::lusin_n(2, 0.5, 4);
  PiecewiseRadialMap f(spec);
  SeminormParams cparams;
  cparams.s = 0.3;
  cparams.p = 2.0;
  cparams.grid_n = 12;
  const SliceSeminormReport cantor =
      slice_seminorm(f, SupCube::unit(2), 1, offsets, cparams);
  CHECK(std::isfinite(cantor.ratio));
  CHECK(cantor.ratio > 0.0);

  CHECK_THROWS_AS(slice_seminorm(id, SupCube::unit(2), 0, {}, params), std::invalid_argument);
  CHECK_THROWS_AS(slice_seminorm(id, SupCube::unit(2), 0, {1.5}, params), std::invalid_argument);
}

TEST_CASE("holder embedding on a construction-map slice") {
  CantorMapSpec spec = CantorMapSpec::lusin_n(2, 0.5, 5);
  PiecewiseRadialMap f(spec);
  SliceMapping slice(f, 0, 0.1234);
  SeminormParams params;
  params.s = 0.45;  // 0.9 * alpha
  params.p = 4.0;   // s p = 1.8 > d = 1
  params.grid_n = 48;
  const EmbeddingReport rep = holder_vs_gagliardo(slice, slice.domain(), params);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
}
