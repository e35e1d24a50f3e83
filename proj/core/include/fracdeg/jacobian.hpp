#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fracdeg/cantor.hpp"
#include "fracdeg/degree.hpp"
#include "fracdeg/grid_function.hpp"
#include "fracdeg/mollify.hpp"
#include "fracdeg/testmaps.hpp"

namespace fracdeg {

// ---------------------------------------------------------------------------
// Smoothed-Jacobian pairings

// Scalar test data: evaluator plus the gradient bound the difference
// estimates need.  `support` (when bounded) restricts the quadrature sweep.
struct TestFn {
  std::function<double(const Pt&)> fn;
  double grad_sup = 0.0;
  std::string name = "phi";
  std::optional<Box> support;

  double operator()(const Pt& x) const { return fn(x); }
};
TestFn bump_test_fn(const BumpFn& bump);
TestFn constant_one(int dim);

struct MollifiedSequence {
  std::shared_ptr<const Mapping> source;
  std::vector<double> scales;  // strictly decreasing smoothing scales
  KernelOptions kernel;

  static MollifiedSequence geometric(std::shared_ptr<const Mapping> source, double eps0,
                                     int count, double ratio = 0.5);
  void validate() const;
};

struct PairingOptions {
  double leaf_factor = 0.45;  // rough-leaf size as a fraction of the scale
  double min_leaf = 1e-5;
  int max_depth = 26;
  int smooth_order = 4;
  int rough_order = 1;  // midpoint on rough leaves; they are small by design
  // Analytic cells still split down to this size (within refine_zone when
  // set) so that sharply supported test functions are resolved.
  double smooth_leaf = 0.05;
  std::function<bool(const Box&)> refine_zone;
  KernelOptions kernel;
  int threads = 1;
};

struct PairingScale {
  double eps = 0.0;
  double value = 0.0;
};

struct JacobianPairing {
  std::vector<PairingScale> per_scale;
  double extrapolated = 0.0;
  double error_indicator = 0.0;  // spread of the last scales around the limit
  bool cauchy = true;            // successive differences do not grow
};

// Weighted integrals sum_m  int J_{f_eps}(x) w_m(x, f_eps(x)) dx over the
// region, one sweep for all weights.  Analytic patches bypass the kernel
// quadrature entirely (there f_eps == f exactly, margin eps).
using PairingWeight = std::function<double(const Pt& x, const Pt& f_eps_x)>;
std::vector<double> mollified_pairing_sweep(const Mapping& f, double eps, const Box& region,
                                            const std::vector<PairingWeight>& weights,
                                            const PairingOptions& opt);

// Per-scale pairings of phi against the smoothed Jacobians plus a Richardson
// limit; flags non-Cauchy tails instead of hiding them.
JacobianPairing distributional_jacobian(const MollifiedSequence& seq, const TestFn& phi,
                                        const PairingOptions& opt = {});

// ---------------------------------------------------------------------------
// Measures of image sets

enum class MeasureMethod { kRasterImage, kLevelFormula, kQuadrature };

struct MeasureEstimate {
  double lower = 0.0;
  double upper = 0.0;
  MeasureMethod method = MeasureMethod::kRasterImage;
  double midpoint() const { return 0.5 * (lower + upper); }
};

struct RasterOptions {
  int max_cells_per_axis = 4096;
  int min_cells_per_axis = 32;
};

// Interval bounds on |f(U)| from the node images and the modulus balls:
// the upper bound covers f(U) by balls around samples, the lower bound keeps
// only raster cells wholly inside a single ball.
MeasureEstimate image_measure(const GridFunction& f, const SupCube& U,
                              const RasterOptions& opt = {});

// |{y : deg(f,U,y) != 0}| by per-cell degree queries; cells whose query
// cannot be certified widen the interval instead of guessing.
MeasureEstimate degree_measure(const GridFunction& f, const SupCube& U, int raster_n);

struct EpsilonTooSmall : std::invalid_argument {
  EpsilonTooSmall(const std::string& what, double min_usable)
      : std::invalid_argument(what), min_usable(min_usable) {}
  double min_usable;
};

// Number of face-connected components of {x : ||f(x)-y|| < epsilon} on the
// sampling grid; a sampled stand-in for the multiplicity N(f,y,.).
int preimage_count(const GridFunction& f, const Pt& y, double epsilon);

// ---------------------------------------------------------------------------
// Ciarlet-Nečas style checks

enum class CnVerdict { kHolds, kFails, kInconclusive };
std::string to_string(CnVerdict v);

struct CnOptions {
  std::vector<double> scales;          // smoothing scales per cutoff
  std::vector<double> cutoff_factors = {4.0, 2.0, 1.0};
  double cutoff_base = 0.02;           // delta = factor * base
  PairingOptions pairing;
  int measure_grid_n = 512;
  RasterOptions raster;
  double hold_tolerance = 0.02;
  double inconclusive_tolerance = 0.10;
};

struct CnReport {
  CnVerdict verdict = CnVerdict::kInconclusive;
  double jacobian_measure = 0.0;  // extrapolated J_f(U)
  MeasureEstimate image;
  double ratio = 0.0;  // jacobian measure / image midpoint
  std::vector<std::pair<double, double>> cutoff_values;  // (delta, scale-extrapolated value)
  std::vector<JacobianPairing> pairings;                 // one per cutoff
};

CnReport ciarlet_necas_check(const Mapping& f, const SupCube& U, const CnOptions& opt = {});

struct CnStabilityRow {
  int level = 0;
  CnVerdict verdict = CnVerdict::kInconclusive;
  double jacobian_measure = 0.0;
  MeasureEstimate image;
  double image_midpoint = 0.0;
};

struct CnStabilityReport {
  std::vector<CnStabilityRow> rows;
  std::vector<double> gaps;  // |m_{i+1} - m_i| of the image midpoints
  bool cauchy_ok = false;
  double gap_floor = 5e-3;
};

// Runs the per-level Ciarlet-Nečas check along a sequence of truncations and
// watches the image measures settle (the numerical shadow of weak-limit
// stability, not a proof).
CnStabilityReport cn_stability_experiment(const CantorMapSpec& spec,
                                          const std::vector<int>& levels, const SupCube& U,
                                          const CnOptions& opt = {}, int degree_raster_n = 192);

// ---------------------------------------------------------------------------
// Difference bound and change of variables

struct BnReport {
  double pairing_difference = 0.0;
  double seminorm_product_bound = 0.0;  // ||f-g|| (||f||^{n-1}+||g||^{n-1}) ||grad psi||_inf
  double ratio = 0.0;                   // empirical constant
  double seminorm_f = 0.0, seminorm_g = 0.0, seminorm_diff = 0.0;
};

struct BnOptions {
  std::vector<double> scales = {0.04, 0.02, 0.01};
  PairingOptions pairing;
  int seminorm_grid_n = 24;
  int seminorm_refinements = 3;
};

BnReport bn_difference_ratio(std::shared_ptr<const Mapping> f, std::shared_ptr<const Mapping> g,
                             const BumpFn& psi, const BnOptions& opt = {});

struct CovCheckOptions {
  std::vector<double> scales = {0.02, 0.01, 0.005};
  PairingOptions pairing;
  int grid_n = 256;
  int rhs_cells = 48;
  int rhs_order = 3;
  double max_failure_weight = 1e-3;
};

struct CovCheckReport {
  CertStatus status = CertStatus::kInconclusive;
  double lhs = 0.0;  // scale limit of int J_{f_eps} psi(f_eps)
  double rhs = 0.0;  // int deg(f,Omega,y) psi(y) dy
  double difference = 0.0;
  double support_gap = 0.0;
  JacobianPairing lhs_pairing;
};

// The change-of-variables identity with the degree on the right-hand side;
// psi must keep a certified distance from the image of the boundary.
CovCheckReport change_of_variables_check(std::shared_ptr<const Mapping> f, const SupCube& Omega,
                                         const BumpFn& psi, const CovCheckOptions& opt = {});

// ---------------------------------------------------------------------------
// Construction-map exact region integrals and experiments

// int_{Q0} J_f(x) w(x, f(x)) dx summed per analytic region: all annuli of
// generations 1..K (sup-polar parametrization per face, so the integrand is
// smooth on every quadrature patch) plus the level-K cores.
struct CantorRegionIntegral {
  std::vector<double> annulus_by_level;  // index k-1 holds generation k
  double core_at_cap = 0.0;
  double total = 0.0;
};
CantorRegionIntegral cantor_jacobian_integral(const PiecewiseRadialMap& f,
                                              const PairingWeight& w, int t_order = 6,
                                              int v_order = 6, int t_cells = 2);

struct LusinLevelRow {
  int level = 0;
  double analytic_regions = 0.0;  // sum of image-shell measures through this level
  double closed_form = 0.0;       // 2^n - (2 b_k)^n
};

struct LusinMassReport {
  std::vector<LusinLevelRow> rows;
  std::vector<std::pair<double, double>> cutoff_values;
  std::vector<JacobianPairing> pairings;
  double jacobian_total = 0.0;   // extrapolated J_f(Q0)
  double pointwise_limit = 0.0;  // Aitken limit of the per-level integrals
  double singular_gap = 0.0;     // jacobian_total - pointwise_limit
};

struct LusinOptions {
  std::vector<double> scales = {0.02, 0.01, 0.005};
  std::vector<double> cutoff_factors = {4.0, 2.0, 1.0};
  double cutoff_base = 0.02;
  PairingOptions pairing;
};

// Quantifies the failure of the Lusin (N) condition: the smoothed-Jacobian
// mass of the whole cube stays at |Q0| while the pointwise Jacobian integral
// only reaches |Q0| minus the limit measure of the image Cantor set.
LusinMassReport lusin_mass_experiment(const CantorMapSpec& spec, const LusinOptions& opt = {});

struct OrientationReport {
  std::int64_t samples = 0;
  std::int64_t resolved = 0;        // points whose a.e. derivative is determined
  std::int64_t positive = 0;        // of those, how many have positive Jacobian
  double positive_fraction = 0.0;
  std::vector<int> degrees;         // sampled degrees of the reflected map
  bool all_degree_minus_one = false;
};

// Pointwise Jacobian of the reflected orientation map against its boundary
// degree: positive a.e. yet degree -1 everywhere.
OrientationReport orientation_experiment(const CantorMapSpec& spec, std::int64_t jacobian_samples,
                                         int degree_targets, int grid_n, std::uint64_t seed);

}  // namespace fracdeg
