#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracdeg/mapping.hpp"
#include "fracdeg/rational.hpp"

namespace fracdeg {

enum class CantorVariant { kLusinN, kOrientation };

std::string to_string(CantorVariant v);
CantorVariant cantor_variant_from_string(const std::string& s);

// Parameters of the nested-cube construction.  Two families:
//
//   kLusinN:       A = 2^{(1-alpha)/alpha},  a_k = A^{-k},
//                  b_k = (1 - 1/A)/2 + A^{-k} for k >= 1, b_0 = 1.
//                  The map is a homeomorphism stretching a null Cantor set
//                  onto one of positive measure.
//   kOrientation:  free A > 0 and B in (0,1) with B + A < (1+A)(1-alpha);
//                  a_k = 2^{-Ak}, b_k = 2^{Bk}.  Image cubes overflow their
//                  slots, so annuli are turned inside out (negative radial
//                  slope) while core cubes keep positive Jacobian.
//
// Domain/image radii are r_k = a_k 2^{-k} and r~_k = b_k 2^{-k}; b_0 = 1 in
// both families so that the level-1 outer annulus is glued to the identity.
struct CantorMapSpec {
  int n = 2;
  CantorVariant variant = CantorVariant::kLusinN;
  double alpha = 0.5;
  double A = 2.0;
  double B = 0.0;
  int truncation_level = 4;  // K
  std::uint64_t seed = 1;

  static CantorMapSpec lusin_n(int n, double alpha, int level);
  static CantorMapSpec orientation(int n, double alpha, double A, double B, int level);

  void validate() const;  // throws std::invalid_argument on any broken invariant

  double a(int k) const;
  double b(int k) const;             // with the b_0 = 1 normalization
  double domain_radius(int k) const;  // r_k
  double image_radius(int k) const;   // r~_k

  // Exact dyadic backbone, available when A is an integer power of two
  // (kLusinN with alpha = 1/(m+1); e.g. alpha = 1/2 gives A = 2).
  bool exact() const;
  Rational a_exact(int k) const;
  Rational b_exact(int k) const;
  Rational domain_radius_exact(int k) const;
  Rational image_radius_exact(int k) const;

  // key=value round trip (n, variant, alpha, A, B, K, seed).
  std::string to_config() const;
  static CantorMapSpec from_config(const std::string& text);
};

// L^n measure of the union of the 2^{nk} generation-k cubes.
enum class ConstructionSide { kDomain, kImage };
struct LevelMeasure {
  double value = 0.0;
  std::optional<Rational> exact;
};
LevelMeasure level_union_measure(const CantorMapSpec& spec, ConstructionSide side, int k);

// Where a point sits relative to the truncated construction.
struct RegionTag {
  RegionKind kind = RegionKind::kOutside;
  int level = 0;
  std::uint64_t path = 1;  // packed vertex path of the governing cube
};

struct RegionPoint {
  RegionTag tag;
  Pt domain_center;  // z_v of the governing cube (annulus or core)
  Pt image_center;   // its image
  double t = 0.0;    // sup distance ||x - z_v||
};

enum class EvalMode { kLevelK, kLimit };

struct UndefinedDerivative : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Differential {
  double operator_norm = 0.0;  // sup-norm radial model: max{rho(t)/t, |rho'(t)|}
  double jacobian = 0.0;       // rho'(t) (rho(t)/t)^{n-1}; stretch^n on cores
  double fd_jacobian = 0.0;    // centered finite-difference cross-check
  RegionTag tag;
};

struct HolderCertificate {
  double seminorm = 0.0;  // max ||f(x)-f(y)|| / ||x-y||^alpha over sampled pairs (sup norms)
  std::int64_t pairs = 0;
};

// The level-K approximant f_K of the construction map, with its analytic
// derivative data.  kLimit mode evaluates f_k for the smallest k whose
// uniform tail bound 2 sum_{i>=k} r~_i drops below the tolerance.
class PiecewiseRadialMap : public Mapping {
 public:
  explicit PiecewiseRadialMap(CantorMapSpec spec, EvalMode mode = EvalMode::kLevelK,
                              double limit_tolerance = 1e-9);

  const CantorMapSpec& spec() const { return spec_; }
  EvalMode mode() const { return mode_; }
  int descent_cap() const { return cap_; }

  int dim() const override { return spec_.n; }
  std::string name() const override;
  Pt eval(const Pt& x) const override;  // throws std::domain_error outside [-1,1]^n
  Modulus modulus() const override { return modulus_; }
  std::optional<double> pointwise_jacobian(const Pt& x) const override;
  std::optional<AnalyticPatch> analytic_patch(const Box& box, double margin) const override;
  double patch_jacobian(const AnalyticPatch& patch, const Pt& x) const override;
  Pt patch_eval(const AnalyticPatch& patch, const Pt& x) const override;

  RegionPoint classify(const Pt& x) const;
  Differential analytic_differential(const Pt& x) const;  // throws UndefinedDerivative

  // Per-level annulus coefficients: rho_k(t) = alpha_k t + beta_k solves
  // rho(r_k) = r~_k, rho(r_{k-1}/2) = r~_{k-1}/2.
  double annulus_alpha(int k) const { return coef_[k].alpha; }
  double annulus_beta(int k) const { return coef_[k].beta; }
  double core_stretch(int k) const { return coef_[k].stretch; }

  // sup bound on ||f - f_k||_inf, the geometric tail 2 sum_{i>k} r~_i.
  double tail_sup_bound(int k) const;
  // Largest |Df| over all regions up to the cap (sup-norm model).
  double analytic_lipschitz() const;

  // exponent <= 0 means "use the construction's alpha".
  HolderCertificate holder_certificate(std::int64_t sample_pairs, std::uint64_t rng_seed,
                                       double exponent = 0.0) const;

 private:
  struct Coef {
    double r = 1.0, r_img = 1.0;
    double alpha = 1.0, beta = 0.0, stretch = 1.0;
  };

  RegionPoint classify_to(const Pt& x, int cap) const;

  CantorMapSpec spec_;
  EvalMode mode_;
  double limit_tol_;
  int cap_ = 0;
  std::vector<Coef> coef_;   // index 0..cap
  std::vector<double> tail_;  // tail_[k] = 2 sum_{i>k} r~_i
  Modulus modulus_;
};

std::shared_ptr<PiecewiseRadialMap> make_cantor_map(const CantorMapSpec& spec,
                                                    EvalMode mode = EvalMode::kLevelK,
                                                    double limit_tolerance = 1e-9);

// Integral of the a.e. pointwise Jacobian of the limit map over the regions
// resolved by generations 1..k (each annulus contributes exactly the measure
// of its image shell).  Equals |Q_0| minus the level-k image-core measure.
LevelMeasure pointwise_jacobian_integral(const CantorMapSpec& spec, int k);

}  // namespace fracdeg
