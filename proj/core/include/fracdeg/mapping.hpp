#pragma once

#include <memory>
#include <optional>
#include <string>

#include "fracdeg/geometry.hpp"
#include "fracdeg/point.hpp"

namespace fracdeg {

// Continuity certificate: ||f(x)-f(y)|| <= C ||x-y||^alpha in the sup norm.
// For the construction maps this is established by targeted sampling with a
// safety factor, for the analytic test maps it is exact.
struct Modulus {
  double alpha = 1.0;
  double C = 1.0;
  double slack(double d) const { return C * std::pow(d, alpha); }
};

enum class RegionKind { kOutside, kAnnulus, kCoreCube, kResidual, kBoundary, kGlobal };

// Description of a set on which a map is analytic, detailed enough for the
// owner to evaluate the exact Jacobian there without re-classifying.
struct AnalyticPatch {
  RegionKind kind = RegionKind::kGlobal;
  int level = 0;
  Pt domain_center;   // z_v for annulus/core patches
  Pt image_center;    // image of z_v
  double coef_a = 0.0;  // radial profile rho(t) = coef_a * t + coef_b on annuli
  double coef_b = 0.0;
  double stretch = 1.0;  // homogeneous factor on core cubes
  int wedge_axis = -1;   // axis attaining the sup distance throughout the patch
};

// A continuous map of the closed cube [-1,1]^n (or a stated cube) into R^n.
class Mapping {
 public:
  virtual ~Mapping() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual SupCube domain() const { return SupCube::unit(dim()); }
  virtual Pt eval(const Pt& x) const = 0;
  virtual Modulus modulus() const = 0;

  // Pointwise a.e. Jacobian where the map has one; nullopt means "not
  // available here" (kinks, residual sets, sampled data).
  virtual std::optional<double> pointwise_jacobian(const Pt& x) const {
    (void)x;
    return std::nullopt;
  }

  // Returns a patch when f is analytic on box expanded by `margin`; the
  // quadrature engines use this to separate exact regions from collars where
  // mollification actually changes the map.
  virtual std::optional<AnalyticPatch> analytic_patch(const Box& box, double margin) const {
    (void)box;
    (void)margin;
    return std::nullopt;
  }
  virtual double patch_jacobian(const AnalyticPatch& patch, const Pt& x) const;
  virtual Pt patch_eval(const AnalyticPatch& patch, const Pt& x) const;

  // Evaluation extended outside the domain cube by sup-norm radial reflection
  // across the boundary; used by convolution near the boundary.
  Pt eval_extended(const Pt& x) const;
};

// f(x_1, x_2, ...) = base(-x_1, x_2, ...).  Jacobians flip sign.
class ReflectedMap : public Mapping {
 public:
  explicit ReflectedMap(std::shared_ptr<const Mapping> base) : base_(std::move(base)) {}

  int dim() const override { return base_->dim(); }
  std::string name() const override { return base_->name() + "-reflected"; }
  SupCube domain() const override { return base_->domain(); }
  Pt eval(const Pt& x) const override { return base_->eval(flip(x)); }
  Modulus modulus() const override { return base_->modulus(); }
  std::optional<double> pointwise_jacobian(const Pt& x) const override {
    auto j = base_->pointwise_jacobian(flip(x));
    if (!j) return std::nullopt;
    return -*j;
  }
  std::optional<AnalyticPatch> analytic_patch(const Box& box, double margin) const override {
    Box flipped = box;
    flipped.lo[0] = -box.hi[0];
    flipped.hi[0] = -box.lo[0];
    return base_->analytic_patch(flipped, margin);
  }
  double patch_jacobian(const AnalyticPatch& patch, const Pt& x) const override {
    return -base_->patch_jacobian(patch, flip(x));
  }
  Pt patch_eval(const AnalyticPatch& patch, const Pt& x) const override {
    return base_->patch_eval(patch, flip(x));
  }
  const Mapping& base() const { return *base_; }

 private:
  static Pt flip(Pt x) {
    x[0] = -x[0];
    return x;
  }
  std::shared_ptr<const Mapping> base_;
};

}  // namespace fracdeg
