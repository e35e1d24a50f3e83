#pragma once

#include <functional>
#include <memory>

#include "fracdeg/mapping.hpp"

namespace fracdeg {

// Analytic benchmark maps on [-1,1]^n with exact Jacobians and moduli.  The
// kink locus (where the map fails to be C^infinity) is declared explicitly so
// the quadrature engines can treat everything else as an analytic patch.

class IdentityMap : public Mapping {
 public:
  explicit IdentityMap(int n) : n_(n) {}
  int dim() const override { return n_; }
  std::string name() const override { return "id"; }
  Pt eval(const Pt& x) const override { return x; }
  Modulus modulus() const override { return {1.0, 1.0}; }
  std::optional<double> pointwise_jacobian(const Pt&) const override { return 1.0; }
  std::optional<AnalyticPatch> analytic_patch(const Box&, double) const override {
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt&) const override { return 1.0; }

 private:
  int n_;
};

class ScaleMap : public Mapping {
 public:
  ScaleMap(int n, double factor) : n_(n), factor_(factor) {}
  int dim() const override { return n_; }
  std::string name() const override { return "scale"; }
  Pt eval(const Pt& x) const override { return factor_ * x; }
  Modulus modulus() const override { return {1.0, std::max(std::fabs(factor_), 1e-9)}; }
  std::optional<double> pointwise_jacobian(const Pt&) const override {
    return std::pow(factor_, n_);
  }
  std::optional<AnalyticPatch> analytic_patch(const Box&, double) const override {
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt&) const override {
    return std::pow(factor_, n_);
  }

 private:
  int n_;
  double factor_;
};

// (x1, x2, ...) -> (-x1, x2, ...): the boundary condition of the
// orientation counterexample; degree -1 at every interior target.
class ReflectionMap : public Mapping {
 public:
  explicit ReflectionMap(int n) : n_(n) {}
  int dim() const override { return n_; }
  std::string name() const override { return "reflect"; }
  Pt eval(const Pt& x) const override {
    Pt y = x;
    y[0] = -y[0];
    return y;
  }
  Modulus modulus() const override { return {1.0, 1.0}; }
  std::optional<double> pointwise_jacobian(const Pt&) const override { return -1.0; }
  std::optional<AnalyticPatch> analytic_patch(const Box&, double) const override {
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt&) const override { return -1.0; }

 private:
  int n_;
};

// z -> z^m on the plane; J = m^2 |z|^{2(m-1)} >= 0, an m-fold cover near 0.
class ComplexPowerMap : public Mapping {
 public:
  explicit ComplexPowerMap(int exponent) : m_(exponent) {
    if (m_ < 1) throw std::invalid_argument("ComplexPowerMap: exponent must be >= 1");
  }
  int dim() const override { return 2; }
  std::string name() const override { return m_ == 2 ? "square" : (m_ == 3 ? "cube" : "zpow"); }
  int exponent() const { return m_; }
  Pt eval(const Pt& x) const override {
    double re = 1.0, im = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double r2 = re * x[0] - im * x[1];
      im = re * x[1] + im * x[0];
      re = r2;
    }
    return Pt{re, im};
  }
  Modulus modulus() const override {
    // |d/dz z^m| <= m (sqrt2)^{m-1} on the square
    return {1.0, m_ * std::pow(std::sqrt(2.0), m_ - 1)};
  }
  std::optional<double> pointwise_jacobian(const Pt& x) const override {
    return m_ * m_ * std::pow(x[0] * x[0] + x[1] * x[1], m_ - 1);
  }
  std::optional<AnalyticPatch> analytic_patch(const Box&, double) const override {
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt& x) const override {
    return *pointwise_jacobian(x);
  }

 private:
  int m_;
};

// (x1, x2) -> (s(x1) - 1/2, x2) with s a C^1 smoothing of |.|; a fold with
// J < 0 left of the crease and J > 0 right of it.
class SmoothedFoldMap : public Mapping {
 public:
  explicit SmoothedFoldMap(double eta = 1.0 / 16.0) : eta_(eta) {
    if (!(eta > 0.0 && eta < 0.5)) throw std::invalid_argument("SmoothedFoldMap: bad eta");
  }
  int dim() const override { return 2; }
  std::string name() const override { return "fold"; }
  Pt eval(const Pt& x) const override { return Pt{s(x[0]) - 0.5, x[1]}; }
  Modulus modulus() const override { return {1.0, 1.0}; }
  std::optional<double> pointwise_jacobian(const Pt& x) const override { return ds(x[0]); }
  std::optional<AnalyticPatch> analytic_patch(const Box& box, double margin) const override {
    // analytic except across the lines x1 = -eta and x1 = eta
    const double lo = box.lo[0] - margin, hi = box.hi[0] + margin;
    if (lo <= -eta_ && hi >= -eta_) return std::nullopt;
    if (lo <= eta_ && hi >= eta_) return std::nullopt;
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt& x) const override { return ds(x[0]); }

 private:
  double s(double t) const {
    return std::fabs(t) >= eta_ ? std::fabs(t) : (t * t + eta_ * eta_) / (2.0 * eta_);
  }
  double ds(double t) const {
    return std::fabs(t) >= eta_ ? (t > 0 ? 1.0 : -1.0) : t / eta_;
  }
  double eta_;
};

// z -> z^2/|z|: doubles the argument while keeping the modulus, an exactly
// two-to-one map of the square with J = 2 a.e.; image area is the square's.
class AngleDoublingMap : public Mapping {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "angle-double"; }
  Pt eval(const Pt& x) const override {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 == 0.0) return Pt{0.0, 0.0};
    const double r = std::sqrt(r2);
    return Pt{(x[0] * x[0] - x[1] * x[1]) / r, 2.0 * x[0] * x[1] / r};
  }
  Modulus modulus() const override { return {1.0, 3.0}; }
  std::optional<double> pointwise_jacobian(const Pt& x) const override {
    if (x[0] == 0.0 && x[1] == 0.0) return std::nullopt;
    return 2.0;
  }
  std::optional<AnalyticPatch> analytic_patch(const Box& box, double margin) const override {
    // analytic away from the origin
    bool hits_origin = true;
    for (int i = 0; i < 2; ++i)
      if (box.lo[i] - margin > 0.0 || box.hi[i] + margin < 0.0) hits_origin = false;
    if (hits_origin) return std::nullopt;
    return AnalyticPatch{};
  }
  double patch_jacobian(const AnalyticPatch&, const Pt&) const override { return 2.0; }
};

// id + amplitude * tensor-bump displacement; a small C^3 perturbation used by
// the degree stability checks.
class PerturbedIdentityMap : public Mapping {
 public:
  PerturbedIdentityMap(int n, double amplitude) : n_(n), amp_(amplitude) {}
  int dim() const override { return n_; }
  std::string name() const override { return "id-bump"; }
  Pt eval(const Pt& x) const override {
    double bump = 1.0;
    for (int i = 0; i < n_; ++i) {
      const double t = x[i];
      const double u = 1.0 - t * t;
      bump *= u * u * u * u;
    }
    Pt y = x;
    for (int i = 0; i < n_; ++i) y[i] += amp_ * bump;
    return y;
  }
  Modulus modulus() const override { return {1.0, 1.0 + 4.0 * std::fabs(amp_) * n_}; }

 private:
  int n_;
  double amp_;
};

// Scalar C^3 test function: amplitude * prod (1 - ((y_i-c_i)/rad)^2)^4 on its
// support, 0 outside.  Polynomial on the support, gradient bound exact.
struct BumpFn {
  Pt center;
  double radius = 1.0;
  double amplitude = 1.0;

  double operator()(const Pt& y) const {
    double v = amplitude;
    for (int i = 0; i < center.dim(); ++i) {
      const double t = (y[i] - center[i]) / radius;
      if (std::fabs(t) >= 1.0) return 0.0;
      const double u = 1.0 - t * t;
      v *= u * u * u * u;
    }
    return v;
  }
  // max_t |d/dt (1-t^2)^4| = 8|t|(1-t^2)^3 <= 1.4226 on [-1,1]
  double grad_sup() const { return std::fabs(amplitude) * 1.4226 / radius * center.dim(); }
  SupCube support() const { return SupCube(center, radius); }
};

std::shared_ptr<Mapping> make_test_map(const std::string& name, int dim);

}  // namespace fracdeg
