#pragma once

#include <vector>

#include "fracdeg/mapping.hpp"

namespace fracdeg {

// Quadrature backends for the double integral
//   [f]^p_{s,p} = int int |f(x)-f(y)|^p / |x-y|^{d+sp} dx dy
// over a cube (euclidean distances).  The diagonal is excised at one grid
// spacing and re-added through an analytic bound driven by the certified
// Hölder modulus; the integrand is integrable exactly when alpha > s.
enum class SeminormMethod { kGrid, kMonteCarlo };

struct SeminormParams {
  double s = 0.5;
  double p = 2.0;
  SeminormMethod method = SeminormMethod::kGrid;
  int grid_n = 32;                 // coarsest resolution; refined x2 per step
  int refinements = 3;             // history length (>= 3 reported)
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 1;
  double mc_min_dist = 1e-6;
  int threads = 1;
};

struct SeminormEstimate {
  double value = 0.0;  // p-th power of the seminorm, finest resolution
  std::vector<std::pair<int, double>> history;  // (resolution, estimate)
  double diagonal_correction = 0.0;
  std::string method;
};

// Restriction of f to the hyperplane slice {x_axis = offset} of its domain,
// exposed as a (d-1)-dimensional map.
class SliceMapping : public Mapping {
 public:
  SliceMapping(const Mapping& f, int axis, double offset);
  int dim() const override { return f_.dim() - 1; }
  std::string name() const override;
  SupCube domain() const override;
  Pt eval(const Pt& u) const override;
  Modulus modulus() const override { return f_.modulus(); }

 private:
  const Mapping& f_;
  int axis_;
  double offset_;
};

SeminormEstimate gagliardo_seminorm(const Mapping& f, const SupCube& dom,
                                    const SeminormParams& params);

struct EmbeddingReport {
  double holder_seminorm = 0.0;    // sup |f(x)-f(y)| / |x-y|^alpha, alpha = s - d/p
  double gagliardo_value = 0.0;    // p-th root of the double integral
  double ratio = 0.0;              // holder / gagliardo
  double alpha = 0.0;
};

struct EmbeddingInapplicable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Both sides of the scale-free Hölder embedding; requires sp > d.
EmbeddingReport holder_vs_gagliardo(const Mapping& f, const SupCube& cube,
                                    const SeminormParams& params);

struct SliceSeminormReport {
  std::vector<std::pair<double, double>> per_offset;  // (offset, seminorm p-power)
  double integrated = 0.0;   // trapezoid integral over the offsets
  double full_domain = 0.0;  // seminorm p-power over the whole cube
  double ratio = 0.0;        // empirical constant of the slicing inequality
};

SliceSeminormReport slice_seminorm(const Mapping& f, const SupCube& dom, int axis,
                                   const std::vector<double>& offsets,
                                   const SeminormParams& params);

}  // namespace fracdeg
